#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vdgslice/promela.hpp"
#include "vdgslice/slicer.hpp"

namespace vdgslice {

/// Sources and entries recorded by `analyze`; later commands reload them.
struct Project {
  std::vector<std::string> sources;  // as given on the command line
  std::vector<std::string> entries;
};

struct Analysis {
  SourceModel model;
  ExecutionPaths paths;
  Vdg vdg;
  std::uint64_t content_hash = 0;
  bool cache_hit = false;
  double elapsed_ms = 0;
};

/// Hash over tool version, entries, file names and file bytes.
std::uint64_t content_hash(const std::vector<SourceBuffer>& sources, const std::vector<std::string>& entries);

/// Parses, expands paths and builds the VDG. With a cache directory, a VDG
/// stored under the same content hash is reused instead of rebuilt.
std::unique_ptr<Analysis> analyze(std::vector<SourceBuffer> sources, const std::vector<std::string>& entries,
                                  const std::optional<std::string>& cache_dir = std::nullopt);
std::vector<SourceBuffer> read_sources(const std::vector<std::string>& paths);

/// Line-oriented dump of nodes, edges and traces; `read_vdg` restores it
/// against the same model.
std::string write_vdg(const Vdg& vdg, const SourceModel& model);
Vdg read_vdg(std::string_view text, const SourceModel& model);

std::string cache_directory();
void save_project(const Project& project, const std::string& dir);
/// Throws UserError when no project was analyzed in `dir`.
Project load_project(const std::string& dir);

/// `files:`, `logical_loc:`, `paths:`, `nodes:`, `edges:` lines, plus
/// `elapsed_ms:` when requested.
std::string render_summary(const Analysis& analysis, bool with_elapsed);
/// Goal or start trees for every node named by `root` (VAR@FILE:LINE).
std::string render_trees(const Analysis& analysis, const RootSpec& root, bool folded, bool grouped);
RootSpec parse_root_spec(const std::string& text, Direction direction);

/// Slice report, interface table and color annotations, each under a
/// `# <section>` heading.
std::string render_slice_output(const Slice& slice, const SourceModel& model);

}  // namespace vdgslice

#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "vdgslice/project.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(VDGSLICE_FIXTURES) + "/" + name; }

inline std::string read(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fixture files are analyzed under their bare names, as in the criteria files.
inline std::unique_ptr<vdgslice::Analysis> analyze(const std::vector<std::string>& names,
                                                   const std::vector<std::string>& entries) {
  std::vector<vdgslice::SourceBuffer> buffers;
  for (const auto& n : names) buffers.push_back({n, read(path(n))});
  return vdgslice::analyze(std::move(buffers), entries);
}

inline std::unique_ptr<vdgslice::Analysis> analyze_text(const std::string& text, const std::vector<std::string>& entries,
                                                        const std::string& name = "t.c") {
  return vdgslice::analyze({{name, text}}, entries);
}

inline vdgslice::NodeIndex node(const vdgslice::Analysis& a, const std::string& id) {
  auto n = a.vdg.find(id);
  if (!n) throw std::runtime_error("no node " + id);
  return *n;
}

}  // namespace fixtures

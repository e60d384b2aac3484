#pragma once

#include <set>
#include <string>
#include <vector>

#include "vdgslice/criteria.hpp"
#include "vdgslice/frontend.hpp"

namespace vdgslice {

struct Slice {
  std::set<StmtId> statements;    // statement heads, blocks excluded
  std::set<SymbolId> declarations;
  std::set<SymbolId> functions;
  std::vector<InterfaceVariable> interfaces;
  std::set<StmtId> picked_up;
  // Retained VDG nodes (cut nodes excluded) and the cut nodes reached.
  std::vector<NodeIndex> nodes;
  std::vector<NodeIndex> cut_nodes;
  std::vector<std::string> warnings;

  bool empty() const { return statements.empty(); }
};

/// Reachability from the root nodes over the VDG, stopping at cut nodes,
/// projected to statements with control-flow and call-site closure.
Slice compute_slice(const Vdg& vdg, const SourceModel& model, const SlicingCriteria& criteria);

/// Slice from an explicit node set (already retained) and the cuts reached.
Slice slice_from_nodes(const Vdg& vdg, const SourceModel& model, std::vector<NodeIndex> retained,
                       std::vector<NodeIndex> cut_nodes);

/// Adds variable-free statements on retained control flow. Throws
/// NotOnRetainedPath for positions outside retained functions.
Slice pickup_statements(const Slice& slice, const SourceModel& model, const std::vector<CodePosition>& requests);

enum class LineClass { OutOfScope, InSlice, PickedUp, Interface };
std::string_view line_class_name(LineClass c);

struct ColorClassification {
  std::vector<std::vector<LineClass>> lines;  // per file, index 0 is line 1
};

ColorClassification color_report(const Slice& slice, const SourceModel& model);

/// `<file>:<line>:<class>`, one line per source line.
std::string render_color_annotations(const ColorClassification& colors, const SourceModel& model);
/// Per file: `<file>: <line> <line> ...` of retained statement heads.
std::string render_slice_report(const Slice& slice, const SourceModel& model);
/// One line per interface: name, declared type, paths, source positions.
std::string render_interface_table(const Slice& slice, const SourceModel& model);
std::vector<std::uint32_t> retained_lines(const Slice& slice, const SourceModel& model, FileId file);

/// The sliced program as C text (interfaces left as plain variables).
std::string sliced_source(const Slice& slice, const SourceModel& model);

}  // namespace vdgslice

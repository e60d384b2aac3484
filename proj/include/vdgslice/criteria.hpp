#pragma once

#include <set>
#include <string>
#include <vector>

#include "vdgslice/trees.hpp"

namespace vdgslice {

struct RootSpec {
  std::string variable;
  std::string file;
  std::uint32_t line = 0;
  Direction direction = Direction::Goal;

  bool operator==(const RootSpec&) const = default;
};

/// Either an exact node id, or every node of a variable inside a function.
struct CutSelector {
  std::string node;
  std::string variable;
  std::string function;

  bool by_node() const { return !node.empty(); }
  std::string describe() const;
  bool operator==(const CutSelector&) const = default;
};

struct MapRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::string name;

  bool operator==(const MapRange&) const = default;
};

struct DataMapping {
  std::string variable;
  std::vector<MapRange> map;

  bool operator==(const DataMapping&) const = default;
};

struct SlicingCriteria {
  std::vector<std::string> entry_points;
  std::vector<RootSpec> roots;
  std::vector<CutSelector> cuts;
  std::vector<DataMapping> data_maps;

  const DataMapping* mapping_for(std::string_view variable) const;
  bool operator==(const SlicingCriteria&) const = default;
};

/// Throws SchemaError (with a JSON path) or RangeOverlap.
SlicingCriteria parse_criteria(std::string_view json_text);
SlicingCriteria load_criteria(const std::string& path);
/// Normalized form: fixed key order, two-space indentation, trailing newline.
std::string serialize_criteria(const SlicingCriteria& criteria);
void save_criteria(const SlicingCriteria& criteria, const std::string& path);
/// Parses a selector object {"node":..} or {"variable":..,"function":..}.
CutSelector parse_cut_selector(std::string_view json_text);

/// Nodes named by a root. Throws UnknownNode when nothing matches.
std::vector<NodeIndex> resolve_root(const Vdg& vdg, const SourceModel& model, const RootSpec& root);
std::vector<NodeIndex> match_cut(const Vdg& vdg, const SourceModel& model, const CutSelector& cut);

struct InterfaceVariable {
  SymbolId symbol = kNoSymbol;
  std::uint32_t substance = 0;
  std::vector<CodePosition> positions;
  std::set<std::uint32_t> paths;
  bool from_cut = false;
};

/// Interfaces for a retained node set: variables of the cut nodes reached,
/// in cut position order, then shared variables whose retained uses can read
/// the value held at path entry, in order of first use. One per substance.
std::vector<InterfaceVariable> compute_interfaces(const Vdg& vdg, const SourceModel& model,
                                                  const std::vector<NodeIndex>& cut_nodes,
                                                  const std::vector<NodeIndex>& retained);

struct CutResult {
  DepTree tree;
  std::vector<InterfaceVariable> interfaces;
  std::vector<std::string> warnings;
};

CutResult apply_cuts(const DepTree& tree, const Vdg& vdg, const SourceModel& model,
                     const std::vector<CutSelector>& cuts);

}  // namespace vdgslice

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vdgslice/criteria.hpp"
#include "vdgslice/errors.hpp"

namespace vdgslice {

using nlohmann::json;
using nlohmann::ordered_json;

std::string CutSelector::describe() const {
  if (by_node()) return node;
  return variable + " in " + function;
}

const DataMapping* SlicingCriteria::mapping_for(std::string_view variable) const {
  for (const auto& m : data_maps)
    if (m.variable == variable) return &m;
  return nullptr;
}

namespace {

class Reader {
 public:
  const json& object(const json& j, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    return j;
  }
  const json& array(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array");
    return j;
  }
  std::string string(const json& j, const std::string& where) {
    if (!j.is_string()) throw SchemaError(where + ": expected a string");
    return j.get<std::string>();
  }
  std::int64_t integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
    return j.get<std::int64_t>();
  }
  const json& field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing \"" + key + "\"");
    return *it;
  }
  void only(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) throw SchemaError(where + ": unexpected key \"" + it.key() + "\"");
    }
  }
};

CutSelector read_cut(Reader& r, const json& j, const std::string& where) {
  r.object(j, where);
  CutSelector c;
  if (j.contains("node")) {
    r.only(j, {"node"}, where);
    c.node = r.string(j["node"], where + ".node");
    if (c.node.empty()) throw SchemaError(where + ".node: empty node id");
    return c;
  }
  r.only(j, {"variable", "function"}, where);
  c.variable = r.string(r.field(j, "variable", where), where + ".variable");
  c.function = r.string(r.field(j, "function", where), where + ".function");
  if (c.variable.empty() || c.function.empty()) throw SchemaError(where + ": empty variable or function");
  return c;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$: invalid JSON at byte " + std::to_string(e.byte));
  }
}

}  // namespace

SlicingCriteria parse_criteria(std::string_view json_text) {
  json j = parse_json(json_text);
  Reader r;
  r.object(j, "$");
  r.only(j, {"entry_points", "roots", "cuts", "data_maps"}, "$");
  SlicingCriteria c;
  if (j.contains("entry_points")) {
    const json& a = r.array(j["entry_points"], "$.entry_points");
    for (std::size_t i = 0; i < a.size(); ++i)
      c.entry_points.push_back(r.string(a[i], "$.entry_points[" + std::to_string(i) + "]"));
  }
  if (j.contains("roots")) {
    const json& a = r.array(j["roots"], "$.roots");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string w = "$.roots[" + std::to_string(i) + "]";
      r.object(a[i], w);
      r.only(a[i], {"variable", "file", "line", "direction"}, w);
      RootSpec root;
      root.variable = r.string(r.field(a[i], "variable", w), w + ".variable");
      root.file = r.string(r.field(a[i], "file", w), w + ".file");
      std::int64_t line = r.integer(r.field(a[i], "line", w), w + ".line");
      if (line < 1) throw SchemaError(w + ".line: must be at least 1");
      root.line = static_cast<std::uint32_t>(line);
      std::string dir = a[i].contains("direction") ? r.string(a[i]["direction"], w + ".direction") : "goal";
      auto d = parse_direction(dir);
      if (!d) throw SchemaError(w + ".direction: expected \"goal\" or \"start\"");
      root.direction = *d;
      c.roots.push_back(std::move(root));
    }
  }
  if (j.contains("cuts")) {
    const json& a = r.array(j["cuts"], "$.cuts");
    for (std::size_t i = 0; i < a.size(); ++i) c.cuts.push_back(read_cut(r, a[i], "$.cuts[" + std::to_string(i) + "]"));
  }
  if (j.contains("data_maps")) {
    const json& a = r.array(j["data_maps"], "$.data_maps");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string w = "$.data_maps[" + std::to_string(i) + "]";
      r.object(a[i], w);
      r.only(a[i], {"variable", "map"}, w);
      DataMapping m;
      m.variable = r.string(r.field(a[i], "variable", w), w + ".variable");
      const json& ranges = r.array(r.field(a[i], "map", w), w + ".map");
      for (std::size_t k = 0; k < ranges.size(); ++k) {
        std::string rw = w + ".map[" + std::to_string(k) + "]";
        r.object(ranges[k], rw);
        r.only(ranges[k], {"lo", "hi", "name"}, rw);
        MapRange range;
        range.lo = r.integer(r.field(ranges[k], "lo", rw), rw + ".lo");
        range.hi = r.integer(r.field(ranges[k], "hi", rw), rw + ".hi");
        range.name = r.string(r.field(ranges[k], "name", rw), rw + ".name");
        if (range.lo > range.hi) throw SchemaError(rw + ": lo is greater than hi");
        if (range.name.empty()) throw SchemaError(rw + ".name: empty name");
        m.map.push_back(std::move(range));
      }
      if (m.map.empty()) throw SchemaError(w + ".map: empty map");
      std::vector<MapRange> sorted = m.map;
      std::sort(sorted.begin(), sorted.end(), [](const MapRange& a, const MapRange& b) { return a.lo < b.lo; });
      for (std::size_t k = 1; k < sorted.size(); ++k)
        if (sorted[k].lo <= sorted[k - 1].hi) throw RangeOverlap(m.variable);
      for (const auto& other : c.data_maps)
        if (other.variable == m.variable) throw SchemaError(w + ".variable: \"" + m.variable + "\" mapped twice");
      c.data_maps.push_back(std::move(m));
    }
  }
  return c;
}

SlicingCriteria load_criteria(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot read criteria file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_criteria(ss.str());
}

std::string serialize_criteria(const SlicingCriteria& c) {
  ordered_json j;
  j["entry_points"] = c.entry_points;
  j["roots"] = ordered_json::array();
  for (const auto& r : c.roots) {
    ordered_json o;
    o["variable"] = r.variable;
    o["file"] = r.file;
    o["line"] = r.line;
    o["direction"] = direction_name(r.direction);
    j["roots"].push_back(std::move(o));
  }
  j["cuts"] = ordered_json::array();
  for (const auto& cut : c.cuts) {
    ordered_json o;
    if (cut.by_node()) {
      o["node"] = cut.node;
    } else {
      o["variable"] = cut.variable;
      o["function"] = cut.function;
    }
    j["cuts"].push_back(std::move(o));
  }
  j["data_maps"] = ordered_json::array();
  for (const auto& m : c.data_maps) {
    ordered_json o;
    o["variable"] = m.variable;
    o["map"] = ordered_json::array();
    for (const auto& r : m.map) {
      ordered_json e;
      e["lo"] = r.lo;
      e["hi"] = r.hi;
      e["name"] = r.name;
      o["map"].push_back(std::move(e));
    }
    j["data_maps"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

void save_criteria(const SlicingCriteria& criteria, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SchemaError(path + ": cannot write criteria file");
  out << serialize_criteria(criteria);
}

CutSelector parse_cut_selector(std::string_view json_text) {
  Reader r;
  return read_cut(r, parse_json(json_text), "$");
}

std::vector<NodeIndex> resolve_root(const Vdg& vdg, const SourceModel& model, const RootSpec& root) {
  NodeFilter f;
  f.file = root.file;
  f.line = root.line;
  auto nodes = find_nodes(vdg, model, root.variable, f);
  if (nodes.empty()) throw UnknownNode(root.variable + "@" + root.file + ":" + std::to_string(root.line));
  return nodes;
}

std::vector<NodeIndex> match_cut(const Vdg& vdg, const SourceModel& model, const CutSelector& cut) {
  std::vector<NodeIndex> out;
  if (cut.by_node()) {
    if (auto n = vdg.find(cut.node)) out.push_back(*n);
    return out;
  }
  for (NodeIndex i = 0; i < vdg.nodes.size(); ++i) {
    const VdgNode& n = vdg.nodes[i];
    if (model.symbol(n.symbol).name != cut.variable) continue;
    if (n.function == kNoSymbol || model.symbol(n.function).name != cut.function) continue;
    out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [&](NodeIndex a, NodeIndex b) { return vdg.id_less(a, b); });
  return out;
}

std::vector<InterfaceVariable> compute_interfaces(const Vdg& vdg, const SourceModel& model,
                                                  const std::vector<NodeIndex>& cut_nodes,
                                                  const std::vector<NodeIndex>& retained) {
  auto by_rank = [&](std::vector<NodeIndex> v) {
    std::sort(v.begin(), v.end(), [&](NodeIndex a, NodeIndex b) { return vdg.id_less(a, b); });
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  std::vector<InterfaceVariable> out;
  std::map<std::uint32_t, std::size_t> slot;
  auto add = [&](NodeIndex i, bool from_cut) {
    const VdgNode& n = vdg.nodes[i];
    auto [it, inserted] = slot.emplace(n.substance, out.size());
    if (inserted) {
      InterfaceVariable v;
      v.symbol = n.symbol;
      v.substance = n.substance;
      v.from_cut = from_cut;
      out.push_back(std::move(v));
    }
    InterfaceVariable& v = out[it->second];
    if (std::find(v.positions.begin(), v.positions.end(), n.pos) == v.positions.end()) v.positions.push_back(n.pos);
    v.paths.insert(n.path);
  };
  for (NodeIndex i : by_rank(cut_nodes)) add(i, true);
  std::vector<NodeIndex> external;
  for (NodeIndex i : retained) {
    const VdgNode& n = vdg.nodes[i];
    if (n.role != NodeRole::Def && n.entry_reached && model.symbol(n.symbol).is_shared()) external.push_back(i);
  }
  for (NodeIndex i : by_rank(external)) add(i, false);
  for (auto& v : out) std::sort(v.positions.begin(), v.positions.end());
  return out;
}

CutResult apply_cuts(const DepTree& tree, const Vdg& vdg, const SourceModel& model,
                     const std::vector<CutSelector>& cuts) {
  CutResult r;
  std::set<NodeIndex> matched;
  for (const auto& c : cuts) {
    auto m = match_cut(vdg, model, c);
    bool hit = false;
    for (NodeIndex n : m) {
      matched.insert(n);
      for (const auto& t : tree.nodes) hit = hit || t.vdg_node == n;
    }
    if (!hit) r.warnings.push_back("cut " + c.describe() + " matches no node of the tree");
  }
  DepTree expanded = tree.folded ? unfold(tree) : tree;
  r.tree = prune(expanded, [&](const TreeNode& t) { return !matched.count(t.vdg_node); }, Marker::BoundaryCut);
  std::vector<NodeIndex> cut_nodes, retained;
  for (const auto& t : r.tree.nodes) {
    if (t.marker == Marker::BoundaryCut) cut_nodes.push_back(t.vdg_node);
    else retained.push_back(t.vdg_node);
  }
  r.interfaces = compute_interfaces(vdg, model, cut_nodes, retained);
  if (tree.folded) r.tree = fold_redundant(r.tree);
  return r;
}

}  // namespace vdgslice

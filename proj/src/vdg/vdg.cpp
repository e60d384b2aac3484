#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "vdgslice/vdg.hpp"

namespace vdgslice {

char role_letter(NodeRole r) {
  switch (r) {
    case NodeRole::Def: return 'd';
    case NodeRole::Use: return 'u';
    case NodeRole::CondUse: return 'c';
  }
  return '?';
}

char edge_letter(EdgeKind k) {
  switch (k) {
    case EdgeKind::Data: return 'd';
    case EdgeKind::Assignment: return 'a';
    case EdgeKind::Control: return 'c';
  }
  return '?';
}

std::string_view edge_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Data: return "data";
    case EdgeKind::Assignment: return "assignment";
    case EdgeKind::Control: return "control";
  }
  return "?";
}

std::string format_node_id(const SourceModel& model, const TraceTable& traces, const VdgNode& n) {
  std::string out = model.files.at(n.pos.file).path;
  out += ':' + std::to_string(n.pos.line) + ':' + std::to_string(n.pos.column) + ':';
  out += model.symbol(n.symbol).name;
  out += ":p" + std::to_string(n.path) + ":t" + traces.hash(model, n.trace);
  out += ":o" + std::to_string(n.occurrence) + ':' + role_letter(n.role);
  return out;
}

void Vdg::finalize(const SourceModel& model) {
  in_.assign(nodes.size(), {});
  out_.assign(nodes.size(), {});
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    out_[edges[e].from].push_back(e);
    in_[edges[e].to].push_back(e);
  }
  by_id_.clear();
  by_id_.reserve(nodes.size());
  std::vector<std::string> hashes(traces.size());
  for (TraceId t = 0; t < traces.size(); ++t) hashes[t] = traces.hash(model, t);
  for (NodeIndex i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) nodes[i].id = format_node_id(model, traces, nodes[i]);
    by_id_.emplace(nodes[i].id, i);
  }
  std::vector<NodeIndex> order(nodes.size());
  std::iota(order.begin(), order.end(), 0u);
  auto key = [&](NodeIndex i) {
    const VdgNode& n = nodes[i];
    return std::make_tuple(std::string_view(model.files.at(n.pos.file).path), n.pos.line, n.pos.column,
                           std::string_view(model.symbol(n.symbol).name), n.path, std::string_view(hashes[n.trace]),
                           n.occurrence, role_letter(n.role));
  };
  std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return key(a) < key(b); });
  rank_.assign(nodes.size(), 0);
  for (std::uint32_t r = 0; r < order.size(); ++r) rank_[order[r]] = r;
}

std::optional<NodeIndex> Vdg::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void connect_cross_path(Vdg& vdg, const SourceModel& model) {
  // substance -> path -> def nodes
  std::map<std::uint32_t, std::map<std::uint32_t, std::vector<NodeIndex>>> defs;
  for (NodeIndex i = 0; i < vdg.nodes.size(); ++i) {
    const VdgNode& n = vdg.nodes[i];
    if (n.role == NodeRole::Def && model.symbol(n.symbol).is_shared()) defs[n.substance][n.path].push_back(i);
  }
  std::set<std::pair<NodeIndex, NodeIndex>> existing;
  for (const auto& e : vdg.edges)
    if (e.cross_path) existing.emplace(e.from, e.to);
  for (NodeIndex i = 0; i < vdg.nodes.size(); ++i) {
    const VdgNode& n = vdg.nodes[i];
    if (n.role == NodeRole::Def || !model.symbol(n.symbol).is_shared()) continue;
    auto it = defs.find(n.substance);
    if (it == defs.end()) continue;
    for (const auto& [path, list] : it->second) {
      if (path == n.path) continue;
      for (NodeIndex d : list)
        if (existing.emplace(d, i).second) vdg.edges.push_back(VdgEdge{d, i, EdgeKind::Data, true});
    }
  }
  vdg.finalize(model);
}

std::vector<NodeIndex> find_nodes(const Vdg& vdg, const SourceModel& model, std::string_view name,
                                  const NodeFilter& filter) {
  std::optional<FileId> file;
  if (filter.file) {
    file = model.file_id(*filter.file);
    if (!file) return {};
  }
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < vdg.nodes.size(); ++i) {
    const VdgNode& n = vdg.nodes[i];
    if (model.symbol(n.symbol).name != name) continue;
    if (file && n.pos.file != *file) continue;
    if (filter.line && n.pos.line != *filter.line) continue;
    if (filter.path && n.path != *filter.path) continue;
    out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [&](NodeIndex a, NodeIndex b) { return vdg.id_less(a, b); });
  return out;
}

}  // namespace vdgslice

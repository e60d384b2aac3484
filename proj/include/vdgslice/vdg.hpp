#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vdgslice/cfg.hpp"

namespace vdgslice {

enum class NodeRole { Def, Use, CondUse };
enum class EdgeKind { Data, Assignment, Control };

char role_letter(NodeRole r);
char edge_letter(EdgeKind k);
std::string_view edge_name(EdgeKind k);

using NodeIndex = std::uint32_t;
inline constexpr NodeIndex kNoNode = 0xffffffffu;

struct VdgNode {
  SymbolId symbol = kNoSymbol;
  std::uint32_t substance = 0;
  CodePosition pos;
  std::uint32_t path = 0;
  TraceId trace = 0;
  std::uint32_t occurrence = 0;
  NodeRole role = NodeRole::Use;
  // Statement the node is executed by; call bindings belong to the call site.
  StmtId stmt = kNoStmt;
  // Function whose text contains `pos`.
  SymbolId function = kNoSymbol;
  // A use of a shared variable that can read the value it held at path entry.
  bool entry_reached = false;
  std::string id;
};

struct VdgEdge {
  NodeIndex from = 0;
  NodeIndex to = 0;
  EdgeKind kind = EdgeKind::Data;
  bool cross_path = false;
};

struct TraceInfo {
  TraceId parent = 0;
  StmtId call_stmt = kNoStmt;  // statement holding the call that opened this trace
  SymbolId callee = kNoSymbol;
};

class Vdg {
 public:
  std::vector<VdgNode> nodes;
  std::vector<VdgEdge> edges;
  TraceTable traces;
  std::vector<TraceInfo> trace_info;  // indexed by TraceId
  std::vector<SymbolId> entries;      // by path id
  std::vector<std::string> warnings;

  /// Rebuilds adjacency, the id index and the id ordering. Call after edits.
  void finalize(const SourceModel& model);

  const std::vector<std::uint32_t>& in_edges(NodeIndex n) const { return in_.at(n); }
  const std::vector<std::uint32_t>& out_edges(NodeIndex n) const { return out_.at(n); }
  std::optional<NodeIndex> find(const std::string& id) const;
  /// Position of the node in component-wise id order.
  std::uint32_t rank(NodeIndex n) const { return rank_.at(n); }
  bool id_less(NodeIndex a, NodeIndex b) const { return rank_[a] < rank_[b]; }

 private:
  std::vector<std::vector<std::uint32_t>> in_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::uint32_t> rank_;
  std::unordered_map<std::string, NodeIndex> by_id_;
};

std::string format_node_id(const SourceModel& model, const TraceTable& traces, const VdgNode& n);

/// Builds every path and then the cross-path edges.
Vdg build_vdg(const SourceModel& model, const ExecutionPaths& paths);

/// Adds data edges from defs of shared variables in one path to their uses
/// in every other path. Idempotent.
void connect_cross_path(Vdg& vdg, const SourceModel& model);

struct NodeFilter {
  std::optional<std::string> file;
  std::optional<std::uint32_t> line;
  std::optional<std::uint32_t> path;
};

/// Nodes of variable `name` passing the filter, in id order.
std::vector<NodeIndex> find_nodes(const Vdg& vdg, const SourceModel& model, std::string_view name,
                                  const NodeFilter& filter = {});

}  // namespace vdgslice

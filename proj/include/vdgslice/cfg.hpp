#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <set>
#include <string>
#include <vector>

#include "vdgslice/source_model.hpp"

namespace vdgslice {

enum class CfgNodeKind { Entry, Exit, Statement, Branch, LoopHead, ForInit, ForStep, Return, Jump };
enum class EdgeLabel { Seq, True, False, Back };

/// Which part of a statement a CFG node stands for.
enum class StmtPart { Main, Init, Step };

struct CfgNode {
  std::uint32_t id = 0;
  CfgNodeKind kind = CfgNodeKind::Statement;
  StmtId stmt = kNoStmt;
  StmtPart part = StmtPart::Main;
  CodePosition pos;
  std::set<SymbolId> defs;
  std::set<SymbolId> uses;
};

struct CfgEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  EdgeLabel label = EdgeLabel::Seq;

  auto operator<=>(const CfgEdge&) const = default;
};

struct Cfg {
  SymbolId function = kNoSymbol;
  std::vector<CfgNode> nodes;  // [0] entry, [1] exit
  std::vector<CfgEdge> edges;
  std::vector<std::string> warnings;

  static constexpr std::uint32_t kEntry = 0;
  static constexpr std::uint32_t kExit = 1;

  std::size_t statement_count() const { return nodes.size() - 2; }
  std::vector<std::uint32_t> successors(std::uint32_t n) const;
  std::vector<CfgEdge> out_edges(std::uint32_t n) const;
  const CfgNode* find(StmtId stmt, StmtPart part = StmtPart::Main) const;
};

Cfg build_cfg(const SourceModel& model, const FunctionDef& fn);

/// Plain-text adjacency listing for debugging.
std::string dump_cfg(const SourceModel& model, const Cfg& cfg);

struct CallSite {
  SymbolId caller = kNoSymbol;
  SymbolId callee = kNoSymbol;
  CodePosition pos;
};

struct CallGraph {
  std::vector<SymbolId> nodes;  // functions, declaration order
  std::vector<CallSite> edges;  // direct calls only, source order

  std::vector<SymbolId> callees(SymbolId caller) const;
};

CallGraph build_call_graph(const SourceModel& model);

/// Direct calls evaluated by one CFG node, innermost first.
void collect_node_calls(const SourceModel& model, const CfgNode& node, std::vector<CallSite>& out);

struct StackFrame {
  CodePosition call_site;
  SymbolId callee = kNoSymbol;

  auto operator<=>(const StackFrame&) const = default;
};

using StackTrace = std::vector<StackFrame>;
using TraceId = std::uint32_t;

/// Interns stack traces; id 0 is the empty trace.
class TraceTable {
 public:
  TraceTable();
  TraceId intern(const StackTrace& trace);
  TraceId push(TraceId parent, const StackFrame& frame);
  const StackTrace& trace(TraceId id) const { return traces_.at(id); }
  std::size_t size() const { return traces_.size(); }
  /// Lowercase 8-hex-digit FNV-1a of the call-site positions joined by '>'.
  std::string hash(const SourceModel& model, TraceId id) const;

 private:
  std::vector<StackTrace> traces_;
  std::map<StackTrace, TraceId> index_;
};

struct ExpandedNode {
  TraceId trace = 0;
  SymbolId function = kNoSymbol;
  std::uint32_t cfg_node = 0;
};

struct ExecutionPath {
  std::uint32_t path_id = 0;
  SymbolId entry = kNoSymbol;
  // Statement nodes of the entry with every direct call expanded inline,
  // depth-first in source order.
  std::vector<ExpandedNode> expansion;
};

struct ExecutionPaths {
  std::vector<ExecutionPath> paths;
  std::map<SymbolId, Cfg> cfgs;
  TraceTable traces;
};

/// Throws UnknownEntry or RecursionDetected.
ExecutionPaths enumerate_execution_paths(const SourceModel& model, const std::vector<std::string>& entries);

std::uint32_t fnv1a32(std::string_view data);
std::uint64_t fnv1a64(std::string_view data);

}  // namespace vdgslice

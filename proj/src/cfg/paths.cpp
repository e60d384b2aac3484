#include <cstdio>
#include <functional>

#include "vdgslice/cfg.hpp"
#include "vdgslice/errors.hpp"

namespace vdgslice {

std::uint32_t fnv1a32(std::string_view data) {
  std::uint32_t h = 0x811c9dc5u;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x01000193u;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

TraceTable::TraceTable() { intern({}); }

TraceId TraceTable::intern(const StackTrace& trace) {
  auto [it, inserted] = index_.emplace(trace, static_cast<TraceId>(traces_.size()));
  if (inserted) traces_.push_back(trace);
  return it->second;
}

TraceId TraceTable::push(TraceId parent, const StackFrame& frame) {
  StackTrace t = traces_.at(parent);
  t.push_back(frame);
  return intern(t);
}

std::string TraceTable::hash(const SourceModel& model, TraceId id) const {
  std::string joined;
  for (const auto& f : traces_.at(id)) {
    if (!joined.empty()) joined += '>';
    joined += model.format(f.call_site);
  }
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", fnv1a32(joined));
  return buf;
}

namespace {

void check_recursion(const SourceModel& model, const CallGraph& graph, SymbolId entry) {
  std::map<SymbolId, int> state;  // 1 on stack, 2 done
  std::vector<SymbolId> stack;
  std::function<void(SymbolId)> visit = [&](SymbolId f) {
    state[f] = 1;
    stack.push_back(f);
    for (SymbolId callee : graph.callees(f)) {
      if (!model.function_of(callee)) continue;
      if (state[callee] == 1) {
        std::string cycle;
        bool on = false;
        for (SymbolId s : stack) {
          if (s == callee) on = true;
          if (on) cycle += model.symbol(s).name + " -> ";
        }
        throw RecursionDetected(cycle + model.symbol(callee).name);
      }
      if (state[callee] == 0) visit(callee);
    }
    stack.pop_back();
    state[f] = 2;
  };
  visit(entry);
}

}  // namespace

ExecutionPaths enumerate_execution_paths(const SourceModel& model, const std::vector<std::string>& entries) {
  ExecutionPaths result;
  std::vector<SymbolId> entry_syms;
  for (const auto& name : entries) {
    const FunctionDef* fn = model.find_function(name);
    if (!fn) throw UnknownEntry("'" + name + "' is not a function defined in the sources");
    entry_syms.push_back(fn->symbol);
  }
  CallGraph graph = build_call_graph(model);
  for (SymbolId e : entry_syms) check_recursion(model, graph, e);
  for (const auto& f : model.functions) result.cfgs.emplace(f.symbol, build_cfg(model, f));

  std::function<void(SymbolId, TraceId, ExecutionPath&)> expand = [&](SymbolId fn, TraceId trace, ExecutionPath& path) {
    const Cfg& cfg = result.cfgs.at(fn);
    for (const auto& node : cfg.nodes) {
      if (node.kind == CfgNodeKind::Entry || node.kind == CfgNodeKind::Exit) continue;
      std::vector<CallSite> calls;
      collect_node_calls(model, node, calls);
      for (const auto& c : calls) {
        if (!model.function_of(c.callee)) continue;
        expand(c.callee, result.traces.push(trace, StackFrame{c.pos, c.callee}), path);
      }
      path.expansion.push_back(ExpandedNode{trace, fn, node.id});
    }
  };

  for (std::size_t k = 0; k < entry_syms.size(); ++k) {
    ExecutionPath path;
    path.path_id = static_cast<std::uint32_t>(k);
    path.entry = entry_syms[k];
    expand(entry_syms[k], 0, path);
    result.paths.push_back(std::move(path));
  }
  return result;
}

}  // namespace vdgslice

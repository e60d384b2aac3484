#include <algorithm>
#include <deque>

#include "vdgslice/errors.hpp"
#include "vdgslice/slicer.hpp"

namespace vdgslice {
namespace {

void close_over_control(std::set<StmtId>& stmts, const SourceModel& model) {
  std::vector<StmtId> work(stmts.begin(), stmts.end());
  for (StmtId s : work) {
    for (StmtId p = model.stmt_info(s).parent; p != kNoStmt; p = model.stmt_info(p).parent) {
      if (model.stmt_info(p).stmt->kind == StmtKind::Block) continue;
      if (!stmts.insert(p).second) break;
    }
  }
}

void collect_expr(const SourceModel& model, const Expr& e, std::set<SymbolId>& vars, std::set<SymbolId>& calls) {
  if (e.kind == ExprKind::Name) {
    if (model.symbol(e.symbol).kind == SymbolKind::Function) calls.insert(e.symbol);
    else vars.insert(e.symbol);
  }
  if (e.kind == ExprKind::Call && e.symbol != kNoSymbol) calls.insert(e.symbol);
  for (const auto& op : e.operands) collect_expr(model, *op, vars, calls);
}

void collect_stmt_head(const SourceModel& model, const Stmt& s, std::set<SymbolId>& vars, std::set<SymbolId>& calls) {
  for (const Expr* e : {s.target.get(), s.value.get(), s.cond.get()})
    if (e) collect_expr(model, *e, vars, calls);
  if (s.kind == StmtKind::Decl) vars.insert(s.decl_symbol);
  if (s.kind == StmtKind::For) {
    if (s.init) collect_stmt_head(model, *s.init, vars, calls);
    if (s.step) collect_stmt_head(model, *s.step, vars, calls);
  }
}

void finish(Slice& slice, const SourceModel& model) {
  close_over_control(slice.statements, model);
  slice.declarations.clear();
  slice.functions.clear();
  std::set<SymbolId> calls;
  for (StmtId id : slice.statements) {
    const StmtInfo& info = model.stmt_info(id);
    slice.functions.insert(info.function);
    collect_stmt_head(model, *info.stmt, slice.declarations, calls);
  }
  for (SymbolId f : calls) slice.functions.insert(f);
  std::vector<SymbolId> pointers(slice.declarations.begin(), slice.declarations.end());
  for (SymbolId p : pointers)
    if (auto t = model.pointer_map.target_of(p)) slice.declarations.insert(*t);
  for (const auto& v : slice.interfaces) slice.declarations.insert(v.symbol);
}

}  // namespace

Slice slice_from_nodes(const Vdg& vdg, const SourceModel& model, std::vector<NodeIndex> retained,
                       std::vector<NodeIndex> cut_nodes) {
  Slice slice;
  auto by_rank = [&](std::vector<NodeIndex>& v) {
    std::sort(v.begin(), v.end(), [&](NodeIndex a, NodeIndex b) { return vdg.id_less(a, b); });
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  by_rank(retained);
  by_rank(cut_nodes);
  std::set<TraceId> traces;
  for (NodeIndex n : retained) {
    const VdgNode& v = vdg.nodes[n];
    if (v.stmt != kNoStmt) slice.statements.insert(v.stmt);
    traces.insert(v.trace);
  }
  std::set<TraceId> done;
  for (TraceId t : traces) {
    for (; t != 0 && done.insert(t).second; t = vdg.trace_info[t].parent) {
      if (vdg.trace_info[t].call_stmt != kNoStmt) slice.statements.insert(vdg.trace_info[t].call_stmt);
    }
  }
  slice.interfaces = compute_interfaces(vdg, model, cut_nodes, retained);
  slice.nodes = std::move(retained);
  slice.cut_nodes = std::move(cut_nodes);
  finish(slice, model);
  return slice;
}

Slice compute_slice(const Vdg& vdg, const SourceModel& model, const SlicingCriteria& criteria) {
  std::vector<bool> is_cut(vdg.nodes.size(), false);
  std::vector<std::string> warnings;
  for (const auto& c : criteria.cuts) {
    auto m = match_cut(vdg, model, c);
    if (m.empty()) warnings.push_back("cut " + c.describe() + " matches no node");
    for (NodeIndex n : m) is_cut[n] = true;
  }
  std::vector<bool> seen[2] = {std::vector<bool>(vdg.nodes.size(), false), std::vector<bool>(vdg.nodes.size(), false)};
  std::vector<NodeIndex> retained, cut_nodes;
  for (const auto& root : criteria.roots) {
    int d = root.direction == Direction::Goal ? 0 : 1;
    std::deque<NodeIndex> queue;
    for (NodeIndex n : resolve_root(vdg, model, root)) {
      if (!seen[d][n]) {
        seen[d][n] = true;
        queue.push_back(n);
      }
    }
    while (!queue.empty()) {
      NodeIndex n = queue.front();
      queue.pop_front();
      if (is_cut[n]) {
        cut_nodes.push_back(n);
        continue;
      }
      retained.push_back(n);
      const auto& edges = d == 0 ? vdg.in_edges(n) : vdg.out_edges(n);
      for (std::uint32_t e : edges) {
        NodeIndex m = d == 0 ? vdg.edges[e].from : vdg.edges[e].to;
        if (!seen[d][m]) {
          seen[d][m] = true;
          queue.push_back(m);
        }
      }
    }
  }
  Slice slice = slice_from_nodes(vdg, model, std::move(retained), std::move(cut_nodes));
  slice.warnings = std::move(warnings);
  return slice;
}

Slice pickup_statements(const Slice& slice, const SourceModel& model, const std::vector<CodePosition>& requests) {
  Slice out = slice;
  bool changed = false;
  for (const auto& pos : requests) {
    auto id = model.stmt_at(pos);
    if (!id) throw NotOnRetainedPath(model.format(pos) + ": no statement starts here");
    if (!out.functions.count(model.stmt_info(*id).function))
      throw NotOnRetainedPath(model.format(pos) + ": statement is in a function outside the slice");
    if (out.statements.count(*id)) continue;
    out.statements.insert(*id);
    out.picked_up.insert(*id);
    changed = true;
  }
  if (changed) finish(out, model);
  return out;
}

std::string_view line_class_name(LineClass c) {
  switch (c) {
    case LineClass::OutOfScope: return "out-of-scope";
    case LineClass::InSlice: return "in-slice";
    case LineClass::PickedUp: return "picked-up";
    case LineClass::Interface: return "interface";
  }
  return "?";
}

ColorClassification color_report(const Slice& slice, const SourceModel& model) {
  ColorClassification c;
  for (const auto& f : model.files) c.lines.emplace_back(f.line_count, LineClass::OutOfScope);
  auto mark = [&](const CodePosition& pos, LineClass cls) {
    if (pos.file >= c.lines.size() || pos.line == 0 || pos.line > c.lines[pos.file].size()) return;
    LineClass& slot = c.lines[pos.file][pos.line - 1];
    if (static_cast<int>(cls) > static_cast<int>(slot)) slot = cls;
  };
  for (StmtId s : slice.statements) mark(model.stmt_info(s).stmt->pos, LineClass::InSlice);
  for (SymbolId d : slice.declarations) mark(model.symbol(d).decl_position, LineClass::InSlice);
  for (SymbolId f : slice.functions)
    if (const FunctionDef* fn = model.function_of(f)) mark(fn->name_pos, LineClass::InSlice);
  for (StmtId s : slice.picked_up) mark(model.stmt_info(s).stmt->pos, LineClass::PickedUp);
  for (const auto& v : slice.interfaces) mark(model.symbol(v.symbol).decl_position, LineClass::Interface);
  return c;
}

std::string render_color_annotations(const ColorClassification& colors, const SourceModel& model) {
  std::string out;
  for (FileId f = 0; f < colors.lines.size(); ++f) {
    for (std::size_t l = 0; l < colors.lines[f].size(); ++l) {
      out += model.files[f].path + ":" + std::to_string(l + 1) + ":";
      out += line_class_name(colors.lines[f][l]);
      out += '\n';
    }
  }
  return out;
}

std::vector<std::uint32_t> retained_lines(const Slice& slice, const SourceModel& model, FileId file) {
  std::set<std::uint32_t> lines;
  for (StmtId s : slice.statements) {
    const CodePosition& p = model.stmt_info(s).stmt->pos;
    if (p.file == file) lines.insert(p.line);
  }
  return {lines.begin(), lines.end()};
}

std::string render_slice_report(const Slice& slice, const SourceModel& model) {
  std::string out;
  for (FileId f = 0; f < model.files.size(); ++f) {
    out += model.files[f].path + ":";
    for (std::uint32_t l : retained_lines(slice, model, f)) out += " " + std::to_string(l);
    out += '\n';
  }
  return out;
}

std::string render_interface_table(const Slice& slice, const SourceModel& model) {
  std::string out;
  for (const auto& v : slice.interfaces) {
    const Symbol& s = model.symbol(v.symbol);
    out += s.name + " " + s.type.spelling() + (s.type.pointer ? " *" : "");
    if (s.type.array_size) out += "[" + std::to_string(*s.type.array_size) + "]";
    out += v.from_cut ? " cut" : " input";
    out += " paths=";
    bool first = true;
    for (std::uint32_t p : v.paths) {
      out += (first ? "" : ",") + std::to_string(p);
      first = false;
    }
    for (const auto& pos : v.positions) out += " " + model.format(pos);
    out += '\n';
  }
  return out;
}

std::string sliced_source(const Slice& slice, const SourceModel& model) {
  PrintFilter filter;
  filter.keep_stmt = [&](const Stmt& s) { return slice.statements.count(s.id) > 0; };
  filter.declare = [&](SymbolId s) { return slice.declarations.count(s) > 0; };
  filter.keep_function = [&](SymbolId f) { return slice.functions.count(f) > 0; };
  return print_program(model, &filter);
}

}  // namespace vdgslice

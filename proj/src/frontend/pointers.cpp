#include <set>

#include "vdgslice/frontend.hpp"

namespace vdgslice {
namespace {

struct PointerFacts {
  std::set<SymbolId> targets;
  bool unknown = false;
};

enum class RhsClass { Target, Null, Other };

RhsClass classify(const SourceModel& model, const Expr& e, SymbolId& target) {
  switch (e.kind) {
    case ExprKind::Cast: return classify(model, *e.operands[0], target);
    case ExprKind::IntLiteral: return e.int_value == 0 ? RhsClass::Null : RhsClass::Other;
    case ExprKind::AddressOf: {
      const Expr& inner = *e.operands[0];
      if (inner.kind == ExprKind::Name) {
        target = inner.symbol;
        return RhsClass::Target;
      }
      if (inner.kind == ExprKind::Index && inner.operands[0]->kind == ExprKind::Name) {
        target = inner.operands[0]->symbol;
        return RhsClass::Target;
      }
      return RhsClass::Other;
    }
    case ExprKind::Name:
      if (model.symbol(e.symbol).type.is_array()) {
        target = e.symbol;
        return RhsClass::Target;
      }
      return RhsClass::Other;
    default: return RhsClass::Other;
  }
}

bool is_data_pointer(const Symbol& s) {
  return s.type.pointer && !s.type.function_pointer && s.kind != SymbolKind::Function;
}

class Collector {
 public:
  explicit Collector(const SourceModel& model) : model_(model) {}

  void record(SymbolId pointer, const Expr& rhs, bool in_loop) {
    if (!is_data_pointer(model_.symbol(pointer))) return;
    PointerFacts& f = facts_[pointer];
    SymbolId target = kNoSymbol;
    switch (classify(model_, rhs, target)) {
      case RhsClass::Null: return;
      case RhsClass::Other: f.unknown = true; return;
      case RhsClass::Target:
        // Address assignments driven by loop control are ignored.
        if (in_loop) f.unknown = true;
        else f.targets.insert(target);
        return;
    }
  }

  void visit_expr(const Expr& e, bool in_loop) {
    if (e.kind == ExprKind::Call && e.symbol != kNoSymbol) {
      if (const FunctionDef* callee = model_.function_of(e.symbol)) {
        for (std::size_t k = 0; k + 1 < e.operands.size() && k < callee->params.size(); ++k)
          record(callee->params[k], *e.operands[k + 1], in_loop);
      }
    }
    for (const auto& op : e.operands) visit_expr(*op, in_loop);
  }

  void visit_stmt(const Stmt& s, int loop_depth) {
    bool in_loop = loop_depth > 0;
    switch (s.kind) {
      case StmtKind::Assign:
        if (s.target->kind == ExprKind::Name) record(s.target->symbol, *s.value, in_loop);
        break;
      case StmtKind::Decl:
        if (s.value) record(s.decl_symbol, *s.value, in_loop && !s.static_decl);
        break;
      default: break;
    }
    if (s.target) visit_expr(*s.target, in_loop);
    if (s.value) visit_expr(*s.value, in_loop);
    if (s.cond) visit_expr(*s.cond, loop_depth > 0 || s.kind == StmtKind::While || s.kind == StmtKind::DoWhile ||
                                        s.kind == StmtKind::For);
    bool is_loop = s.kind == StmtKind::While || s.kind == StmtKind::DoWhile || s.kind == StmtKind::For;
    for (const auto& c : s.children) visit_stmt(*c, loop_depth);
    if (s.init) visit_stmt(*s.init, loop_depth);
    if (s.step) visit_stmt(*s.step, loop_depth + 1);
    if (s.then_branch) visit_stmt(*s.then_branch, loop_depth);
    if (s.else_branch) visit_stmt(*s.else_branch, loop_depth);
    if (s.body) visit_stmt(*s.body, loop_depth + (is_loop ? 1 : 0));
  }

  PointerMap finish() const {
    PointerMap map;
    for (SymbolId id = 0; id < model_.symbols.size(); ++id) {
      if (!is_data_pointer(model_.symbol(id))) continue;
      auto it = facts_.find(id);
      if (it == facts_.end() || it->second.unknown || it->second.targets.size() != 1) {
        map.targets[id] = std::nullopt;
      } else {
        map.targets[id] = *it->second.targets.begin();
      }
    }
    return map;
  }

 private:
  const SourceModel& model_;
  std::map<SymbolId, PointerFacts> facts_;
};

}  // namespace

PointerMap resolve_pointer_targets(const SourceModel& model) {
  Collector c(model);
  for (const auto& g : model.globals) {
    if (g.init) c.record(g.symbol, *g.init, false);
  }
  for (const auto& f : model.functions) c.visit_stmt(*f.body, 0);
  return c.finish();
}

}  // namespace vdgslice

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

#include "vdgslice/cfg.hpp"

namespace vdgslice {
namespace {

struct Pending {
  std::uint32_t from;
  EdgeLabel label;
};

struct LoopFrame {
  std::vector<Pending> breaks;
  std::vector<Pending> continues;
};

bool is_constant_true(const Expr* cond) {
  if (!cond) return true;
  return cond->kind == ExprKind::IntLiteral && cond->int_value != 0;
}

class AccessScan {
 public:
  AccessScan(const SourceModel& model, CfgNode& node, std::vector<std::string>& warnings)
      : model_(model), node_(node), warnings_(warnings) {}

  void use(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
        if (model_.symbol(e.symbol).kind != SymbolKind::Function) node_.uses.insert(e.symbol);
        return;
      case ExprKind::AddressOf: {
        const Expr& inner = *e.operands[0];
        if (inner.kind == ExprKind::Index) use(*inner.operands[1]);
        return;
      }
      case ExprKind::Deref: {
        const Expr& ptr = *e.operands[0];
        use(ptr);
        if (ptr.kind == ExprKind::Name) {
          if (auto t = model_.pointer_map.target_of(ptr.symbol)) node_.uses.insert(*t);
        }
        return;
      }
      case ExprKind::Index: {
        const Expr& base = *e.operands[0];
        node_.uses.insert(base.symbol);
        if (model_.symbol(base.symbol).type.pointer) {
          if (auto t = model_.pointer_map.target_of(base.symbol)) node_.uses.insert(*t);
        }
        use(*e.operands[1]);
        return;
      }
      case ExprKind::Call:
        for (std::size_t k = 0; k < e.operands.size(); ++k) use(*e.operands[k]);
        return;
      default:
        for (const auto& op : e.operands) use(*op);
    }
  }

  void def(const Expr& target) {
    switch (target.kind) {
      case ExprKind::Name: node_.defs.insert(target.symbol); return;
      case ExprKind::Index: {
        const Expr& base = *target.operands[0];
        use(*target.operands[1]);
        if (model_.symbol(base.symbol).type.pointer) {
          node_.uses.insert(base.symbol);
          def_through(base);
        } else {
          node_.defs.insert(base.symbol);
        }
        return;
      }
      case ExprKind::Deref: {
        const Expr& ptr = *target.operands[0];
        use(ptr);
        if (ptr.kind == ExprKind::Name) def_through(ptr);
        else warnings_.push_back(model_.format(target.pos) + ": write through a computed pointer ignored");
        return;
      }
      default: return;
    }
  }

 private:
  void def_through(const Expr& ptr) {
    if (auto t = model_.pointer_map.target_of(ptr.symbol)) {
      node_.defs.insert(*t);
    } else {
      warnings_.push_back(model_.format(ptr.pos) + ": write through unresolved pointer '" +
                          model_.symbol(ptr.symbol).name + "' ignored");
    }
  }

  const SourceModel& model_;
  CfgNode& node_;
  std::vector<std::string>& warnings_;
};

class CfgBuilder {
 public:
  CfgBuilder(const SourceModel& model, Cfg& cfg) : model_(model), cfg_(cfg) {}

  void run(const FunctionDef& fn) {
    cfg_.function = fn.symbol;
    add_node(CfgNodeKind::Entry, kNoStmt, StmtPart::Main, fn.name_pos);
    add_node(CfgNodeKind::Exit, kNoStmt, StmtPart::Main, fn.end_pos);
    auto out = build(*fn.body, {Pending{Cfg::kEntry, EdgeLabel::Seq}});
    connect(out, Cfg::kExit);
    std::sort(cfg_.edges.begin(), cfg_.edges.end());
    cfg_.edges.erase(std::unique(cfg_.edges.begin(), cfg_.edges.end()), cfg_.edges.end());
  }

 private:
  std::uint32_t add_node(CfgNodeKind kind, StmtId stmt, StmtPart part, CodePosition pos) {
    CfgNode n;
    n.id = static_cast<std::uint32_t>(cfg_.nodes.size());
    n.kind = kind;
    n.stmt = stmt;
    n.part = part;
    n.pos = pos;
    cfg_.nodes.push_back(std::move(n));
    return cfg_.nodes.back().id;
  }

  void connect(const std::vector<Pending>& from, std::uint32_t to, std::optional<EdgeLabel> force = std::nullopt) {
    for (const auto& p : from) cfg_.edges.push_back(CfgEdge{p.from, to, force ? *force : p.label});
  }

  std::uint32_t simple(const Stmt& s, StmtPart part, CfgNodeKind kind, const Stmt& owner) {
    std::uint32_t n = add_node(kind, owner.id, part, s.pos);
    AccessScan scan(model_, cfg_.nodes[n], cfg_.warnings);
    if (s.kind == StmtKind::Assign) {
      scan.use(*s.value);
      scan.def(*s.target);
    } else if (s.kind == StmtKind::Decl) {
      if (s.value && !s.static_decl) {
        scan.use(*s.value);
        cfg_.nodes[n].defs.insert(s.decl_symbol);
      }
    } else if (s.value) {
      scan.use(*s.value);
    }
    return n;
  }

  std::uint32_t condition(const Stmt& s, CfgNodeKind kind) {
    std::uint32_t n = add_node(kind, s.id, StmtPart::Main, s.pos);
    if (s.cond) AccessScan(model_, cfg_.nodes[n], cfg_.warnings).use(*s.cond);
    return n;
  }

  std::vector<Pending> build(const Stmt& s, std::vector<Pending> in) {
    switch (s.kind) {
      case StmtKind::Block:
        for (const auto& c : s.children) in = build(*c, std::move(in));
        return in;
      case StmtKind::Assign:
      case StmtKind::ExprStmt:
      case StmtKind::Decl:
      case StmtKind::Empty: {
        std::uint32_t n = simple(s, StmtPart::Main, CfgNodeKind::Statement, s);
        connect(in, n);
        return {Pending{n, EdgeLabel::Seq}};
      }
      case StmtKind::Return: {
        std::uint32_t n = simple(s, StmtPart::Main, CfgNodeKind::Return, s);
        connect(in, n);
        cfg_.edges.push_back(CfgEdge{n, Cfg::kExit, EdgeLabel::Seq});
        return {};
      }
      case StmtKind::Break: {
        std::uint32_t n = add_node(CfgNodeKind::Jump, s.id, StmtPart::Main, s.pos);
        connect(in, n);
        loops_.back().breaks.push_back(Pending{n, EdgeLabel::Seq});
        return {};
      }
      case StmtKind::Continue: {
        std::uint32_t n = add_node(CfgNodeKind::Jump, s.id, StmtPart::Main, s.pos);
        connect(in, n);
        loops_.back().continues.push_back(Pending{n, EdgeLabel::Back});
        return {};
      }
      case StmtKind::If: {
        std::uint32_t b = condition(s, CfgNodeKind::Branch);
        connect(in, b);
        auto out = build(*s.then_branch, {Pending{b, EdgeLabel::True}});
        if (s.else_branch) {
          auto e = build(*s.else_branch, {Pending{b, EdgeLabel::False}});
          out.insert(out.end(), e.begin(), e.end());
        } else {
          out.push_back(Pending{b, EdgeLabel::False});
        }
        return out;
      }
      case StmtKind::While: {
        std::uint32_t h = condition(s, CfgNodeKind::LoopHead);
        connect(in, h);
        loops_.emplace_back();
        auto body = build(*s.body, {Pending{h, EdgeLabel::True}});
        connect(body, h, EdgeLabel::Back);
        LoopFrame frame = std::move(loops_.back());
        loops_.pop_back();
        connect(frame.continues, h, EdgeLabel::Back);
        std::vector<Pending> out = frame.breaks;
        if (!is_constant_true(s.cond.get())) out.push_back(Pending{h, EdgeLabel::False});
        return out;
      }
      case StmtKind::DoWhile: {
        std::uint32_t first = static_cast<std::uint32_t>(cfg_.nodes.size());
        loops_.emplace_back();
        auto body = build(*s.body, std::move(in));
        LoopFrame frame = std::move(loops_.back());
        loops_.pop_back();
        std::uint32_t c = condition(s, CfgNodeKind::LoopHead);
        connect(body, c);
        connect(frame.continues, c, EdgeLabel::Seq);
        // An empty body leaves the condition as its own loop header.
        cfg_.edges.push_back(CfgEdge{c, first, EdgeLabel::Back});
        std::vector<Pending> out = frame.breaks;
        if (!is_constant_true(s.cond.get())) out.push_back(Pending{c, EdgeLabel::False});
        return out;
      }
      case StmtKind::For: {
        if (s.init) {
          std::uint32_t i = simple(*s.init, StmtPart::Init, CfgNodeKind::ForInit, s);
          connect(in, i);
          in = {Pending{i, EdgeLabel::Seq}};
        }
        std::uint32_t h = condition(s, CfgNodeKind::LoopHead);
        connect(in, h);
        loops_.emplace_back();
        auto body = build(*s.body, {Pending{h, EdgeLabel::True}});
        LoopFrame frame = std::move(loops_.back());
        loops_.pop_back();
        if (s.step) {
          std::uint32_t st = simple(*s.step, StmtPart::Step, CfgNodeKind::ForStep, s);
          connect(body, st);
          connect(frame.continues, st, EdgeLabel::Seq);
          cfg_.edges.push_back(CfgEdge{st, h, EdgeLabel::Back});
        } else {
          connect(body, h, EdgeLabel::Back);
          connect(frame.continues, h, EdgeLabel::Back);
        }
        std::vector<Pending> out = frame.breaks;
        if (!is_constant_true(s.cond.get())) out.push_back(Pending{h, EdgeLabel::False});
        return out;
      }
    }
    return in;
  }

  const SourceModel& model_;
  Cfg& cfg_;
  std::vector<LoopFrame> loops_;
};

const char* kind_name(CfgNodeKind k) {
  switch (k) {
    case CfgNodeKind::Entry: return "entry";
    case CfgNodeKind::Exit: return "exit";
    case CfgNodeKind::Statement: return "stmt";
    case CfgNodeKind::Branch: return "branch";
    case CfgNodeKind::LoopHead: return "loop";
    case CfgNodeKind::ForInit: return "for-init";
    case CfgNodeKind::ForStep: return "for-step";
    case CfgNodeKind::Return: return "return";
    case CfgNodeKind::Jump: return "jump";
  }
  return "?";
}

const char* label_name(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::Seq: return "seq";
    case EdgeLabel::True: return "true";
    case EdgeLabel::False: return "false";
    case EdgeLabel::Back: return "back";
  }
  return "?";
}

void collect_calls(const SourceModel& model, const Expr& e, SymbolId caller, std::vector<CallSite>& out) {
  for (const auto& op : e.operands) collect_calls(model, *op, caller, out);
  if (e.kind == ExprKind::Call && e.symbol != kNoSymbol) out.push_back(CallSite{caller, e.symbol, e.pos});
}

void collect_stmt_calls(const SourceModel& model, const Stmt& s, SymbolId caller, std::vector<CallSite>& out) {
  if (s.kind == StmtKind::DoWhile) {
    collect_stmt_calls(model, *s.body, caller, out);
    collect_calls(model, *s.cond, caller, out);
    return;
  }
  if (s.init) collect_stmt_calls(model, *s.init, caller, out);
  for (const Expr* e : {s.value.get(), s.target.get(), s.cond.get()})
    if (e) collect_calls(model, *e, caller, out);
  for (const auto& c : s.children) collect_stmt_calls(model, *c, caller, out);
  for (const Stmt* c : {s.then_branch.get(), s.else_branch.get(), s.body.get(), s.step.get()})
    if (c) collect_stmt_calls(model, *c, caller, out);
}

}  // namespace

std::vector<std::uint32_t> Cfg::successors(std::uint32_t n) const {
  std::vector<std::uint32_t> out;
  for (const auto& e : edges)
    if (e.from == n) out.push_back(e.to);
  return out;
}

std::vector<CfgEdge> Cfg::out_edges(std::uint32_t n) const {
  std::vector<CfgEdge> out;
  for (const auto& e : edges)
    if (e.from == n) out.push_back(e);
  return out;
}

const CfgNode* Cfg::find(StmtId stmt, StmtPart part) const {
  for (const auto& n : nodes)
    if (n.stmt == stmt && n.part == part && n.kind != CfgNodeKind::Entry && n.kind != CfgNodeKind::Exit) return &n;
  return nullptr;
}

Cfg build_cfg(const SourceModel& model, const FunctionDef& fn) {
  Cfg cfg;
  CfgBuilder(model, cfg).run(fn);
  return cfg;
}

std::string dump_cfg(const SourceModel& model, const Cfg& cfg) {
  std::ostringstream out;
  out << "cfg " << model.symbol(cfg.function).name << "\n";
  auto names = [&](const std::set<SymbolId>& s) {
    std::string r;
    for (SymbolId id : s) r += (r.empty() ? "" : ",") + model.symbol(id).name;
    return r;
  };
  for (const auto& n : cfg.nodes) {
    out << "  n" << n.id << " " << kind_name(n.kind);
    if (n.kind != CfgNodeKind::Entry && n.kind != CfgNodeKind::Exit) out << " @" << model.format(n.pos);
    if (!n.defs.empty()) out << " def{" << names(n.defs) << "}";
    if (!n.uses.empty()) out << " use{" << names(n.uses) << "}";
    out << " ->";
    for (const auto& e : cfg.out_edges(n.id)) out << " n" << e.to << "(" << label_name(e.label) << ")";
    out << "\n";
  }
  return out.str();
}

std::vector<SymbolId> CallGraph::callees(SymbolId caller) const {
  std::vector<SymbolId> out;
  for (const auto& e : edges)
    if (e.caller == caller) out.push_back(e.callee);
  return out;
}

CallGraph build_call_graph(const SourceModel& model) {
  CallGraph g;
  for (SymbolId id = 0; id < model.symbols.size(); ++id)
    if (model.symbol(id).kind == SymbolKind::Function) g.nodes.push_back(id);
  for (const auto& f : model.functions) collect_stmt_calls(model, *f.body, f.symbol, g.edges);
  return g;
}

void collect_node_calls(const SourceModel& model, const CfgNode& node, std::vector<CallSite>& out) {
  if (node.stmt == kNoStmt) return;
  const Stmt& s = *model.stmt_info(node.stmt).stmt;
  const Stmt* part = &s;
  if (node.part == StmtPart::Init) part = s.init.get();
  if (node.part == StmtPart::Step) part = s.step.get();
  if (node.part != StmtPart::Main || s.kind == StmtKind::Assign || s.kind == StmtKind::ExprStmt ||
      s.kind == StmtKind::Decl || s.kind == StmtKind::Return) {
    for (const Expr* e : {part->value.get(), part->target.get()})
      if (e) collect_calls(model, *e, model.stmt_info(node.stmt).function, out);
  } else if (s.cond) {
    collect_calls(model, *s.cond, model.stmt_info(node.stmt).function, out);
  }
}

}  // namespace vdgslice

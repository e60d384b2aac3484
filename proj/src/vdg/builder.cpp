#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "vdgslice/vdg.hpp"

namespace vdgslice {
namespace {

constexpr NodeIndex kEntryValue = 0xfffffffeu;

using Key = std::pair<TraceId, std::uint32_t>;  // (instance trace, substance)
using DefSet = std::vector<NodeIndex>;          // sorted, unique

void merge_into(DefSet& into, const DefSet& from) {
  DefSet out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into.swap(out);
}

struct Env {
  bool dead = false;
  std::map<Key, DefSet> defs;

  bool operator==(const Env&) const = default;
};

// Absent shared keys stand for the value held at path entry.
Env join(const Env& a, const Env& b, const std::vector<bool>& shared) {
  if (a.dead) return b;
  if (b.dead) return a;
  Env out;
  auto ia = a.defs.begin();
  auto ib = b.defs.begin();
  auto absent = [&](const Key& k) { return shared[k.second] ? DefSet{kEntryValue} : DefSet{}; };
  while (ia != a.defs.end() || ib != b.defs.end()) {
    if (ib == b.defs.end() || (ia != a.defs.end() && ia->first < ib->first)) {
      DefSet s = ia->second;
      merge_into(s, absent(ia->first));
      out.defs.emplace_hint(out.defs.end(), ia->first, std::move(s));
      ++ia;
    } else if (ia == a.defs.end() || ib->first < ia->first) {
      DefSet s = ib->second;
      merge_into(s, absent(ib->first));
      out.defs.emplace_hint(out.defs.end(), ib->first, std::move(s));
      ++ib;
    } else {
      DefSet s = ia->second;
      merge_into(s, ib->second);
      out.defs.emplace_hint(out.defs.end(), ia->first, std::move(s));
      ++ia;
      ++ib;
    }
  }
  return out;
}

struct NodeKey {
  CodePosition pos;
  TraceId trace;
  std::uint32_t occurrence;
  NodeRole role;
  SymbolId symbol;

  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t v : {std::uint64_t(k.pos.file), std::uint64_t(k.pos.line), std::uint64_t(k.pos.column),
                            std::uint64_t(k.trace), std::uint64_t(k.occurrence), std::uint64_t(k.role),
                            std::uint64_t(k.symbol)}) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

class GraphSink {
 public:
  GraphSink(const SourceModel& model, Vdg& vdg) : model_(model), vdg_(vdg) {}

  NodeIndex node(const NodeKey& key, std::uint32_t path, StmtId stmt, SymbolId function, bool& created) {
    auto [it, inserted] = index_.emplace(key, static_cast<NodeIndex>(vdg_.nodes.size()));
    created = inserted;
    if (inserted) {
      VdgNode n;
      n.symbol = key.symbol;
      n.substance = model_.symbol(key.symbol).substance;
      n.pos = key.pos;
      n.path = path;
      n.trace = key.trace;
      n.occurrence = key.occurrence;
      n.role = key.role;
      n.stmt = stmt;
      n.function = function;
      vdg_.nodes.push_back(std::move(n));
    }
    return it->second;
  }

  void edge(NodeIndex from, NodeIndex to, EdgeKind kind) {
    std::uint64_t k = (std::uint64_t(from) << 32) | to;
    if (seen_[static_cast<int>(kind)].insert(k).second) vdg_.edges.push_back(VdgEdge{from, to, kind, false});
  }

  void clear_index() { index_.clear(); }

 private:
  const SourceModel& model_;
  Vdg& vdg_;
  std::unordered_map<NodeKey, NodeIndex, NodeKeyHash> index_;
  std::unordered_set<std::uint64_t> seen_[3];
};

struct Frame {
  std::vector<NodeIndex> conds;
  bool has_uses = false;
  bool pending = false;  // do-while body before its condition has been seen
  std::vector<NodeIndex> waiting;
};

struct LoopCtx {
  Env breaks{true, {}};
  Env continues{true, {}};
};

struct CallCtx {
  SymbolId function = kNoSymbol;
  TraceId trace = 0;
  Env returns{true, {}};
};

class PathWalker {
 public:
  PathWalker(const SourceModel& model, Vdg& vdg, GraphSink& sink, std::uint32_t path,
             const std::vector<bool>& shared)
      : model_(model), vdg_(vdg), sink_(sink), path_(path), shared_(shared) {}

  void run(const FunctionDef& entry) {
    fn_ = entry.symbol;
    trace_ = 0;
    walk(*entry.body);
  }

 private:
  // ---- environment ----
  Key key_of(SymbolId sym) const {
    const Symbol& s = model_.symbol(sym);
    return Key{shared_[s.substance] ? 0 : trace_, s.substance};
  }

  void reach(NodeIndex use, SymbolId sym) {
    if (env_.dead) return;
    Key k = key_of(sym);
    auto it = env_.defs.find(k);
    if (it == env_.defs.end()) {
      if (shared_[k.second]) vdg_.nodes[use].entry_reached = true;
      return;
    }
    for (NodeIndex d : it->second) {
      if (d == kEntryValue) vdg_.nodes[use].entry_reached = true;
      else sink_.edge(d, use, EdgeKind::Data);
    }
  }

  void define(NodeIndex def, SymbolId sym, bool strong) {
    Key k = key_of(sym);
    auto it = env_.defs.find(k);
    if (strong || it == env_.defs.end()) {
      DefSet s{def};
      if (!strong && shared_[k.second]) s.push_back(kEntryValue);
      env_.defs[k] = std::move(s);
    } else {
      merge_into(it->second, DefSet{def});
    }
  }

  // ---- nodes ----
  NodeIndex make(SymbolId sym, CodePosition pos, std::uint32_t occ, NodeRole role, SymbolId function, TraceId trace) {
    bool created = false;
    NodeIndex n = sink_.node(NodeKey{pos, trace, occ, role, sym}, path_, stmt_, function, created);
    govern(n);
    return n;
  }

  NodeIndex use_node(SymbolId sym, const Expr& at, NodeRole role) {
    NodeIndex n = make(sym, at.pos, at.occurrence, role, fn_, trace_);
    reach(n, sym);
    return n;
  }

  void govern(NodeIndex n) {
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f) {
      if (f->pending) {
        if (!f->has_uses) continue;
        f->waiting.push_back(n);
        return;
      }
      if (f->conds.empty()) continue;
      for (NodeIndex c : f->conds) sink_.edge(c, n, EdgeKind::Control);
      return;
    }
  }

  bool has_uses(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Name: return model_.symbol(e.symbol).kind != SymbolKind::Function;
      case ExprKind::AddressOf: {
        const Expr& inner = *e.operands[0];
        return inner.kind == ExprKind::Index && has_uses(*inner.operands[1]);
      }
      case ExprKind::Deref:
      case ExprKind::Index: return true;
      case ExprKind::Call:
        if (e.symbol != kNoSymbol && model_.function_of(e.symbol)) return true;
        for (const auto& op : e.operands)
          if (has_uses(*op)) return true;
        return false;
      default:
        for (const auto& op : e.operands)
          if (has_uses(*op)) return true;
        return false;
    }
  }

  // Evaluates `e`, returning the nodes whose values flow into its result.
  void eval(const Expr& e, NodeRole role, std::vector<NodeIndex>& out, bool value_used = true) {
    switch (e.kind) {
      case ExprKind::IntLiteral:
      case ExprKind::FloatLiteral:
      case ExprKind::StringLiteral: return;
      case ExprKind::Name:
        if (model_.symbol(e.symbol).kind != SymbolKind::Function) out.push_back(use_node(e.symbol, e, role));
        return;
      case ExprKind::AddressOf: {
        const Expr& inner = *e.operands[0];
        if (inner.kind == ExprKind::Index) eval(*inner.operands[1], role, out);
        return;
      }
      case ExprKind::Deref: {
        const Expr& ptr = *e.operands[0];
        if (ptr.kind != ExprKind::Name) {
          eval(ptr, role, out);
          return;
        }
        out.push_back(use_node(ptr.symbol, ptr, role));
        if (auto t = model_.pointer_map.target_of(ptr.symbol)) out.push_back(use_node(*t, ptr, role));
        return;
      }
      case ExprKind::Index: {
        const Expr& base = *e.operands[0];
        out.push_back(use_node(base.symbol, base, role));
        if (model_.symbol(base.symbol).type.pointer) {
          if (auto t = model_.pointer_map.target_of(base.symbol)) out.push_back(use_node(*t, base, role));
        }
        eval(*e.operands[1], role, out);
        return;
      }
      case ExprKind::Call: {
        const FunctionDef* callee = e.symbol != kNoSymbol ? model_.function_of(e.symbol) : nullptr;
        if (!callee) {
          // External or indirect: arguments feed the result directly.
          for (const auto& op : e.operands) eval(*op, role, out);
          return;
        }
        call(e, *callee, role, out, value_used);
        return;
      }
      default:
        for (const auto& op : e.operands) eval(*op, role, out);
    }
  }

  void call(const Expr& e, const FunctionDef& callee, NodeRole role, std::vector<NodeIndex>& out, bool value_used) {
    std::vector<std::vector<NodeIndex>> args(e.operands.size() - 1);
    for (std::size_t k = 1; k < e.operands.size(); ++k) eval(*e.operands[k], role, args[k - 1]);
    const Expr& name = *e.operands[0];
    TraceId inner = vdg_.traces.push(trace_, StackFrame{name.pos, callee.symbol});
    if (vdg_.trace_info.size() <= inner) vdg_.trace_info.resize(inner + 1);
    vdg_.trace_info[inner] = TraceInfo{trace_, stmt_, callee.symbol};

    // A fresh activation: nothing from an earlier one reaches it.
    erase_trace(inner);
    for (std::size_t k = 0; k < callee.params.size(); ++k) {
      SymbolId p = callee.params[k];
      NodeIndex def = make(p, model_.symbol(p).decl_position, 0, NodeRole::Def, callee.symbol, inner);
      if (k < args.size())
        for (NodeIndex a : args[k]) sink_.edge(a, def, EdgeKind::Assignment);
      Key key{inner, model_.symbol(p).substance};
      if (!env_.dead) env_.defs[key] = DefSet{def};
    }

    SymbolId saved_fn = fn_;
    TraceId saved_trace = trace_;
    StmtId saved_stmt = stmt_;
    std::vector<LoopCtx> saved_loops;
    saved_loops.swap(loops_);
    calls_.push_back(CallCtx{callee.symbol, inner, Env{true, {}}});
    fn_ = callee.symbol;
    trace_ = inner;
    walk(*callee.body);
    env_ = join(env_, calls_.back().returns, shared_);
    calls_.pop_back();
    loops_.swap(saved_loops);
    fn_ = saved_fn;
    trace_ = saved_trace;
    stmt_ = saved_stmt;

    if (value_used && !(callee_type_void(callee))) {
      NodeIndex result = make(callee.symbol, name.pos, name.occurrence, role, fn_, trace_);
      if (!env_.dead) {
        auto it = env_.defs.find(Key{inner, model_.symbol(callee.symbol).substance});
        if (it != env_.defs.end())
          for (NodeIndex d : it->second) sink_.edge(d, result, EdgeKind::Data);
      }
      out.push_back(result);
    }
    erase_trace(inner);
  }

  bool callee_type_void(const FunctionDef& f) const {
    const CType& t = model_.symbol(f.symbol).type;
    return t.base == BaseType::Void && !t.pointer;
  }

  void erase_trace(TraceId t) {
    auto lo = env_.defs.lower_bound(Key{t, 0});
    auto hi = env_.defs.lower_bound(Key{t + 1, 0});
    env_.defs.erase(lo, hi);
  }

  // ---- definitions ----
  void assign_target(const Expr& target, const std::vector<NodeIndex>& feeding) {
    std::vector<NodeIndex> extra;
    SymbolId sym = kNoSymbol;
    const Expr* at = &target;
    bool strong = true;
    switch (target.kind) {
      case ExprKind::Name: sym = target.symbol; break;
      case ExprKind::Index: {
        const Expr& base = *target.operands[0];
        eval(*target.operands[1], NodeRole::Use, extra);
        at = &base;
        strong = false;
        if (model_.symbol(base.symbol).type.pointer) {
          extra.push_back(use_node(base.symbol, base, NodeRole::Use));
          auto t = model_.pointer_map.target_of(base.symbol);
          if (!t) {
            warn_unknown(base);
            return;
          }
          sym = *t;
        } else {
          sym = base.symbol;
        }
        break;
      }
      case ExprKind::Deref: {
        const Expr& ptr = *target.operands[0];
        if (ptr.kind != ExprKind::Name) {
          eval(ptr, NodeRole::Use, extra);
          vdg_.warnings.push_back(model_.format(target.pos) + ": write through a computed pointer ignored");
          return;
        }
        extra.push_back(use_node(ptr.symbol, ptr, NodeRole::Use));
        auto t = model_.pointer_map.target_of(ptr.symbol);
        if (!t) {
          warn_unknown(ptr);
          return;
        }
        sym = *t;
        at = &ptr;
        break;
      }
      default: return;
    }
    NodeIndex def = make(sym, at->pos, at->occurrence, NodeRole::Def, fn_, trace_);
    for (NodeIndex u : feeding) sink_.edge(u, def, EdgeKind::Assignment);
    for (NodeIndex u : extra) sink_.edge(u, def, EdgeKind::Assignment);
    if (!env_.dead) define(def, sym, strong && !model_.symbol(sym).type.is_array());
  }

  void warn_unknown(const Expr& ptr) {
    std::string w = model_.format(ptr.pos) + ": write through unresolved pointer '" + model_.symbol(ptr.symbol).name +
                    "' ignored";
    if (std::find(vdg_.warnings.begin(), vdg_.warnings.end(), w) == vdg_.warnings.end()) vdg_.warnings.push_back(w);
  }

  // ---- statements ----
  void simple(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: {
        std::vector<NodeIndex> uses;
        eval(*s.value, NodeRole::Use, uses);
        assign_target(*s.target, uses);
        return;
      }
      case StmtKind::ExprStmt: {
        std::vector<NodeIndex> uses;
        eval(*s.value, NodeRole::Use, uses, s.value->kind != ExprKind::Call);
        return;
      }
      case StmtKind::Decl: {
        if (!s.value || s.static_decl) return;
        std::vector<NodeIndex> uses;
        eval(*s.value, NodeRole::Use, uses);
        NodeIndex def = make(s.decl_symbol, s.pos, 0, NodeRole::Def, fn_, trace_);
        for (NodeIndex u : uses) sink_.edge(u, def, EdgeKind::Assignment);
        if (!env_.dead) define(def, s.decl_symbol, !model_.symbol(s.decl_symbol).type.is_array());
        return;
      }
      default: return;
    }
  }

  std::vector<NodeIndex> condition(const Expr* cond) {
    std::vector<NodeIndex> out;
    if (cond) eval(*cond, NodeRole::CondUse, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  static bool constant_true(const Expr* cond) {
    return !cond || (cond->kind == ExprKind::IntLiteral && cond->int_value != 0);
  }

  void walk(const Stmt& s) {
    StmtId saved = stmt_;
    stmt_ = s.id;
    switch (s.kind) {
      case StmtKind::Block:
        stmt_ = saved;
        for (const auto& c : s.children) walk(*c);
        return;
      case StmtKind::Assign:
      case StmtKind::ExprStmt:
      case StmtKind::Decl:
        simple(s);
        break;
      case StmtKind::Empty: break;
      case StmtKind::Break:
        loops_.back().breaks = join(loops_.back().breaks, env_, shared_);
        env_.dead = true;
        break;
      case StmtKind::Continue:
        loops_.back().continues = join(loops_.back().continues, env_, shared_);
        env_.dead = true;
        break;
      case StmtKind::Return: {
        std::vector<NodeIndex> uses;
        if (s.value) eval(*s.value, NodeRole::Use, uses);
        if (!calls_.empty()) {
          CallCtx& c = calls_.back();
          if (s.value) {
            NodeIndex def = make(c.function, s.pos, 0, NodeRole::Def, fn_, trace_);
            for (NodeIndex u : uses) sink_.edge(u, def, EdgeKind::Assignment);
            if (!env_.dead) env_.defs[Key{c.trace, model_.symbol(c.function).substance}] = DefSet{def};
          }
          c.returns = join(c.returns, env_, shared_);
        }
        env_.dead = true;
        break;
      }
      case StmtKind::If: walk_if(s); break;
      case StmtKind::While: walk_while(s); break;
      case StmtKind::DoWhile: walk_do(s); break;
      case StmtKind::For: walk_for(s); break;
    }
    stmt_ = saved;
  }

  void walk_if(const Stmt& s) {
    auto conds = condition(s.cond.get());
    frames_.push_back(Frame{conds, !conds.empty(), false, {}});
    Env before = env_;
    walk(*s.then_branch);
    Env then_env = std::move(env_);
    env_ = std::move(before);
    if (s.else_branch) walk(*s.else_branch);
    frames_.pop_back();
    env_ = join(then_env, env_, shared_);
  }

  void walk_while(const Stmt& s) {
    Env entry = env_;
    Env head = entry;
    Env exit_env;
    while (true) {
      env_ = head;
      auto conds = condition(s.cond.get());
      Env after_cond = env_;
      frames_.push_back(Frame{conds, !conds.empty(), false, {}});
      loops_.emplace_back();
      walk(*s.body);
      LoopCtx ctx = std::move(loops_.back());
      loops_.pop_back();
      frames_.pop_back();
      Env back = join(env_, ctx.continues, shared_);
      exit_env = constant_true(s.cond.get()) ? ctx.breaks : join(after_cond, ctx.breaks, shared_);
      Env next = join(entry, back, shared_);
      if (next == head) break;
      head = std::move(next);
    }
    env_ = std::move(exit_env);
  }

  void walk_for(const Stmt& s) {
    if (s.init) {
      stmt_ = s.id;
      simple(*s.init);
    }
    Env entry = env_;
    Env head = entry;
    Env exit_env;
    while (true) {
      env_ = head;
      stmt_ = s.id;
      auto conds = condition(s.cond.get());
      Env after_cond = env_;
      frames_.push_back(Frame{conds, !conds.empty(), false, {}});
      loops_.emplace_back();
      walk(*s.body);
      LoopCtx ctx = std::move(loops_.back());
      loops_.pop_back();
      env_ = join(env_, ctx.continues, shared_);
      if (s.step) {
        stmt_ = s.id;
        simple(*s.step);
      }
      frames_.pop_back();
      exit_env = constant_true(s.cond.get()) ? ctx.breaks : join(after_cond, ctx.breaks, shared_);
      Env next = join(entry, env_, shared_);
      if (next == head) break;
      head = std::move(next);
    }
    env_ = std::move(exit_env);
  }

  void walk_do(const Stmt& s) {
    Env entry = env_;
    Env head = entry;
    Env exit_env;
    Frame frame;
    frame.pending = true;
    frame.has_uses = has_uses(*s.cond);
    while (true) {
      env_ = head;
      frames_.push_back(std::move(frame));
      loops_.emplace_back();
      walk(*s.body);
      LoopCtx ctx = std::move(loops_.back());
      loops_.pop_back();
      frame = std::move(frames_.back());
      frames_.pop_back();
      env_ = join(env_, ctx.continues, shared_);
      stmt_ = s.id;
      auto conds = condition(s.cond.get());
      for (NodeIndex w : frame.waiting)
        for (NodeIndex c : conds) sink_.edge(c, w, EdgeKind::Control);
      frame.waiting.clear();
      frame.conds = conds;
      frame.has_uses = !conds.empty();
      frame.pending = false;
      Env after_cond = env_;
      exit_env = constant_true(s.cond.get()) ? ctx.breaks : join(after_cond, ctx.breaks, shared_);
      Env next = join(entry, after_cond, shared_);
      if (next == head) break;
      head = std::move(next);
    }
    env_ = std::move(exit_env);
  }

  const SourceModel& model_;
  Vdg& vdg_;
  GraphSink& sink_;
  std::uint32_t path_;
  const std::vector<bool>& shared_;

  Env env_;
  SymbolId fn_ = kNoSymbol;
  TraceId trace_ = 0;
  StmtId stmt_ = kNoStmt;
  std::vector<Frame> frames_;
  std::vector<LoopCtx> loops_;
  std::vector<CallCtx> calls_;
};

}  // namespace

Vdg build_vdg(const SourceModel& model, const ExecutionPaths& paths) {
  Vdg vdg;
  vdg.trace_info.resize(1);
  std::vector<bool> shared(model.symbols.size(), false);
  for (SymbolId id = 0; id < model.symbols.size(); ++id) shared[model.symbol(id).substance] = model.symbol(id).is_shared();
  GraphSink sink(model, vdg);
  for (const auto& p : paths.paths) {
    vdg.entries.push_back(p.entry);
    sink.clear_index();
    PathWalker walker(model, vdg, sink, p.path_id, shared);
    walker.run(*model.function_of(p.entry));
  }
  for (const auto& [fn, cfg] : paths.cfgs)
    for (const auto& w : cfg.warnings)
      if (std::find(vdg.warnings.begin(), vdg.warnings.end(), w) == vdg.warnings.end()) vdg.warnings.push_back(w);
  vdg.trace_info.resize(vdg.traces.size());
  connect_cross_path(vdg, model);
  return vdg;
}

}  // namespace vdgslice

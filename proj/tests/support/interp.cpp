#include "interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace interp {

using namespace vdgslice;

namespace {

std::int64_t wrap(std::int64_t v) { return CType{}.truncate(v); }

}  // namespace

Interpreter::Interpreter(const SourceModel& model, const std::set<StmtId>* keep) : model_(model), keep_(keep) {}

void Interpreter::tick() {
  if (++steps_ > step_limit) throw std::runtime_error("step limit exceeded");
}

std::vector<std::int64_t>& Interpreter::storage(SymbolId sym) {
  const Symbol& s = model_.symbol(sym);
  auto& table = s.is_shared() || frames_.empty() ? globals_ : frames_.back().vars;
  auto it = table.find(sym);
  if (it == table.end()) {
    std::size_t n = s.type.array_size ? static_cast<std::size_t>(*s.type.array_size) : 1;
    it = table.emplace(sym, std::vector<std::int64_t>(n, 0)).first;
  }
  return it->second;
}

void Interpreter::set(SymbolId global, std::size_t index, std::int64_t value) {
  storage(global).at(index) = model_.symbol(global).type.truncate(value);
}

std::int64_t Interpreter::get(SymbolId global, std::size_t index) const {
  auto it = globals_.find(global);
  return it == globals_.end() ? 0 : it->second.at(index);
}

bool Interpreter::kept(const Stmt& s) const { return !keep_ || s.kind == StmtKind::Block || keep_->count(s.id) > 0; }

std::int64_t Interpreter::call(const Expr& e) {
  std::vector<std::int64_t> args;
  for (std::size_t k = 1; k < e.operands.size(); ++k) args.push_back(eval(*e.operands[k]));
  const FunctionDef* f = e.symbol == kNoSymbol ? nullptr : model_.function_of(e.symbol);
  if (!f) return 0;
  if (frames_.size() > 64) throw std::runtime_error("call depth exceeded");
  frames_.emplace_back();
  for (std::size_t k = 0; k < f->params.size(); ++k) {
    std::int64_t v = k < args.size() ? args[k] : 0;
    storage(f->params[k])[0] = model_.symbol(f->params[k]).type.truncate(v);
  }
  return_value_ = 0;
  exec(*f->body);
  std::int64_t r = return_value_;
  frames_.pop_back();
  return model_.symbol(f->symbol).type.truncate(r);
}

std::int64_t Interpreter::eval(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLiteral: return e.int_value;
    case ExprKind::FloatLiteral:
    case ExprKind::StringLiteral:
    case ExprKind::AddressOf: return 0;
    case ExprKind::Name: return storage(e.symbol)[0];
    case ExprKind::Unary: {
      std::int64_t v = eval(*e.operands[0]);
      switch (e.unary_op) {
        case UnaryOp::Neg: return wrap(-v);
        case UnaryOp::Plus: return v;
        case UnaryOp::Not: return !v;
        case UnaryOp::BitNot: return wrap(~v);
      }
      return v;
    }
    case ExprKind::Binary: {
      if (e.binary_op == BinaryOp::LogAnd) return eval(*e.operands[0]) && eval(*e.operands[1]);
      if (e.binary_op == BinaryOp::LogOr) return eval(*e.operands[0]) || eval(*e.operands[1]);
      std::int64_t a = eval(*e.operands[0]);
      std::int64_t b = eval(*e.operands[1]);
      switch (e.binary_op) {
        case BinaryOp::Mul: return wrap(a * b);
        case BinaryOp::Div: return b == 0 ? 0 : wrap(a / b);
        case BinaryOp::Mod: return b == 0 ? 0 : wrap(a % b);
        case BinaryOp::Add: return wrap(a + b);
        case BinaryOp::Sub: return wrap(a - b);
        case BinaryOp::Shl: return wrap(a << (b & 31));
        case BinaryOp::Shr: return wrap(a >> (b & 31));
        case BinaryOp::Lt: return a < b;
        case BinaryOp::Le: return a <= b;
        case BinaryOp::Gt: return a > b;
        case BinaryOp::Ge: return a >= b;
        case BinaryOp::Eq: return a == b;
        case BinaryOp::Ne: return a != b;
        case BinaryOp::BitAnd: return wrap(a & b);
        case BinaryOp::BitXor: return wrap(a ^ b);
        case BinaryOp::BitOr: return wrap(a | b);
        default: return 0;
      }
    }
    case ExprKind::Ternary: return eval(*e.operands[0]) ? eval(*e.operands[1]) : eval(*e.operands[2]);
    case ExprKind::Cast: return e.cast_type.truncate(eval(*e.operands[0]));
    case ExprKind::Index: {
      std::int64_t i = eval(*e.operands[1]);
      auto& s = storage(e.operands[0]->symbol);
      if (i < 0 || static_cast<std::size_t>(i) >= s.size()) throw std::runtime_error("index out of range");
      return s[static_cast<std::size_t>(i)];
    }
    case ExprKind::Deref: {
      auto t = model_.pointer_map.target_of(e.operands[0]->symbol);
      return t ? storage(*t)[0] : 0;
    }
    case ExprKind::Call: return call(e);
  }
  return 0;
}

void Interpreter::store(const Expr& target, std::int64_t value) {
  if (target.kind == ExprKind::Name) {
    storage(target.symbol)[0] = model_.symbol(target.symbol).type.truncate(value);
  } else if (target.kind == ExprKind::Index) {
    std::int64_t i = eval(*target.operands[1]);
    SymbolId sym = target.operands[0]->symbol;
    auto& s = storage(sym);
    if (i < 0 || static_cast<std::size_t>(i) >= s.size()) throw std::runtime_error("index out of range");
    s[static_cast<std::size_t>(i)] = model_.symbol(sym).type.truncate(value);
  } else if (target.kind == ExprKind::Deref) {
    if (auto t = model_.pointer_map.target_of(target.operands[0]->symbol))
      storage(*t)[0] = model_.symbol(*t).type.truncate(value);
  }
}

Interpreter::Flow Interpreter::exec(const Stmt& s) {
  if (!kept(s)) return Flow::Normal;
  tick();
  auto notify = [&](std::int64_t v) {
    if (on_statement) on_statement(s.id, v);
  };
  switch (s.kind) {
    case StmtKind::Assign: {
      std::int64_t v = eval(*s.value);
      store(*s.target, v);
      const Expr& t = *s.target;
      SymbolId sym = t.kind == ExprKind::Name ? t.symbol : t.operands[0]->symbol;
      notify(model_.symbol(sym).type.truncate(v));
      return Flow::Normal;
    }
    case StmtKind::Decl:
      if (s.value) {
        std::int64_t v = model_.symbol(s.decl_symbol).type.truncate(eval(*s.value));
        storage(s.decl_symbol)[0] = v;
        notify(v);
      } else {
        storage(s.decl_symbol);
        notify(0);
      }
      return Flow::Normal;
    case StmtKind::ExprStmt:
      eval(*s.value);
      notify(0);
      return Flow::Normal;
    case StmtKind::Empty: return Flow::Normal;
    case StmtKind::Break: return Flow::Break;
    case StmtKind::Continue: return Flow::Continue;
    case StmtKind::Return:
      return_value_ = s.value ? eval(*s.value) : 0;
      return Flow::Return;
    case StmtKind::Block:
      for (const auto& c : s.children) {
        Flow f = exec(*c);
        if (f != Flow::Normal) return f;
      }
      return Flow::Normal;
    case StmtKind::If:
      if (eval(*s.cond)) return exec(*s.then_branch);
      return s.else_branch ? exec(*s.else_branch) : Flow::Normal;
    case StmtKind::While:
      for (;;) {
        tick();
        if (s.cond && !eval(*s.cond)) return Flow::Normal;
        Flow f = exec(*s.body);
        if (f == Flow::Break) return Flow::Normal;
        if (f == Flow::Return) return f;
      }
    case StmtKind::DoWhile:
      for (;;) {
        tick();
        Flow f = exec(*s.body);
        if (f == Flow::Break) return Flow::Normal;
        if (f == Flow::Return) return f;
        if (!eval(*s.cond)) return Flow::Normal;
      }
    case StmtKind::For:
      if (s.init) {
        if (s.init->kind == StmtKind::Assign) store(*s.init->target, eval(*s.init->value));
        else if (s.init->value) eval(*s.init->value);
      }
      for (;;) {
        tick();
        if (s.cond && !eval(*s.cond)) return Flow::Normal;
        Flow f = exec(*s.body);
        if (f == Flow::Break) return Flow::Normal;
        if (f == Flow::Return) return f;
        if (s.step) {
          if (s.step->kind == StmtKind::Assign) store(*s.step->target, eval(*s.step->value));
          else if (s.step->value) eval(*s.step->value);
        }
      }
  }
  return Flow::Normal;
}

void Interpreter::run(const std::string& entry) {
  const FunctionDef* f = model_.find_function(entry);
  if (!f) throw std::runtime_error("no entry " + entry);
  frames_.assign(1, Frame{});
  exec(*f->body);
  frames_.clear();
}

WeiserResult weiser_check(const SourceModel& model, const SlicingCriteria& criteria, const Slice& slice,
                          std::size_t vectors, std::uint64_t seed, int cycles) {
  std::set<StmtId> roots;
  for (const auto& r : criteria.roots) {
    auto file = model.file_id(r.file);
    for (StmtId s = 0; file && s < model.stmt_count(); ++s) {
      const Stmt& st = *model.stmt_info(s).stmt;
      if (st.pos.file != *file || st.pos.line != r.line) continue;
      SymbolId sym = kNoSymbol;
      if (st.kind == StmtKind::Decl) sym = st.decl_symbol;
      if (st.kind == StmtKind::Assign)
        sym = st.target->kind == ExprKind::Name ? st.target->symbol : st.target->operands[0]->symbol;
      if (sym != kNoSymbol && model.symbol(sym).name == r.variable) roots.insert(s);
    }
  }
  WeiserResult result;
  for (std::size_t v = 0; v < vectors; ++v) {
    std::mt19937_64 rng(seed * 1000003 + v);
    Interpreter original(model), sliced(model, &slice.statements);
    std::vector<std::pair<StmtId, std::int64_t>> seq_a, seq_b;
    original.on_statement = [&](StmtId s, std::int64_t x) {
      if (roots.count(s)) seq_a.emplace_back(s, x);
    };
    sliced.on_statement = [&](StmtId s, std::int64_t x) {
      if (roots.count(s)) seq_b.emplace_back(s, x);
    };
    std::string failure;
    try {
      for (int c = 0; c < cycles; ++c) {
        std::vector<std::uint32_t> order(criteria.entry_points.size());
        for (std::uint32_t k = 0; k < order.size(); ++k) order[k] = k;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::uint32_t p : order) {
          for (const auto& iface : slice.interfaces) {
            if (!iface.paths.count(p)) continue;
            const Symbol& s = model.symbol(iface.symbol);
            if (!s.is_shared()) continue;
            std::size_t n = s.type.array_size ? static_cast<std::size_t>(*s.type.array_size) : 1;
            for (std::size_t i = 0; i < n; ++i) {
              std::int64_t lo = std::max<std::int64_t>(s.type.min_value(), -1000);
              std::int64_t hi = std::min<std::int64_t>(s.type.max_value(), 1000);
              std::int64_t x = lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
              original.set(iface.symbol, i, x);
              sliced.set(iface.symbol, i, x);
            }
          }
          original.run(criteria.entry_points[p]);
          sliced.run(criteria.entry_points[p]);
        }
      }
    } catch (const std::exception& e) {
      failure = e.what();
    }
    ++result.vectors;
    result.root_values += seq_a.size();
    if (!failure.empty() || seq_a != seq_b) {
      ++result.mismatches;
      if (result.first_mismatch.empty())
        result.first_mismatch = "vector " + std::to_string(v) + (failure.empty() ? ": root values differ" : ": " + failure);
    }
  }
  return result;
}

}  // namespace interp

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "vdgslice/errors.hpp"
#include "vdgslice/promela.hpp"

namespace vdgslice {
namespace {

std::string join(const std::vector<std::string>& items, const char* sep = ";\n") {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += items[k];
  }
  return out;
}

std::string indent(const std::string& text, int levels) {
  std::string pad(4 * levels, ' ');
  std::string out;
  bool at_start = true;
  for (char c : text) {
    if (at_start && c != '\n') out += pad;
    out += c;
    at_start = c == '\n';
  }
  return out;
}

std::string body_text(const std::vector<std::string>& items) { return items.empty() ? "skip" : join(items); }

std::string arm(const std::string& guard, const std::vector<std::string>& items) {
  std::string body = body_text(items);
  if (body.find('\n') == std::string::npos) return ":: " + guard + " -> " + body;
  return ":: " + guard + " ->\n" + indent(body, 1);
}

bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt || op == BinaryOp::Ge ||
         op == BinaryOp::Eq || op == BinaryOp::Ne;
}

bool holds(BinaryOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    default: return false;
  }
}

std::optional<std::int64_t> constant_of(const Expr& e) {
  if (e.kind == ExprKind::IntLiteral) return e.int_value;
  if (e.kind == ExprKind::Unary && e.unary_op == UnaryOp::Neg && e.operands[0]->kind == ExprKind::IntLiteral)
    return -e.operands[0]->int_value;
  return std::nullopt;
}

std::vector<std::string> map_names(const DataMapping& m) {
  std::vector<std::string> names;
  for (const auto& r : m.map)
    if (std::find(names.begin(), names.end(), r.name) == names.end()) names.push_back(r.name);
  return names;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::optional<std::pair<std::int64_t, std::int64_t>> bounded_domain(const CType& t) {
  if (!t.is_integer_scalar() || t.bit_width() > 8) return std::nullopt;
  return std::make_pair(t.min_value(), t.max_value());
}

std::string choice_for(const std::string& name, const CType& type, const DataMapping* map) {
  if (map) {
    std::string out = "if\n";
    for (const auto& n : map_names(*map)) out += ":: " + name + " = " + n + "\n";
    return out + "fi";
  }
  auto d = bounded_domain(type);
  if (!d) throw UnboundedInterface(name + " (" + type.spelling() + ") needs a data map to bound its domain");
  return "select (" + name + " : " + std::to_string(d->first) + " .. " + std::to_string(d->second) + ")";
}

std::vector<EnvChoice> choices_for(const std::string& name, const CType& type, const DataMapping* map) {
  std::vector<EnvChoice> out;
  std::size_t alternatives = 0;
  if (map) {
    alternatives = map_names(*map).size();
  } else if (auto d = bounded_domain(type)) {
    alternatives = static_cast<std::size_t>(d->second - d->first + 1);
  }
  if (type.array_size) {
    for (std::int64_t k = 0; k < *type.array_size; ++k) {
      std::string element = name + "[" + std::to_string(k) + "]";
      out.push_back(EnvChoice{element, alternatives, choice_for(element, type, map)});
    }
  } else {
    out.push_back(EnvChoice{name, alternatives, choice_for(name, type, map)});
  }
  return out;
}

std::string domain_text(const CType& type, const DataMapping* map) {
  if (map) return "{" + join(map_names(*map), ", ") + "}";
  if (auto d = bounded_domain(type)) return std::to_string(d->first) + " .. " + std::to_string(d->second);
  return "unbounded";
}

struct Instance {
  SymbolId function = kNoSymbol;
  std::string prefix;
  std::string ret;
  std::string end_label;
  bool label_used = false;
};

class Emitter {
 public:
  Emitter(const Slice& slice, const SourceModel& model, const SlicingCriteria& criteria, const EmitOptions& options)
      : slice_(slice), model_(model), criteria_(criteria), options_(options) {
    for (SymbolId id = 0; id < model.symbols.size(); ++id) {
      const Symbol& s = model.symbol(id);
      if (s.kind == SymbolKind::Function) continue;
      if (const DataMapping* m = criteria.mapping_for(s.name)) mapped_[id] = m;
    }
  }

  PromelaModel run() {
    check_mappings();
    PromelaModel out;
    std::vector<std::string> process_texts;
    for (std::size_t path = 0; path < criteria_.entry_points.size(); ++path) {
      const FunctionDef* fn = model_.find_function(criteria_.entry_points[path]);
      if (!fn) throw UnknownEntry("'" + criteria_.entry_points[path] + "' is not a function defined in the sources");
      emit_process(*fn, static_cast<std::uint32_t>(path), out);
    }
    out.env_skeleton = generate_env_skeleton(slice_.interfaces, model_, criteria_);
    out.header = header();
    out.globals = globals();
    out.text = out.header + "\n" + out.globals;
    for (const auto& p : out.processes) out.text += "\n" + p;
    return out;
  }

 private:
  // ---- checks ----
  void check_mappings() const {
    for (const auto& [sym, map] : mapped_) {
      if (!slice_.declarations.count(sym)) continue;
      const CType& t = model_.symbol(sym).type;
      std::vector<MapRange> ranges = map->map;
      std::sort(ranges.begin(), ranges.end(), [](const MapRange& a, const MapRange& b) { return a.lo < b.lo; });
      std::int64_t next = t.min_value();
      bool covered = true;
      for (const auto& r : ranges) {
        if (r.lo > next) covered = false;
        if (r.hi >= next) next = r.hi == INT64_MAX ? r.hi : r.hi + 1;
      }
      if (!covered || (ranges.back().hi < t.max_value()))
        throw SchemaError("data map for '" + map->variable + "' does not cover " + std::to_string(t.min_value()) +
                          " .. " + std::to_string(t.max_value()));
    }
  }

  // ---- names and declarations ----
  std::string decl_line(const std::string& name, SymbolId sym) const {
    const CType& t = model_.symbol(sym).type;
    std::string type = mapped_.count(sym) ? "mtype" : promela_type(t);
    std::string out = type + " " + name;
    if (t.array_size) out += "[" + std::to_string(*t.array_size) + "]";
    return out;
  }

  bool is_global_name(const Symbol& s) const { return s.kind == SymbolKind::Global || s.kind == SymbolKind::Static; }

  std::string name_of(SymbolId sym, const CodePosition& pos) {
    const Symbol& s = model_.symbol(sym);
    if (s.type.is_float()) throw UnsupportedConstruct(model_.format(pos) + ": floating-point variable '" + s.name + "'");
    if (s.kind == SymbolKind::Global || (s.kind == SymbolKind::Static && s.function == kNoSymbol)) {
      globals_used_.insert(sym);
      return s.name;
    }
    if (s.kind == SymbolKind::Static) {
      globals_used_.insert(sym);
      return model_.symbol(s.function).name + "_" + s.name;
    }
    std::string name = stack_.back().prefix + s.name;
    if (declared_.insert(name).second) {
      locals_.push_back(decl_line(name, sym));
      local_names_[sym].push_back(name);
    }
    return name;
  }

  std::string global_name(SymbolId sym) const {
    const Symbol& s = model_.symbol(sym);
    if (s.kind == SymbolKind::Static && s.function != kNoSymbol) return model_.symbol(s.function).name + "_" + s.name;
    return s.name;
  }

  // ---- expressions ----
  std::string mapped_compare(const Expr& e, std::vector<std::string>& pre) {
    const Expr& l = *e.operands[0];
    const Expr& r = *e.operands[1];
    bool left = l.kind == ExprKind::Name && mapped_.count(l.symbol);
    const Expr& var = left ? l : r;
    const Expr& other = left ? r : l;
    const DataMapping& map = *mapped_.at(var.symbol);
    std::string where = model_.format(var.pos);
    auto k = constant_of(other);
    if (!k) throw UnmappedPredicate(map.variable + " at " + where + ": compared with a non-constant");
    return apply_data_mapping(map, name_of(var.symbol, var.pos), e.binary_op, *k, left, where);
    (void)pre;
  }

  bool mentions_mapped(const Expr& e) const {
    if (e.kind == ExprKind::Name && mapped_.count(e.symbol)) return true;
    for (const auto& op : e.operands)
      if (mentions_mapped(*op)) return true;
    return false;
  }

  std::string operand(const Expr& e, std::vector<std::string>& pre, int parent_prec, bool right) {
    std::string s = expr(e, pre);
    if (e.kind == ExprKind::Ternary) return s;
    if (e.kind == ExprKind::Binary) {
      bool mapped = is_comparison(e.binary_op) && direct_mapped(e);
      int p = precedence(e.binary_op);
      if (mapped || p < parent_prec || (right && p == parent_prec)) return "(" + s + ")";
    }
    return s;
  }

  bool direct_mapped(const Expr& e) const {
    auto m = [&](const Expr& x) { return x.kind == ExprKind::Name && mapped_.count(x.symbol) > 0; };
    return m(*e.operands[0]) || m(*e.operands[1]);
  }

  std::string expr(const Expr& e, std::vector<std::string>& pre) {
    std::string where = model_.format(e.pos);
    switch (e.kind) {
      case ExprKind::IntLiteral: return std::to_string(e.int_value);
      case ExprKind::FloatLiteral: throw UnsupportedConstruct(where + ": floating-point literal");
      case ExprKind::StringLiteral: throw UnsupportedConstruct(where + ": string literal");
      case ExprKind::Name: {
        const Symbol& s = model_.symbol(e.symbol);
        if (s.kind == SymbolKind::Function) throw UnsupportedConstruct(where + ": function used as a value");
        if (s.type.is_array()) throw UnsupportedConstruct(where + ": array '" + s.name + "' used as a value");
        if (s.type.pointer) throw UnsupportedConstruct(where + ": pointer '" + s.name + "' used as a value");
        if (mapped_.count(e.symbol))
          throw UnmappedPredicate(s.name + " at " + where + ": mapped variable outside a comparison with a constant");
        return name_of(e.symbol, e.pos);
      }
      case ExprKind::Unary: {
        std::string inner = operand(*e.operands[0], pre, 11, false);
        switch (e.unary_op) {
          case UnaryOp::Neg: return "-" + inner;
          case UnaryOp::Plus: return inner;
          case UnaryOp::Not: return "!" + inner;
          case UnaryOp::BitNot: return "~" + inner;
        }
        return inner;
      }
      case ExprKind::Binary: {
        if (is_comparison(e.binary_op) && direct_mapped(e)) return mapped_compare(e, pre);
        int p = precedence(e.binary_op);
        return operand(*e.operands[0], pre, p, false) + " " + std::string(to_string(e.binary_op)) + " " +
               operand(*e.operands[1], pre, p, true);
      }
      case ExprKind::Ternary:
        return "(" + expr(*e.operands[0], pre) + " -> " + expr(*e.operands[1], pre) + " : " +
               expr(*e.operands[2], pre) + ")";
      case ExprKind::Cast:
        if (e.cast_type.is_float()) throw UnsupportedConstruct(where + ": floating-point cast");
        return operand(*e.operands[0], pre, 11, false);
      case ExprKind::Index: return indexed(e, pre);
      case ExprKind::Deref: return name_of(deref_target(*e.operands[0]), e.pos);
      case ExprKind::AddressOf: throw UnsupportedConstruct(where + ": address taken outside a pointer assignment");
      case ExprKind::Call: return call(e, pre);
    }
    return "?";
  }

  SymbolId deref_target(const Expr& ptr) const {
    std::string where = model_.format(ptr.pos);
    if (ptr.kind != ExprKind::Name) throw UnsupportedConstruct(where + ": dereference of a computed pointer");
    auto t = model_.pointer_map.target_of(ptr.symbol);
    if (!t) throw UnsupportedConstruct(where + ": unresolved pointer '" + model_.symbol(ptr.symbol).name + "'");
    return *t;
  }

  std::string indexed(const Expr& e, std::vector<std::string>& pre) {
    const Expr& base = *e.operands[0];
    SymbolId arr = base.symbol;
    if (model_.symbol(arr).type.pointer) arr = deref_target(base);
    if (mapped_.count(arr))
      throw UnmappedPredicate(model_.symbol(arr).name + " at " + model_.format(e.pos) +
                              ": mapped array element outside a comparison with a constant");
    return name_of(arr, base.pos) + "[" + expr(*e.operands[1], pre) + "]";
  }

  std::string call(const Expr& e, std::vector<std::string>& pre) {
    std::string where = model_.format(e.pos);
    const FunctionDef* callee = e.symbol != kNoSymbol ? model_.function_of(e.symbol) : nullptr;
    if (!callee) {
      if (e.symbol == kNoSymbol) throw UnsupportedConstruct(where + ": call through a function pointer");
      throw UnsupportedConstruct(where + ": call to '" + model_.symbol(e.symbol).name + "' which has no body");
    }
    std::vector<std::string> args;
    for (std::size_t k = 1; k < e.operands.size(); ++k) {
      const Expr& a = *e.operands[k];
      bool pointer_arg = k - 1 < callee->params.size() && model_.symbol(callee->params[k - 1]).type.pointer;
      args.push_back(pointer_arg ? "" : expr(a, pre));
    }
    const std::string& fname = model_.symbol(callee->symbol).name;
    int n = ++counters_[callee->symbol];
    Instance inst;
    inst.function = callee->symbol;
    inst.prefix = fname + "_" + std::to_string(n) + "_";
    inst.ret = inst.prefix + "_ret";
    inst.end_label = inst.prefix + "end";
    stack_.push_back(inst);
    for (std::size_t k = 0; k < callee->params.size() && k < args.size(); ++k) {
      SymbolId p = callee->params[k];
      if (model_.symbol(p).type.pointer || !slice_.declarations.count(p)) continue;
      pre.push_back(name_of(p, model_.symbol(p).decl_position) + " = " + args[k]);
    }
    std::vector<std::string> body = block(*callee->body, true);
    Instance done = stack_.back();
    stack_.pop_back();
    pre.insert(pre.end(), body.begin(), body.end());
    if (done.label_used) pre.push_back(done.end_label + ": skip");
    const CType& rt = model_.symbol(callee->symbol).type;
    if (rt.base == BaseType::Void && !rt.pointer) return "0";
    if (declared_.insert(done.ret).second) locals_.push_back(promela_type(rt) + " " + done.ret);
    return done.ret;
  }

  std::string guard(const Expr& c, std::vector<std::string>& pre) {
    if (c.kind == ExprKind::Name && mapped_.count(c.symbol)) {
      return "(" + apply_data_mapping(*mapped_.at(c.symbol), name_of(c.symbol, c.pos), BinaryOp::Ne, 0, true,
                                      model_.format(c.pos)) + ")";
    }
    return "(" + expr(c, pre) + ")";
  }

  // ---- statements ----
  bool kept(const Stmt& s) const { return slice_.statements.count(s.id) > 0; }

  bool is_pointer_store(const Stmt& s) const {
    if (s.kind == StmtKind::Assign) return s.target->kind == ExprKind::Name && model_.symbol(s.target->symbol).type.pointer;
    if (s.kind == StmtKind::Decl) return model_.symbol(s.decl_symbol).type.pointer;
    return false;
  }

  std::string assignment(const Expr& target, const Expr& value, std::vector<std::string>& pre) {
    SymbolId sym = kNoSymbol;
    if (target.kind == ExprKind::Name) sym = target.symbol;
    if (target.kind == ExprKind::Deref) sym = deref_target(*target.operands[0]);
    if (sym != kNoSymbol && mapped_.count(sym)) {
      const DataMapping& map = *mapped_.at(sym);
      std::string lhs = name_of(sym, target.pos);
      if (auto k = constant_of(value)) {
        for (const auto& r : map.map)
          if (*k >= r.lo && *k <= r.hi) return lhs + " = " + r.name;
        throw UnmappedPredicate(map.variable + " at " + model_.format(target.pos) + ": value " + std::to_string(*k) +
                                " lies outside the map");
      }
      if (value.kind == ExprKind::Name && mapped_.count(value.symbol) && mapped_.at(value.symbol) == &map)
        return lhs + " = " + name_of(value.symbol, value.pos);
      throw UnmappedPredicate(map.variable + " at " + model_.format(target.pos) +
                              ": assignment not expressible over the map");
    }
    std::string rhs = expr(value, pre);
    std::string lhs;
    switch (target.kind) {
      case ExprKind::Name: lhs = name_of(target.symbol, target.pos); break;
      case ExprKind::Index: lhs = indexed(target, pre); break;
      case ExprKind::Deref: lhs = name_of(sym, target.pos); break;
      default: throw UnsupportedConstruct(model_.format(target.pos) + ": assignment target");
    }
    return lhs + " = " + rhs;
  }

  std::vector<std::string> block(const Stmt& s, bool top) {
    std::vector<std::string> out;
    if (s.kind == StmtKind::Block) {
      for (std::size_t k = 0; k < s.children.size(); ++k) {
        bool last = top && k + 1 == s.children.size();
        auto items = stmt(*s.children[k], last);
        out.insert(out.end(), items.begin(), items.end());
      }
      return out;
    }
    return stmt(s, top);
  }

  std::vector<std::string> stmt(const Stmt& s, bool last_in_function) {
    if (s.kind == StmtKind::Block) return block(s, last_in_function);
    if (!kept(s)) return {};
    std::vector<std::string> pre;
    std::string where = model_.format(s.pos);
    switch (s.kind) {
      case StmtKind::Assign:
        if (is_pointer_store(s)) {
          pre.push_back("skip");
          break;
        }
        {
          std::string text = assignment(*s.target, *s.value, pre);
          pre.push_back(text);
        }
        break;
      case StmtKind::Decl: {
        if (is_pointer_store(s) || !s.value || s.static_decl) {
          pre.push_back("skip");
          break;
        }
        Expr target;
        target.kind = ExprKind::Name;
        target.symbol = s.decl_symbol;
        target.pos = s.pos;
        std::string text = assignment(target, *s.value, pre);
        pre.push_back(text);
        break;
      }
      case StmtKind::ExprStmt: {
        if (s.value->kind == ExprKind::Call) {
          expr(*s.value, pre);
          if (pre.empty()) pre.push_back("skip");
        } else {
          pre.push_back("skip");
        }
        break;
      }
      case StmtKind::Empty: pre.push_back("skip"); break;
      case StmtKind::Break: pre.push_back("break"); break;
      case StmtKind::Continue: throw UnsupportedConstruct(where + ": continue statement");
      case StmtKind::Return: {
        std::string value;
        if (s.value && stack_.size() > 1) value = expr(*s.value, pre);
        Instance& inst = stack_.back();
        if (!value.empty()) {
          const CType& rt = model_.symbol(inst.function).type;
          if (declared_.insert(inst.ret).second) locals_.push_back(promela_type(rt) + " " + inst.ret);
          pre.push_back(inst.ret + " = " + value);
        }
        if (!last_in_function) {
          inst.label_used = true;
          pre.push_back("goto " + inst.end_label);
        } else if (pre.empty()) {
          pre.push_back("skip");
        }
        break;
      }
      case StmtKind::If: {
        std::string g = guard(*s.cond, pre);
        auto then_items = block(*s.then_branch, false);
        std::vector<std::string> else_items;
        if (s.else_branch) else_items = block(*s.else_branch, false);
        pre.push_back("if\n" + arm(g, then_items) + "\n" + arm("else", else_items) + "\nfi");
        break;
      }
      case StmtKind::While: {
        std::vector<std::string> cond_pre;
        std::string g = s.cond ? guard(*s.cond, cond_pre) : "(1)";
        auto body = block(*s.body, false);
        pre.push_back(loop(cond_pre, g, body));
        break;
      }
      case StmtKind::For: {
        if (s.init) {
          auto init = for_part(*s.init);
          pre.insert(pre.end(), init.begin(), init.end());
        }
        std::vector<std::string> cond_pre;
        std::string g = s.cond ? guard(*s.cond, cond_pre) : "(1)";
        auto body = block(*s.body, false);
        if (s.step) {
          auto step = for_part(*s.step);
          body.insert(body.end(), step.begin(), step.end());
        }
        pre.push_back(loop(cond_pre, g, body));
        break;
      }
      case StmtKind::DoWhile: {
        auto body = block(*s.body, false);
        std::vector<std::string> cond_pre;
        std::string g = guard(*s.cond, cond_pre);
        body.insert(body.end(), cond_pre.begin(), cond_pre.end());
        body.push_back("if\n:: " + g + " -> skip\n:: else -> break\nfi");
        pre.push_back("do\n:: " + indent(body_text(body), 1).substr(4) + "\nod");
        break;
      }
      case StmtKind::Block: break;
    }
    return pre;
  }

  std::vector<std::string> for_part(const Stmt& part) {
    std::vector<std::string> pre;
    if (part.kind == StmtKind::Assign) {
      if (is_pointer_store(part)) return {"skip"};
      std::string text = assignment(*part.target, *part.value, pre);
      pre.push_back(text);
    } else if (part.kind == StmtKind::ExprStmt && part.value->kind == ExprKind::Call) {
      expr(*part.value, pre);
    }
    return pre;
  }

  std::string loop(const std::vector<std::string>& cond_pre, const std::string& g, const std::vector<std::string>& body) {
    if (cond_pre.empty()) return "do\n" + arm(g, body) + "\n:: else -> break\nod";
    std::vector<std::string> inner = cond_pre;
    inner.push_back("if\n:: " + g + " -> skip\n:: else -> break\nfi");
    inner.insert(inner.end(), body.begin(), body.end());
    return "do\n:: " + indent(join(inner), 1).substr(4) + "\nod";
  }

  // ---- processes ----
  std::vector<std::string> env_items(std::uint32_t path, bool locals_only) {
    std::vector<std::string> out;
    for (const auto& v : slice_.interfaces) {
      if (!v.paths.count(path)) continue;
      const Symbol& s = model_.symbol(v.symbol);
      const DataMapping* map = mapped_.count(v.symbol) ? mapped_.at(v.symbol) : nullptr;
      if (is_global_name(s)) {
        if (locals_only) continue;
        globals_used_.insert(v.symbol);
        for (const auto& c : choices_for(global_name(v.symbol), s.type, map)) out.push_back(c.text);
      } else {
        auto it = local_names_.find(v.symbol);
        if (it == local_names_.end()) continue;
        for (const auto& name : it->second)
          for (const auto& c : choices_for(name, s.type, map)) out.push_back(c.text);
      }
    }
    return out;
  }

  static std::string cyclic(const std::string& name, const std::vector<std::string>& decls,
                            const std::vector<std::string>& items) {
    std::string out = "active proctype " + name + "()\n{\n";
    for (const auto& d : decls) out += "    " + d + ";\n";
    out += "    do\n    :: atomic {\n";
    out += indent(body_text(items), 2) + "\n";
    out += "    }\n    od\n}\n";
    return out;
  }

  void emit_process(const FunctionDef& fn, std::uint32_t path, PromelaModel& model_out) {
    stack_.clear();
    counters_.clear();
    declared_.clear();
    locals_.clear();
    local_names_.clear();
    Instance entry;
    entry.function = fn.symbol;
    entry.end_label = model_.symbol(fn.symbol).name + "_end";
    stack_.push_back(entry);
    std::vector<std::string> body = block(*fn.body, true);
    if (stack_.back().label_used) body.push_back(entry.end_label + ": skip");
    std::vector<std::string> env = env_items(path, options_.env_separate);
    std::vector<std::string> items = env;
    items.insert(items.end(), body.begin(), body.end());
    const std::string& name = model_.symbol(fn.symbol).name;
    if (options_.env_separate) {
      std::vector<std::string> shared;
      for (const auto& v : slice_.interfaces) {
        if (!v.paths.count(path) || !is_global_name(model_.symbol(v.symbol))) continue;
        const DataMapping* map = mapped_.count(v.symbol) ? mapped_.at(v.symbol) : nullptr;
        for (const auto& c : choices_for(global_name(v.symbol), model_.symbol(v.symbol).type, map))
          shared.push_back(c.text);
        globals_used_.insert(v.symbol);
      }
      if (!shared.empty()) model_out.processes.push_back(cyclic("env_" + name, {}, shared));
    }
    model_out.processes.push_back(cyclic(name, locals_, items));
  }

  std::string globals() {
    std::set<SymbolId> syms = globals_used_;
    for (SymbolId d : slice_.declarations) {
      const Symbol& s = model_.symbol(d);
      if (is_global_name(s) && !s.type.pointer && !s.type.function_pointer) syms.insert(d);
    }
    std::string out;
    std::vector<std::string> mtypes;
    for (SymbolId s : syms)
      if (mapped_.count(s))
        for (const auto& n : map_names(*mapped_.at(s)))
          if (std::find(mtypes.begin(), mtypes.end(), n) == mtypes.end()) mtypes.push_back(n);
    for (const auto& [sym, map] : mapped_)
      if (local_mapped_used(sym))
        for (const auto& n : map_names(*map))
          if (std::find(mtypes.begin(), mtypes.end(), n) == mtypes.end()) mtypes.push_back(n);
    if (!mtypes.empty()) out += "mtype = { " + join(mtypes, ", ") + " };\n";
    for (SymbolId s : syms) {
      const Symbol& sym = model_.symbol(s);
      if (sym.type.is_float()) throw UnsupportedConstruct(model_.format(sym.decl_position) + ": floating-point variable '" + sym.name + "'");
      std::string line = decl_line(global_name(s), s);
      if (auto init = initializer(s)) line += " = " + *init;
      out += line + ";\n";
    }
    return out;
  }

  bool local_mapped_used(SymbolId sym) const {
    return !is_global_name(model_.symbol(sym)) && slice_.declarations.count(sym) > 0;
  }

  std::optional<std::string> initializer(SymbolId sym) const {
    for (const auto& g : model_.globals) {
      if (g.symbol != sym || !g.init) continue;
      auto k = constant_of(*g.init);
      if (!k) return std::nullopt;
      if (mapped_.count(sym)) {
        for (const auto& r : mapped_.at(sym)->map)
          if (*k >= r.lo && *k <= r.hi) return r.name;
        return std::nullopt;
      }
      return std::to_string(*k);
    }
    return std::nullopt;
  }

  std::string header() const {
    std::string out = "/* vdgslice " VDGSLICE_VERSION "\n";
    out += " * criteria fnv1a64 " + hex64(fnv1a64(serialize_criteria(criteria_))) + "\n";
    out += " * one atomic step per cycle, environment ";
    out += options_.env_separate ? "in separate processes\n" : "in the software process\n";
    out += " * interfaces:\n";
    if (slice_.interfaces.empty()) out += " *   none\n";
    for (const auto& v : slice_.interfaces) {
      const Symbol& s = model_.symbol(v.symbol);
      const DataMapping* map = mapped_.count(v.symbol) ? mapped_.at(v.symbol) : nullptr;
      out += " *   " + s.name + " " + (map ? std::string("mtype") : promela_type(s.type)) + " " +
             domain_text(s.type, map) + (v.from_cut ? " cut" : " input");
      for (const auto& p : v.positions) out += " " + model_.format(p);
      out += "\n";
    }
    out += " */\n";
    return out;
  }

  const Slice& slice_;
  const SourceModel& model_;
  const SlicingCriteria& criteria_;
  EmitOptions options_;
  std::map<SymbolId, const DataMapping*> mapped_;

  std::vector<Instance> stack_;
  std::map<SymbolId, int> counters_;
  std::set<std::string> declared_;
  std::vector<std::string> locals_;
  std::map<SymbolId, std::vector<std::string>> local_names_;
  std::set<SymbolId> globals_used_;
};

}  // namespace

std::string EnvironmentSkeleton::text() const {
  std::vector<std::string> parts;
  for (const auto& c : choices) parts.push_back(c.text);
  return join(parts);
}

std::string promela_type(const CType& t) {
  if (t.base == BaseType::Char && t.is_unsigned) return "byte";
  if (t.base == BaseType::Char || t.base == BaseType::Short) return t.is_unsigned && t.base == BaseType::Short ? "int" : "short";
  return "int";
}

std::vector<std::string> mapped_predicate_names(const DataMapping& map, BinaryOp op, std::int64_t constant,
                                                bool variable_left, const std::string& where) {
  if (!is_comparison(op)) throw UnmappedPredicate(map.variable + " at " + where + ": not a comparison");
  auto truth = [&](std::int64_t v) { return variable_left ? holds(op, v, constant) : holds(op, constant, v); };
  std::map<std::string, int> verdict;  // bit 1: true somewhere, bit 2: false somewhere
  for (const auto& r : map.map) {
    bool split;
    if (op == BinaryOp::Eq || op == BinaryOp::Ne) split = r.lo != r.hi && constant >= r.lo && constant <= r.hi;
    else split = truth(r.lo) != truth(r.hi);
    if (split)
      throw UnmappedPredicate(map.variable + " at " + where + ": comparison with " + std::to_string(constant) +
                              " splits range " + std::to_string(r.lo) + " .. " + std::to_string(r.hi));
    verdict[r.name] |= truth(r.lo) ? 1 : 2;
  }
  std::vector<std::string> out;
  for (const auto& n : map_names(map)) {
    if (verdict[n] == 3)
      throw UnmappedPredicate(map.variable + " at " + where + ": value " + n + " is on both sides of the comparison");
    if (verdict[n] == 1) out.push_back(n);
  }
  return out;
}

std::string apply_data_mapping(const DataMapping& map, const std::string& variable, BinaryOp op,
                               std::int64_t constant, bool variable_left, const std::string& where) {
  auto names = mapped_predicate_names(map, op, constant, variable_left, where);
  if (names.empty()) return "false";
  if (names.size() == map_names(map).size()) return "true";
  std::vector<std::string> tests;
  for (const auto& n : names) tests.push_back(variable + " == " + n);
  if (tests.size() == 1) return tests[0];
  return "(" + join(tests, " || ") + ")";
}

EnvironmentSkeleton generate_env_skeleton(const std::vector<InterfaceVariable>& interfaces, const SourceModel& model,
                                          const SlicingCriteria& criteria) {
  EnvironmentSkeleton env;
  for (const auto& v : interfaces) {
    const Symbol& s = model.symbol(v.symbol);
    for (auto& c : choices_for(s.name, s.type, criteria.mapping_for(s.name))) env.choices.push_back(std::move(c));
  }
  return env;
}

PromelaModel convert(const Slice& slice, const SourceModel& model, const SlicingCriteria& criteria,
                     const EmitOptions& options) {
  return Emitter(slice, model, criteria, options).run();
}

}  // namespace vdgslice

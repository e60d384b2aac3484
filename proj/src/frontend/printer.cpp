#include <sstream>

#include "vdgslice/frontend.hpp"

namespace vdgslice {
namespace {

std::string declarator(const Symbol& s) {
  const CType& t = s.type;
  if (t.function_pointer) return t.spelling() + " (*" + s.name + ")()";
  std::string out = t.spelling() + (t.pointer ? " *" : " ") + s.name;
  if (t.array_size) out += "[" + std::to_string(*t.array_size) + "]";
  return out;
}

class Printer {
 public:
  Printer(const SourceModel& model, const PrintFilter* filter) : model_(model), filter_(filter) {}

  std::string expr(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::IntLiteral:
        return e.text.empty() ? std::to_string(e.int_value) : e.text;
      case ExprKind::FloatLiteral:
      case ExprKind::StringLiteral:
        return e.text;
      case ExprKind::Name:
        return model_.symbol(e.symbol).name;
      case ExprKind::Unary:
        return std::string(to_string(e.unary_op)) + operand(*e.operands[0]);
      case ExprKind::Deref:
        return "*" + operand(*e.operands[0]);
      case ExprKind::AddressOf:
        return "&" + operand(*e.operands[0]);
      case ExprKind::Cast: {
        const CType& t = e.cast_type;
        return "(" + t.spelling() + (t.pointer ? " *" : "") + ")" + operand(*e.operands[0]);
      }
      case ExprKind::Binary: {
        int p = precedence(e.binary_op);
        return side(*e.operands[0], p, false) + " " + std::string(to_string(e.binary_op)) + " " +
               side(*e.operands[1], p, true);
      }
      case ExprKind::Ternary:
        return side(*e.operands[0], 1, true) + " ? " + expr(*e.operands[1]) + " : " + side(*e.operands[2], 0, false);
      case ExprKind::Call: {
        std::string out = expr(*e.operands[0]) + "(";
        for (std::size_t k = 1; k < e.operands.size(); ++k) {
          if (k > 1) out += ", ";
          out += expr(*e.operands[k]);
        }
        return out + ")";
      }
      case ExprKind::Index:
        return expr(*e.operands[0]) + "[" + expr(*e.operands[1]) + "]";
    }
    return "?";
  }

  void program(std::ostringstream& out) {
    for (const Unit& u : model_.units) {
      switch (u.kind) {
        case UnitKind::Typedef: break;
        case UnitKind::Prototype: {
          const Symbol& fn = model_.symbol(u.index);
          if (filter_ && filter_->keep_function && !filter_->keep_function(u.index)) break;
          out << fn.type.spelling() << (fn.type.pointer ? " *" : " ") << fn.name << "();\n";
          break;
        }
        case UnitKind::Declaration: {
          const GlobalDecl& g = model_.globals[u.index];
          const Symbol& s = model_.symbol(g.symbol);
          if (filter_ && filter_->declare && !filter_->declare(g.symbol)) break;
          out << (s.kind == SymbolKind::Static ? "static " : "") << (s.external && !g.init ? "extern " : "")
              << declarator(s);
          if (g.init) out << " = " << expr(*g.init);
          out << ";\n";
          break;
        }
        case UnitKind::Function: {
          const FunctionDef& f = model_.functions[u.index];
          if (filter_ && filter_->keep_function && !filter_->keep_function(f.symbol)) break;
          const Symbol& fn = model_.symbol(f.symbol);
          out << fn.type.spelling() << (fn.type.pointer ? " *" : " ") << fn.name << "(";
          if (f.params.empty()) out << "void";
          for (std::size_t k = 0; k < f.params.size(); ++k) {
            if (k) out << ", ";
            out << declarator(model_.symbol(f.params[k]));
          }
          out << ")\n";
          block(out, *f.body, 0);
          out << "\n";
          break;
        }
      }
    }
  }

  bool keep(const Stmt& s) const { return !filter_ || !filter_->keep_stmt || filter_->keep_stmt(s); }

  void block(std::ostringstream& out, const Stmt& b, int depth) {
    indent(out, depth);
    out << "{\n";
    for (const auto& c : b.children) stmt(out, *c, depth + 1);
    indent(out, depth);
    out << "}\n";
  }

  // Branch or loop body; nested blocks keep their braces.
  void nested(std::ostringstream& out, const Stmt& s, int depth) {
    if (s.kind == StmtKind::Block) {
      block(out, s, depth);
    } else if (keep(s) || s.kind == StmtKind::If) {
      std::ostringstream inner;
      stmt(inner, s, depth + 1);
      if (inner.str().empty()) {
        indent(out, depth + 1);
        out << ";\n";
      } else {
        out << inner.str();
      }
    } else {
      indent(out, depth + 1);
      out << ";\n";
    }
  }

  std::string simple(const Stmt& s) const {
    switch (s.kind) {
      case StmtKind::Assign: return expr(*s.target) + " = " + expr(*s.value);
      case StmtKind::ExprStmt: return expr(*s.value);
      case StmtKind::Decl: {
        const Symbol& sym = model_.symbol(s.decl_symbol);
        std::string out = (s.static_decl ? "static " : "") + declarator(sym);
        if (s.value) out += " = " + expr(*s.value);
        return out;
      }
      default: return "";
    }
  }

  void stmt(std::ostringstream& out, const Stmt& s, int depth) {
    if (s.kind == StmtKind::Block) {
      block(out, s, depth);
      return;
    }
    if (!keep(s)) {
      if (s.kind == StmtKind::Decl && filter_ && filter_->declare && filter_->declare(s.decl_symbol)) {
        const Symbol& sym = model_.symbol(s.decl_symbol);
        indent(out, depth);
        out << (s.static_decl ? "static " : "") << declarator(sym);
        if (s.static_decl && s.value) out << " = " << expr(*s.value);
        out << ";\n";
      }
      return;
    }
    switch (s.kind) {
      case StmtKind::Assign:
      case StmtKind::ExprStmt:
      case StmtKind::Decl:
        indent(out, depth);
        out << simple(s) << ";\n";
        return;
      case StmtKind::If:
        indent(out, depth);
        out << "if (" << expr(*s.cond) << ")\n";
        nested(out, *s.then_branch, depth);
        if (s.else_branch) {
          indent(out, depth);
          out << "else\n";
          nested(out, *s.else_branch, depth);
        }
        return;
      case StmtKind::While:
        indent(out, depth);
        out << "while (" << expr(*s.cond) << ")\n";
        nested(out, *s.body, depth);
        return;
      case StmtKind::DoWhile:
        indent(out, depth);
        out << "do\n";
        nested(out, *s.body, depth);
        indent(out, depth);
        out << "while (" << expr(*s.cond) << ");\n";
        return;
      case StmtKind::For:
        indent(out, depth);
        out << "for (" << (s.init ? simple(*s.init) : "") << "; " << (s.cond ? expr(*s.cond) : "") << "; "
            << (s.step ? simple(*s.step) : "") << ")\n";
        nested(out, *s.body, depth);
        return;
      case StmtKind::Break:
        indent(out, depth);
        out << "break;\n";
        return;
      case StmtKind::Continue:
        indent(out, depth);
        out << "continue;\n";
        return;
      case StmtKind::Return:
        indent(out, depth);
        out << "return" << (s.value ? " " + expr(*s.value) : "") << ";\n";
        return;
      case StmtKind::Empty:
        indent(out, depth);
        out << ";\n";
        return;
      case StmtKind::Block: return;
    }
  }

 private:
  static void indent(std::ostringstream& out, int depth) {
    for (int i = 0; i < depth; ++i) out << "    ";
  }

  std::string operand(const Expr& e) const {
    bool wrap = e.kind == ExprKind::Binary || e.kind == ExprKind::Ternary || e.kind == ExprKind::Unary ||
                e.kind == ExprKind::Cast || e.kind == ExprKind::Deref || e.kind == ExprKind::AddressOf;
    return wrap ? "(" + expr(e) + ")" : expr(e);
  }

  std::string side(const Expr& e, int parent_prec, bool right) const {
    if (e.kind == ExprKind::Ternary) return "(" + expr(e) + ")";
    if (e.kind == ExprKind::Binary) {
      int p = precedence(e.binary_op);
      if (p < parent_prec || (right && p == parent_prec)) return "(" + expr(e) + ")";
    }
    return expr(e);
  }

  const SourceModel& model_;
  const PrintFilter* filter_;
};

void sig_expr(const SourceModel& m, const Expr& e, std::ostringstream& out) {
  out << "(" << static_cast<int>(e.kind);
  switch (e.kind) {
    case ExprKind::IntLiteral: out << " " << e.int_value; break;
    case ExprKind::FloatLiteral: out << " " << e.float_value; break;
    case ExprKind::StringLiteral: out << " " << e.text; break;
    case ExprKind::Name: out << " " << m.symbol(e.symbol).name; break;
    case ExprKind::Unary: out << " " << to_string(e.unary_op); break;
    case ExprKind::Binary: out << " " << to_string(e.binary_op); break;
    case ExprKind::Cast: out << " " << e.cast_type.spelling() << (e.cast_type.pointer ? "*" : ""); break;
    default: break;
  }
  for (const auto& op : e.operands) {
    out << " ";
    sig_expr(m, *op, out);
  }
  out << ")";
}

void sig_type(const CType& t, std::ostringstream& out) {
  out << t.spelling() << (t.pointer ? "*" : "") << (t.function_pointer ? "fp" : "");
  if (t.array_size) out << "[" << *t.array_size << "]";
}

void sig_stmt(const SourceModel& m, const Stmt& s, std::ostringstream& out) {
  out << "{" << static_cast<int>(s.kind);
  if (s.kind == StmtKind::Decl) {
    const Symbol& sym = m.symbol(s.decl_symbol);
    out << " " << sym.name << ":";
    sig_type(sym.type, out);
    if (s.static_decl) out << " static";
  }
  for (const Expr* e : {s.target.get(), s.value.get(), s.cond.get()}) {
    out << " ";
    if (e) sig_expr(m, *e, out);
    else out << "-";
  }
  for (const auto& c : s.children) sig_stmt(m, *c, out);
  for (const Stmt* c : {s.init.get(), s.step.get(), s.then_branch.get(), s.else_branch.get(), s.body.get()}) {
    out << " ";
    if (c) sig_stmt(m, *c, out);
    else out << "-";
  }
  out << "}";
}

}  // namespace

std::string print_expr(const SourceModel& model, const Expr& e) { return Printer(model, nullptr).expr(e); }

std::string print_program(const SourceModel& model, const PrintFilter* filter) {
  std::ostringstream out;
  Printer(model, filter).program(out);
  return out.str();
}

std::string structure_signature(const SourceModel& model) {
  std::ostringstream out;
  for (const auto& g : model.globals) {
    const Symbol& s = model.symbol(g.symbol);
    out << "global " << s.name << ":";
    sig_type(s.type, out);
    if (g.init) sig_expr(model, *g.init, out);
    out << "\n";
  }
  for (const auto& f : model.functions) {
    const Symbol& s = model.symbol(f.symbol);
    out << "fn " << s.name << ":";
    sig_type(s.type, out);
    for (SymbolId p : f.params) {
      out << " " << model.symbol(p).name << ":";
      sig_type(model.symbol(p).type, out);
    }
    sig_stmt(model, *f.body, out);
    out << "\n";
  }
  return out.str();
}

}  // namespace vdgslice

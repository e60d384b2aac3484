#include <fstream>
#include <sstream>
#include <unordered_map>

#include "lexer.hpp"
#include "vdgslice/errors.hpp"
#include "vdgslice/frontend.hpp"

namespace vdgslice {
namespace {

using detail::Token;
using detail::TokKind;

enum class Storage { None, Static, Extern, Typedef };

struct DeclSpec {
  CType type;
  Storage storage = Storage::None;
};

struct Declarator {
  std::string name;
  CodePosition pos;
  CType type;
  bool is_function = false;
  std::vector<std::pair<std::string, CType>> params;
  std::vector<CodePosition> param_pos;
};

enum class Breakable { Loop, Switch };

class Parser {
 public:
  explicit Parser(SourceModel& model) : model_(model) {}

  void parse_file(FileId file) {
    file_ = file;
    toks_ = detail::tokenize(model_.files[file].text, file, model_.files[file].path);
    at_ = 0;
    file_statics_.clear();
    while (!peek_is_end()) parse_external_declaration();
  }

 private:
  // ---- token helpers ----
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(at_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  bool peek_is_end() const { return peek().kind == TokKind::End; }
  bool is_punct(const std::string& p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Punct && t.text == p;
  }
  bool is_word(const std::string& w, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Ident && t.text == w;
  }
  const Token& next() {
    const Token& t = toks_[at_];
    if (t.kind != TokKind::End) ++at_;
    return t;
  }
  bool accept(const std::string& p) {
    if (is_punct(p)) {
      ++at_;
      return true;
    }
    return false;
  }
  const Token& expect(const std::string& p) {
    if (!is_punct(p)) fail(peek(), "expected '" + p + "'");
    return next();
  }
  const Token& expect_ident() {
    if (peek().kind != TokKind::Ident || is_keyword(peek().text)) fail(peek(), "expected identifier");
    return next();
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::string got = t.kind == TokKind::End ? "end of file" : "'" + t.text + "'";
    throw ParseError(model_.format(t.pos) + ": " + msg + " (found " + got + ")");
  }
  [[noreturn]] void fail_at(const CodePosition& pos, const std::string& msg) const {
    throw ParseError(model_.format(pos) + ": " + msg);
  }

  static bool is_keyword(const std::string& w) {
    static const char* kw[] = {"void",   "char",   "short",    "int",      "long",    "float",  "double",
                               "signed", "unsigned", "const",  "volatile", "static",  "extern", "typedef",
                               "if",     "else",   "while",    "for",      "do",      "switch", "case",
                               "default", "break", "continue", "return",   "goto",    "struct", "union",
                               "enum",   "sizeof", "register", "inline",   "_Bool",   "auto"};
    for (const char* k : kw)
      if (w == k) return true;
    return false;
  }

  bool is_type_start(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    if (t.kind != TokKind::Ident) return false;
    static const char* starts[] = {"void",   "char",    "short",    "int",    "long",   "float",  "double",
                                   "signed", "unsigned", "const",   "volatile", "static", "extern", "typedef",
                                   "struct", "union",   "enum",     "register", "inline", "_Bool",  "auto"};
    for (const char* k : starts)
      if (t.text == k) return true;
    return typedefs_.count(t.text) && !shadowed_by_variable(t.text);
  }

  bool shadowed_by_variable(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (it->count(name)) return true;
    return false;
  }

  // ---- declarations ----
  std::optional<DeclSpec> parse_decl_specifiers() {
    if (!is_type_start()) return std::nullopt;
    DeclSpec spec;
    bool saw_base = false, saw_unsigned = false, saw_signed = false;
    int long_count = 0;
    bool saw_short = false, saw_char = false, saw_int = false;
    std::optional<BaseType> named;
    while (peek().kind == TokKind::Ident) {
      const Token& t = peek();
      const std::string& w = t.text;
      if (w == "const" || w == "volatile" || w == "register" || w == "inline" || w == "auto") {
        next();
      } else if (w == "static" || w == "extern" || w == "typedef") {
        if (spec.storage != Storage::None) fail(t, "multiple storage classes");
        spec.storage = w == "static" ? Storage::Static : w == "extern" ? Storage::Extern : Storage::Typedef;
        next();
      } else if (w == "struct" || w == "union" || w == "enum" || w == "_Bool") {
        fail(t, "'" + w + "' is outside the supported C subset");
      } else if (w == "unsigned") {
        saw_unsigned = true;
        next();
      } else if (w == "signed") {
        saw_signed = true;
        next();
      } else if (w == "long") {
        ++long_count;
        saw_base = true;
        next();
      } else if (w == "short") {
        saw_short = saw_base = true;
        next();
      } else if (w == "char") {
        saw_char = saw_base = true;
        next();
      } else if (w == "int") {
        saw_int = saw_base = true;
        next();
      } else if (w == "void" || w == "float" || w == "double") {
        named = w == "void" ? BaseType::Void : w == "float" ? BaseType::Float : BaseType::Double;
        saw_base = true;
        next();
      } else if (!saw_base && !saw_unsigned && !saw_signed && typedefs_.count(w) && !shadowed_by_variable(w)) {
        spec.type = typedefs_.at(w);
        saw_base = true;
        next();
        named.reset();
        // Typedef already carries signedness and width.
        while (is_word("const") || is_word("volatile")) next();
        return spec;
      } else {
        break;
      }
    }
    (void)saw_int;
    if (named) {
      spec.type.base = *named;
      if (*named == BaseType::Double && long_count) spec.type.base = BaseType::Double;
    } else if (saw_char) {
      spec.type.base = BaseType::Char;
    } else if (saw_short) {
      spec.type.base = BaseType::Short;
    } else if (long_count >= 2) {
      spec.type.base = BaseType::LongLong;
    } else if (long_count == 1) {
      spec.type.base = BaseType::Long;
    } else {
      spec.type.base = BaseType::Int;
    }
    spec.type.is_unsigned = saw_unsigned;
    return spec;
  }

  std::int64_t parse_constant_size() {
    ExprPtr e = parse_conditional();
    auto v = fold_constant(*e);
    if (!v || *v < 0) fail_at(e->pos, "array size must be a non-negative integer constant");
    return *v;
  }

  static std::optional<std::int64_t> fold_constant(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLiteral: return e.int_value;
      case ExprKind::Cast: return fold_constant(*e.operands[0]);
      case ExprKind::Unary: {
        auto v = fold_constant(*e.operands[0]);
        if (!v) return std::nullopt;
        switch (e.unary_op) {
          case UnaryOp::Neg: return -*v;
          case UnaryOp::Plus: return *v;
          case UnaryOp::Not: return !*v ? 1 : 0;
          case UnaryOp::BitNot: return ~*v;
        }
        return std::nullopt;
      }
      case ExprKind::Binary: {
        auto a = fold_constant(*e.operands[0]);
        auto b = fold_constant(*e.operands[1]);
        if (!a || !b) return std::nullopt;
        switch (e.binary_op) {
          case BinaryOp::Add: return *a + *b;
          case BinaryOp::Sub: return *a - *b;
          case BinaryOp::Mul: return *a * *b;
          case BinaryOp::Div: return *b ? std::optional<std::int64_t>(*a / *b) : std::nullopt;
          case BinaryOp::Mod: return *b ? std::optional<std::int64_t>(*a % *b) : std::nullopt;
          case BinaryOp::Shl: return *a << (*b & 63);
          case BinaryOp::Shr: return *a >> (*b & 63);
          case BinaryOp::BitAnd: return *a & *b;
          case BinaryOp::BitOr: return *a | *b;
          case BinaryOp::BitXor: return *a ^ *b;
          default: return std::nullopt;
        }
      }
      default: return std::nullopt;
    }
  }

  std::vector<std::pair<std::string, CType>> parse_param_list(std::vector<CodePosition>& positions) {
    std::vector<std::pair<std::string, CType>> params;
    expect("(");
    if (is_word("void") && is_punct(")", 1)) {
      next();
      next();
      return params;
    }
    if (accept(")")) return params;
    while (true) {
      auto spec = parse_decl_specifiers();
      if (!spec) fail(peek(), "expected parameter type");
      Declarator d = parse_declarator(spec->type, /*allow_abstract=*/true);
      if (d.is_function) fail_at(d.pos, "function parameters of function type are not supported");
      if (d.type.array_size) {  // arrays decay to pointers
        d.type.array_size.reset();
        d.type.pointer = true;
      }
      params.emplace_back(d.name, d.type);
      positions.push_back(d.pos);
      if (accept(")")) break;
      expect(",");
      if (is_punct("...")) fail(peek(), "variadic functions are not supported");
    }
    return params;
  }

  Declarator parse_declarator(const CType& base, bool allow_abstract = false) {
    Declarator d;
    d.type = base;
    if (accept("*")) {
      while (is_word("const") || is_word("volatile")) next();
      if (is_punct("*")) fail(peek(), "multi-level pointers are not supported");
      d.type.pointer = true;
    }
    if (is_punct("(") && is_punct("*", 1)) {
      // function pointer: T (*name)(params)
      next();
      next();
      const Token& name = expect_ident();
      d.name = name.text;
      d.pos = name.pos;
      expect(")");
      std::vector<CodePosition> ignored;
      parse_param_list(ignored);
      d.type.function_pointer = true;
      d.type.pointer = true;
      return d;
    }
    if (peek().kind == TokKind::Ident && !is_keyword(peek().text)) {
      const Token& name = next();
      d.name = name.text;
      d.pos = name.pos;
    } else if (!allow_abstract) {
      fail(peek(), "expected declarator name");
    } else {
      d.pos = peek().pos;
    }
    if (accept("[")) {
      if (accept("]")) {
        d.type.array_size = 0;
      } else {
        d.type.array_size = parse_constant_size();
        expect("]");
      }
      if (is_punct("[")) fail(peek(), "multi-dimensional arrays are not supported");
      if (d.type.pointer) fail_at(d.pos, "arrays of pointers are not supported");
    } else if (is_punct("(")) {
      d.is_function = true;
      d.params = parse_param_list(d.param_pos);
    }
    return d;
  }

  SymbolId add_symbol(Symbol s) {
    s.substance = static_cast<std::uint32_t>(model_.symbols.size());
    model_.symbols.push_back(std::move(s));
    return static_cast<SymbolId>(model_.symbols.size() - 1);
  }

  // Globals and functions with external linkage share one symbol across files.
  SymbolId declare_global(const Declarator& d, Storage storage, SymbolKind kind) {
    bool file_local = storage == Storage::Static;
    auto& table = file_local ? file_statics_ : linkage_;
    if (auto it = table.find(d.name); it != table.end()) {
      Symbol& s = model_.symbols[it->second];
      if (s.kind != kind) fail_at(d.pos, "'" + d.name + "' redeclared as a different kind of symbol");
      if (storage != Storage::Extern && kind != SymbolKind::Function) {
        s.external = false;
        s.decl_position = d.pos;
        s.type = d.type;
      }
      return it->second;
    }
    if (!file_local) {
      if (auto it = file_statics_.find(d.name); it != file_statics_.end()) return it->second;
    }
    Symbol s;
    s.name = d.name;
    s.kind = kind == SymbolKind::Global && file_local ? SymbolKind::Static : kind;
    s.type = d.type;
    s.decl_position = d.pos;
    s.external = storage == Storage::Extern || kind == SymbolKind::Function;
    SymbolId id = add_symbol(std::move(s));
    table[d.name] = id;
    return id;
  }

  void parse_external_declaration() {
    if (accept(";")) return;
    CodePosition start = peek().pos;
    auto spec = parse_decl_specifiers();
    if (!spec) {
      if (peek().kind == TokKind::Ident && is_punct("(", 1))
        fail(peek(), "function definitions need an explicit return type");
      fail(peek(), "expected a declaration");
    }
    if (accept(";")) return;
    bool first = true;
    while (true) {
      Declarator d = parse_declarator(spec->type);
      if (spec->storage == Storage::Typedef) {
        if (d.is_function) fail_at(d.pos, "function typedefs are not supported");
        typedefs_[d.name] = d.type;
        model_.units.push_back(Unit{UnitKind::Typedef, 0, file_});
      } else if (d.is_function) {
        SymbolId fn = declare_global(d, spec->storage, SymbolKind::Function);
        if (first && is_punct("{")) {
          parse_function_body(fn, d, start);
          return;
        }
        model_.units.push_back(Unit{UnitKind::Prototype, fn, file_});
      } else {
        if (d.type.base == BaseType::Void && !d.type.pointer) fail_at(d.pos, "variable of type void");
        SymbolId sym = declare_global(d, spec->storage, SymbolKind::Global);
        GlobalDecl g;
        g.symbol = sym;
        g.pos = start;
        if (accept("=")) {
          if (is_punct("{")) fail(peek(), "brace initializers are not supported");
          g.init = parse_expression_no_side_effects();
          model_.symbols[sym].external = false;
        }
        model_.units.push_back(Unit{UnitKind::Declaration, static_cast<std::uint32_t>(model_.globals.size()), file_});
        model_.globals.push_back(std::move(g));
      }
      first = false;
      if (accept(";")) return;
      expect(",");
    }
  }

  void parse_function_body(SymbolId fn, const Declarator& d, CodePosition start) {
    if (defined_.count(fn)) fail_at(d.pos, "redefinition of '" + d.name + "'");
    defined_.insert({fn, true});
    Symbol& fs = model_.symbols[fn];
    fs.external = false;
    fs.decl_position = d.pos;
    fs.type = d.type;
    FunctionDef def;
    def.symbol = fn;
    def.header_pos = start;
    def.name_pos = d.pos;
    current_fn_ = fn;
    scopes_.emplace_back();
    for (std::size_t k = 0; k < d.params.size(); ++k) {
      const auto& [pname, ptype] = d.params[k];
      if (pname.empty()) fail_at(d.param_pos[k], "parameter name required in a definition");
      Symbol s;
      s.name = pname;
      s.kind = SymbolKind::Parameter;
      s.type = ptype;
      s.decl_position = d.param_pos[k];
      s.function = fn;
      SymbolId pid = add_symbol(std::move(s));
      scopes_.back()[pname] = pid;
      def.params.push_back(pid);
    }
    def.body = parse_compound();
    def.end_pos = toks_[at_ - 1].pos;
    scopes_.pop_back();
    current_fn_ = kNoSymbol;
    model_.units.push_back(Unit{UnitKind::Function, static_cast<std::uint32_t>(model_.functions.size()), file_});
    model_.functions.push_back(std::move(def));
  }

  // ---- statements ----
  StmtPtr make_stmt(StmtKind kind, CodePosition pos) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->pos = pos;
    return s;
  }

  StmtPtr parse_compound() {
    const Token& open = expect("{");
    auto block = make_stmt(StmtKind::Block, open.pos);
    scopes_.emplace_back();
    while (!is_punct("}")) {
      if (peek_is_end()) fail(peek(), "unterminated block");
      parse_block_item(block->children);
    }
    next();
    scopes_.pop_back();
    return block;
  }

  void parse_block_item(std::vector<StmtPtr>& out) {
    if (is_type_start()) {
      parse_local_declaration(out);
      return;
    }
    out.push_back(parse_statement());
  }

  void parse_local_declaration(std::vector<StmtPtr>& out) {
    CodePosition start = peek().pos;
    auto spec = parse_decl_specifiers();
    if (spec->storage == Storage::Typedef) fail_at(start, "local typedefs are not supported");
    if (accept(";")) return;
    while (true) {
      Declarator d = parse_declarator(spec->type);
      if (d.is_function) {
        // local prototype
        SymbolId fn = declare_global(d, Storage::Extern, SymbolKind::Function);
        scopes_.back()[d.name] = fn;
      } else {
        if (d.type.base == BaseType::Void && !d.type.pointer) fail_at(d.pos, "variable of type void");
        Symbol s;
        s.name = d.name;
        s.kind = spec->storage == Storage::Static ? SymbolKind::Static : SymbolKind::Local;
        s.type = d.type;
        s.decl_position = d.pos;
        s.function = current_fn_;
        if (spec->storage == Storage::Extern) {
          SymbolId g = declare_global(d, Storage::Extern, SymbolKind::Global);
          scopes_.back()[d.name] = g;
        } else {
          if (scopes_.back().count(d.name)) fail_at(d.pos, "redeclaration of '" + d.name + "'");
          auto decl = make_stmt(StmtKind::Decl, d.pos);
          decl->static_decl = spec->storage == Storage::Static;
          if (accept("=")) {
            if (is_punct("{")) fail(peek(), "brace initializers are not supported");
            decl->value = parse_expression_no_side_effects();
          }
          SymbolId id = add_symbol(std::move(s));
          scopes_.back()[d.name] = id;
          decl->decl_symbol = id;
          out.push_back(std::move(decl));
        }
      }
      if (accept(";")) return;
      expect(",");
    }
  }

  StmtPtr parse_statement() {
    const Token& t = peek();
    if (t.kind == TokKind::Punct && t.text == "{") return parse_compound();
    if (t.kind == TokKind::Punct && t.text == ";") {
      next();
      return make_stmt(StmtKind::Empty, t.pos);
    }
    if (t.kind == TokKind::Ident) {
      const std::string& w = t.text;
      if (w == "if") return parse_if();
      if (w == "while") return parse_while();
      if (w == "do") return parse_do();
      if (w == "for") return parse_for();
      if (w == "switch") return parse_switch();
      if (w == "break") {
        CodePosition pos = next().pos;
        expect(";");
        if (breakables_.empty()) fail_at(pos, "'break' outside a loop or switch");
        if (breakables_.back() == Breakable::Switch) ++switch_breaks_;
        auto s = make_stmt(StmtKind::Break, pos);
        return s;
      }
      if (w == "continue") {
        CodePosition pos = next().pos;
        expect(";");
        bool in_loop = false;
        for (auto b : breakables_) in_loop = in_loop || b == Breakable::Loop;
        if (!in_loop) fail_at(pos, "'continue' outside a loop");
        return make_stmt(StmtKind::Continue, pos);
      }
      if (w == "return") {
        CodePosition pos = next().pos;
        auto s = make_stmt(StmtKind::Return, pos);
        if (!accept(";")) {
          s->value = parse_expression_no_side_effects();
          expect(";");
        }
        return s;
      }
      if (w == "goto") fail(t, "'goto' is outside the supported C subset");
      if (w == "case" || w == "default") fail(t, "case label outside switch");
      if (t.kind == TokKind::Ident && is_punct(":", 1) && !is_keyword(w))
        fail(t, "labels are outside the supported C subset");
    }
    auto s = parse_simple_statement();
    expect(";");
    return s;
  }

  // Assignment, compound assignment, increment or expression.
  StmtPtr parse_simple_statement() {
    CodePosition pos = peek().pos;
    if (is_punct("++") || is_punct("--")) {
      bool inc = next().text == "++";
      ExprPtr target = parse_unary();
      return make_increment(pos, std::move(target), inc);
    }
    ExprPtr lhs = parse_conditional();
    if (is_punct("++") || is_punct("--")) {
      bool inc = next().text == "++";
      return make_increment(pos, std::move(lhs), inc);
    }
    static const std::pair<const char*, BinaryOp> compound[] = {
        {"+=", BinaryOp::Add},    {"-=", BinaryOp::Sub},    {"*=", BinaryOp::Mul},   {"/=", BinaryOp::Div},
        {"%=", BinaryOp::Mod},    {"&=", BinaryOp::BitAnd}, {"|=", BinaryOp::BitOr}, {"^=", BinaryOp::BitXor},
        {"<<=", BinaryOp::Shl},   {">>=", BinaryOp::Shr},
    };
    if (is_punct("=")) {
      next();
      check_lvalue(*lhs);
      auto s = make_stmt(StmtKind::Assign, pos);
      s->target = std::move(lhs);
      s->value = parse_expression_no_side_effects();
      return s;
    }
    for (const auto& [text, op] : compound) {
      if (is_punct(text)) {
        const Token& optok = next();
        check_lvalue(*lhs);
        auto s = make_stmt(StmtKind::Assign, pos);
        auto bin = std::make_unique<Expr>();
        bin->kind = ExprKind::Binary;
        bin->binary_op = op;
        bin->pos = optok.pos;
        bin->operands.push_back(lhs->clone());
        bin->operands.push_back(parse_expression_no_side_effects());
        s->target = std::move(lhs);
        s->value = std::move(bin);
        return s;
      }
    }
    if (is_assignment_punct()) fail(peek(), "unsupported assignment operator");
    auto s = make_stmt(StmtKind::ExprStmt, pos);
    s->value = std::move(lhs);
    return s;
  }

  StmtPtr make_increment(CodePosition pos, ExprPtr target, bool inc) {
    check_lvalue(*target);
    auto s = make_stmt(StmtKind::Assign, pos);
    auto bin = std::make_unique<Expr>();
    bin->kind = ExprKind::Binary;
    bin->binary_op = inc ? BinaryOp::Add : BinaryOp::Sub;
    bin->pos = target->pos;
    bin->operands.push_back(target->clone());
    auto one = std::make_unique<Expr>();
    one->kind = ExprKind::IntLiteral;
    one->int_value = 1;
    one->text = "1";
    one->pos = target->pos;
    bin->operands.push_back(std::move(one));
    s->target = std::move(target);
    s->value = std::move(bin);
    return s;
  }

  void check_lvalue(const Expr& e) const {
    if (e.kind == ExprKind::Name) {
      const Symbol& s = model_.symbols[e.symbol];
      if (s.kind == SymbolKind::Function) fail_at(e.pos, "cannot assign to a function");
      if (s.type.is_array()) fail_at(e.pos, "cannot assign to a whole array");
      return;
    }
    if (e.kind == ExprKind::Index || e.kind == ExprKind::Deref) return;
    fail_at(e.pos, "expression is not assignable");
  }

  bool is_assignment_punct() const {
    const Token& t = peek();
    if (t.kind != TokKind::Punct) return false;
    return t.text == "=" || (t.text.size() >= 2 && t.text.back() == '=' && t.text != "==" && t.text != "!=" &&
                             t.text != "<=" && t.text != ">=");
  }

  ExprPtr parse_condition_in_parens() {
    expect("(");
    ExprPtr e = parse_expression_no_side_effects();
    expect(")");
    return e;
  }

  StmtPtr parse_if() {
    const Token& kw = next();
    auto s = make_stmt(StmtKind::If, kw.pos);
    s->cond = parse_condition_in_parens();
    s->then_branch = parse_statement();
    if (is_word("else")) {
      s->else_pos = next().pos;
      s->else_branch = parse_statement();
    }
    return s;
  }

  StmtPtr parse_while() {
    const Token& kw = next();
    auto s = make_stmt(StmtKind::While, kw.pos);
    s->cond = parse_condition_in_parens();
    breakables_.push_back(Breakable::Loop);
    s->body = parse_statement();
    breakables_.pop_back();
    return s;
  }

  StmtPtr parse_do() {
    const Token& kw = next();
    auto s = make_stmt(StmtKind::DoWhile, kw.pos);
    breakables_.push_back(Breakable::Loop);
    s->body = parse_statement();
    breakables_.pop_back();
    if (!is_word("while")) fail(peek(), "expected 'while' after do body");
    next();
    s->cond = parse_condition_in_parens();
    expect(";");
    return s;
  }

  StmtPtr parse_for() {
    const Token& kw = next();
    auto s = make_stmt(StmtKind::For, kw.pos);
    expect("(");
    scopes_.emplace_back();
    if (!accept(";")) {
      if (is_type_start()) {
        std::vector<StmtPtr> decls;
        parse_local_declaration(decls);
        if (decls.size() != 1) fail_at(kw.pos, "for-init must declare exactly one variable");
        s->init = std::move(decls.front());
      } else {
        s->init = parse_simple_statement();
        expect(";");
      }
    }
    if (!is_punct(";")) s->cond = parse_expression_no_side_effects();
    expect(";");
    if (!is_punct(")")) s->step = parse_simple_statement();
    expect(")");
    breakables_.push_back(Breakable::Loop);
    s->body = parse_statement();
    breakables_.pop_back();
    scopes_.pop_back();
    return s;
  }

  struct CaseGroup {
    std::vector<std::pair<ExprPtr, CodePosition>> labels;
    bool is_default = false;
    CodePosition pos;
    std::vector<StmtPtr> stmts;
  };

  StmtPtr parse_switch() {
    const Token& kw = next();
    ExprPtr subject = parse_condition_in_parens();
    if (contains_call(*subject)) fail_at(subject->pos, "switch subject with calls is not supported");
    expect("{");
    scopes_.emplace_back();
    std::vector<CaseGroup> groups;
    breakables_.push_back(Breakable::Switch);
    int saved_breaks = switch_breaks_;
    while (!is_punct("}")) {
      if (peek_is_end()) fail(peek(), "unterminated switch");
      if (is_word("case") || is_word("default")) {
        bool open_new = groups.empty() || !groups.back().stmts.empty();
        if (open_new) {
          if (!groups.empty()) close_case_group(groups.back(), false);
          groups.emplace_back();
          groups.back().pos = peek().pos;
          switch_breaks_ = 0;
        }
        const Token& label = next();
        if (label.text == "default") {
          groups.back().is_default = true;
        } else {
          ExprPtr v = parse_conditional();
          if (!fold_constant(*v)) fail_at(v->pos, "case label must be an integer constant");
          groups.back().labels.emplace_back(std::move(v), label.pos);
        }
        expect(":");
        continue;
      }
      if (groups.empty()) fail(peek(), "statement before first case label");
      parse_block_item(groups.back().stmts);
    }
    next();
    if (!groups.empty()) close_case_group(groups.back(), true);
    switch_breaks_ = saved_breaks;
    breakables_.pop_back();
    scopes_.pop_back();

    // Desugar to an if-chain; default becomes the trailing else.
    std::optional<std::size_t> default_group;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      if (groups[k].is_default) {
        if (!groups[k].labels.empty()) fail_at(groups[k].pos, "default shares statements with case labels");
        default_group = k;
      }
    }
    auto block_of = [&](CaseGroup& g) {
      auto b = make_stmt(StmtKind::Block, g.pos);
      b->children = std::move(g.stmts);
      return b;
    };
    std::uint32_t occurrence = 0;
    StmtPtr tail = default_group ? block_of(groups[*default_group]) : nullptr;
    std::optional<CodePosition> tail_pos;
    if (default_group) tail_pos = groups[*default_group].pos;
    for (std::size_t k = groups.size(); k-- > 0;) {
      if (default_group && k == *default_group) continue;
      CaseGroup& g = groups[k];
      auto s = make_stmt(StmtKind::If, g.pos);
      s->from_switch = true;
      ExprPtr cond;
      for (auto& [value, lpos] : g.labels) {
        auto eq = std::make_unique<Expr>();
        eq->kind = ExprKind::Binary;
        eq->binary_op = BinaryOp::Eq;
        eq->pos = subject->pos;
        eq->operands.push_back(clone_with_occurrence(*subject, occurrence++));
        eq->operands.push_back(std::move(value));
        if (!cond) {
          cond = std::move(eq);
        } else {
          auto orr = std::make_unique<Expr>();
          orr->kind = ExprKind::Binary;
          orr->binary_op = BinaryOp::LogOr;
          orr->pos = subject->pos;
          orr->operands.push_back(std::move(cond));
          orr->operands.push_back(std::move(eq));
          cond = std::move(orr);
        }
      }
      s->cond = std::move(cond);
      s->then_branch = block_of(g);
      if (tail) {
        s->else_branch = std::move(tail);
        s->else_pos = tail_pos;
      }
      tail_pos = g.pos;
      tail = std::move(s);
    }
    if (!tail) return make_stmt(StmtKind::Empty, kw.pos);
    // Occurrence numbering ran back to front; renumber in source order.
    renumber_switch_occurrences(*tail);
    tail->pos = kw.pos;
    return tail;
  }

  static void set_occurrence(Expr& e, std::uint32_t occ) {
    e.occurrence = occ;
    for (auto& op : e.operands) set_occurrence(*op, occ);
  }

  static ExprPtr clone_with_occurrence(const Expr& e, std::uint32_t occ) {
    ExprPtr c = e.clone();
    set_occurrence(*c, occ);
    return c;
  }

  static void collect_subject_copies(Expr& e, std::vector<Expr*>& out) {
    if (e.kind == ExprKind::Binary && e.binary_op == BinaryOp::LogOr) {
      collect_subject_copies(*e.operands[0], out);
      collect_subject_copies(*e.operands[1], out);
      return;
    }
    out.push_back(e.operands[0].get());
  }

  static void renumber_switch_occurrences(Stmt& chain) {
    std::uint32_t next_occ = 0;
    for (Stmt* s = &chain; s && s->kind == StmtKind::If && s->from_switch; s = s->else_branch.get()) {
      std::vector<Expr*> copies;
      collect_subject_copies(*s->cond, copies);
      for (Expr* c : copies) set_occurrence(*c, next_occ++);
      if (!s->else_branch) break;
    }
  }

  static bool contains_call(const Expr& e) {
    if (e.kind == ExprKind::Call) return true;
    for (const auto& op : e.operands)
      if (contains_call(*op)) return true;
    return false;
  }

  void close_case_group(CaseGroup& g, bool last) {
    bool ends_with_break = !g.stmts.empty() && g.stmts.back()->kind == StmtKind::Break;
    int allowed = ends_with_break ? 1 : 0;
    if (switch_breaks_ > allowed) fail_at(g.pos, "break nested inside a case body is not supported");
    if (!ends_with_break && !last && !g.stmts.empty())
      fail_at(g.pos, "fall-through between case groups is not supported");
    if (ends_with_break) g.stmts.pop_back();
  }

  // ---- expressions ----
  ExprPtr parse_expression_no_side_effects() {
    ExprPtr e = parse_conditional();
    if (is_assignment_punct() || is_punct("++") || is_punct("--"))
      fail(peek(), "side effects inside expressions are not supported");
    if (is_punct(",")) {
      // Only legal here as an argument/declarator separator; the caller checks.
    }
    return e;
  }

  ExprPtr parse_conditional() {
    ExprPtr c = parse_binary(0);
    if (is_punct("?")) {
      const Token& q = next();
      auto t = std::make_unique<Expr>();
      t->kind = ExprKind::Ternary;
      t->pos = q.pos;
      t->operands.push_back(std::move(c));
      t->operands.push_back(parse_expression_no_side_effects());
      expect(":");
      t->operands.push_back(parse_conditional());
      return t;
    }
    return c;
  }

  static std::optional<BinaryOp> binary_op_of(const Token& t) {
    if (t.kind != TokKind::Punct) return std::nullopt;
    static const std::unordered_map<std::string, BinaryOp> ops = {
        {"*", BinaryOp::Mul},     {"/", BinaryOp::Div},     {"%", BinaryOp::Mod},     {"+", BinaryOp::Add},
        {"-", BinaryOp::Sub},     {"<<", BinaryOp::Shl},    {">>", BinaryOp::Shr},    {"<", BinaryOp::Lt},
        {"<=", BinaryOp::Le},     {">", BinaryOp::Gt},      {">=", BinaryOp::Ge},     {"==", BinaryOp::Eq},
        {"!=", BinaryOp::Ne},     {"&", BinaryOp::BitAnd},  {"^", BinaryOp::BitXor},  {"|", BinaryOp::BitOr},
        {"&&", BinaryOp::LogAnd}, {"||", BinaryOp::LogOr},
    };
    auto it = ops.find(t.text);
    if (it == ops.end()) return std::nullopt;
    return it->second;
  }

  ExprPtr parse_binary(int min_prec) {
    ExprPtr lhs = parse_unary();
    while (true) {
      auto op = binary_op_of(peek());
      if (!op || precedence(*op) < min_prec) break;
      const Token& optok = next();
      ExprPtr rhs = parse_binary(precedence(*op) + 1);
      auto b = std::make_unique<Expr>();
      b->kind = ExprKind::Binary;
      b->binary_op = *op;
      b->pos = optok.pos;
      b->operands.push_back(std::move(lhs));
      b->operands.push_back(std::move(rhs));
      lhs = std::move(b);
    }
    return lhs;
  }

  ExprPtr unary(ExprKind kind, CodePosition pos, ExprPtr operand) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->pos = pos;
    e->operands.push_back(std::move(operand));
    return e;
  }

  std::int64_t size_of(const CType& t) const {
    if (t.pointer) return 8;
    std::int64_t elem = t.bit_width() / 8;
    return t.array_size ? elem * *t.array_size : elem;
  }

  ExprPtr parse_unary() {
    const Token& t = peek();
    if (t.kind == TokKind::Punct) {
      if (t.text == "++" || t.text == "--") fail(t, "side effects inside expressions are not supported");
      if (t.text == "-" || t.text == "+" || t.text == "!" || t.text == "~") {
        next();
        auto e = unary(ExprKind::Unary, t.pos, parse_unary());
        e->unary_op = t.text == "-" ? UnaryOp::Neg : t.text == "+" ? UnaryOp::Plus : t.text == "!" ? UnaryOp::Not : UnaryOp::BitNot;
        return e;
      }
      if (t.text == "*") {
        next();
        return unary(ExprKind::Deref, t.pos, parse_unary());
      }
      if (t.text == "&") {
        next();
        ExprPtr operand = parse_unary();
        if (operand->kind != ExprKind::Name && operand->kind != ExprKind::Index)
          fail_at(operand->pos, "address-of applies only to variables and array elements");
        return unary(ExprKind::AddressOf, t.pos, std::move(operand));
      }
      if (t.text == "(" && is_type_start(1)) {
        next();
        auto spec = parse_decl_specifiers();
        Declarator d = parse_declarator(spec->type, true);
        expect(")");
        auto e = unary(ExprKind::Cast, t.pos, parse_unary());
        e->cast_type = d.type;
        return e;
      }
    }
    if (is_word("sizeof")) {
      const Token& kw = next();
      std::int64_t size = 0;
      if (is_punct("(") && is_type_start(1)) {
        next();
        auto spec = parse_decl_specifiers();
        Declarator d = parse_declarator(spec->type, true);
        expect(")");
        size = size_of(d.type);
      } else {
        ExprPtr operand = parse_unary();
        if (operand->kind != ExprKind::Name) fail_at(operand->pos, "sizeof applies only to types and variables");
        size = size_of(model_.symbols[operand->symbol].type);
      }
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::IntLiteral;
      e->int_value = size;
      e->text = std::to_string(size);
      e->pos = kw.pos;
      return e;
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (true) {
      if (is_punct("[")) {
        const Token& open = next();
        auto idx = std::make_unique<Expr>();
        idx->kind = ExprKind::Index;
        idx->pos = open.pos;
        idx->operands.push_back(std::move(e));
        idx->operands.push_back(parse_expression_no_side_effects());
        expect("]");
        if (idx->operands[0]->kind != ExprKind::Name) fail_at(open.pos, "only named arrays may be indexed");
        e = std::move(idx);
      } else if (is_punct("(")) {
        const Token& open = next();
        auto call = std::make_unique<Expr>();
        call->kind = ExprKind::Call;
        call->pos = e->pos;
        (void)open;
        if (e->kind == ExprKind::Name && model_.symbols[e->symbol].kind == SymbolKind::Function)
          call->symbol = e->symbol;
        call->operands.push_back(std::move(e));
        if (!accept(")")) {
          while (true) {
            call->operands.push_back(parse_expression_no_side_effects());
            if (accept(")")) break;
            expect(",");
          }
        }
        e = std::move(call);
      } else if (is_punct(".") || is_punct("->")) {
        fail(peek(), "struct member access is outside the supported C subset");
      } else if (is_punct("++") || is_punct("--")) {
        return e;  // statement level handles these; nested use is rejected there
      } else {
        return e;
      }
    }
  }

  SymbolId resolve(const Token& name, bool is_call) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto f = it->find(name.text); f != it->end()) return f->second;
    }
    if (auto f = file_statics_.find(name.text); f != file_statics_.end()) return f->second;
    if (auto f = linkage_.find(name.text); f != linkage_.end()) return f->second;
    // Unresolved: an external the preprocessed input never declared.
    Symbol s;
    s.name = name.text;
    s.kind = is_call ? SymbolKind::Function : SymbolKind::Global;
    s.type = CType{};
    s.decl_position = name.pos;
    s.external = true;
    s.unresolved = true;
    SymbolId id = add_symbol(std::move(s));
    linkage_[name.text] = id;
    return id;
  }

  ExprPtr parse_primary() {
    const Token& t = next();
    auto e = std::make_unique<Expr>();
    e->pos = t.pos;
    e->text = t.text;
    switch (t.kind) {
      case TokKind::Int:
      case TokKind::Char:
        e->kind = ExprKind::IntLiteral;
        e->int_value = t.int_value;
        return e;
      case TokKind::Float:
        e->kind = ExprKind::FloatLiteral;
        e->float_value = t.float_value;
        return e;
      case TokKind::String:
        e->kind = ExprKind::StringLiteral;
        while (peek().kind == TokKind::String) e->text += " " + next().text;
        return e;
      case TokKind::Ident:
        if (is_keyword(t.text)) fail(t, "unexpected keyword in expression");
        e->kind = ExprKind::Name;
        e->symbol = resolve(t, is_punct("("));
        return e;
      case TokKind::Punct:
        if (t.text == "(") {
          ExprPtr inner = parse_expression_no_side_effects();
          expect(")");
          return inner;
        }
        fail(t, "expected an expression");
      case TokKind::End:
        fail(t, "unexpected end of input");
    }
    fail(t, "expected an expression");
  }

  SourceModel& model_;
  FileId file_ = 0;
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  std::vector<std::unordered_map<std::string, SymbolId>> scopes_;
  std::unordered_map<std::string, SymbolId> linkage_;
  std::unordered_map<std::string, SymbolId> file_statics_;
  std::unordered_map<std::string, CType> typedefs_;
  std::unordered_map<SymbolId, bool> defined_;
  std::vector<Breakable> breakables_;
  int switch_breaks_ = 0;
  SymbolId current_fn_ = kNoSymbol;
};

}  // namespace

SourceModel parse_buffers(std::vector<SourceBuffer> buffers) {
  SourceModel model;
  for (auto& b : buffers) {
    SourceFile f;
    f.path = std::move(b.path);
    f.text = std::move(b.text);
    f.logical_loc = count_logical_loc(f.text);
    f.line_count = static_cast<std::uint32_t>(std::count(f.text.begin(), f.text.end(), '\n'));
    if (!f.text.empty() && f.text.back() != '\n') ++f.line_count;
    model.files.push_back(std::move(f));
  }
  Parser parser(model);
  for (FileId id = 0; id < model.files.size(); ++id) parser.parse_file(id);
  model.index_statements();
  model.pointer_map = resolve_pointer_targets(model);
  return model;
}

SourceModel parse_sources(const std::vector<std::string>& paths) {
  std::vector<SourceBuffer> buffers;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParseError(p + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    buffers.push_back(SourceBuffer{p, ss.str()});
  }
  return parse_buffers(std::move(buffers));
}

}  // namespace vdgslice

#include <algorithm>
#include <functional>

#include "vdgslice/frontend.hpp"
#include "vdgslice/source_model.hpp"

namespace vdgslice {

int CType::bit_width() const {
  if (pointer) return 64;
  switch (base) {
    case BaseType::Char: return 8;
    case BaseType::Short: return 16;
    case BaseType::Int: return 32;
    case BaseType::Long: return 64;
    case BaseType::LongLong: return 64;
    case BaseType::Float: return 32;
    case BaseType::Double: return 64;
    case BaseType::Void: return 8;
  }
  return 32;
}

std::int64_t CType::min_value() const {
  int w = bit_width();
  if (is_unsigned || pointer) return 0;
  if (w >= 64) return INT64_MIN;
  return -(std::int64_t{1} << (w - 1));
}

std::int64_t CType::max_value() const {
  int w = bit_width();
  if (w >= 64) return INT64_MAX;  // 64-bit unsigned is clamped to the signed range
  if (is_unsigned || pointer) return (std::int64_t{1} << w) - 1;
  return (std::int64_t{1} << (w - 1)) - 1;
}

std::int64_t CType::truncate(std::int64_t v) const {
  int w = bit_width();
  if (w >= 64) return v;
  std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  std::uint64_t bits = static_cast<std::uint64_t>(v) & mask;
  if (is_unsigned) return static_cast<std::int64_t>(bits);
  std::uint64_t sign = std::uint64_t{1} << (w - 1);
  return bits & sign ? static_cast<std::int64_t>(bits | ~mask) : static_cast<std::int64_t>(bits);
}

std::string CType::spelling() const {
  std::string s = is_unsigned ? "unsigned " : "";
  switch (base) {
    case BaseType::Void: return "void";
    case BaseType::Char: return s + "char";
    case BaseType::Short: return s + "short";
    case BaseType::Int: return s + "int";
    case BaseType::Long: return s + "long";
    case BaseType::LongLong: return s + "long long";
    case BaseType::Float: return "float";
    case BaseType::Double: return "double";
  }
  return s + "int";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitXor: return "^";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
  }
  return "?";
}

std::string_view to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Plus: return "+";
    case UnaryOp::Not: return "!";
    case UnaryOp::BitNot: return "~";
  }
  return "?";
}

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 10;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 9;
    case BinaryOp::Shl:
    case BinaryOp::Shr: return 8;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 7;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 6;
    case BinaryOp::BitAnd: return 5;
    case BinaryOp::BitXor: return 4;
    case BinaryOp::BitOr: return 3;
    case BinaryOp::LogAnd: return 2;
    case BinaryOp::LogOr: return 1;
  }
  return 0;
}

ExprPtr Expr::clone() const {
  auto c = std::make_unique<Expr>();
  c->kind = kind;
  c->pos = pos;
  c->unary_op = unary_op;
  c->binary_op = binary_op;
  c->int_value = int_value;
  c->float_value = float_value;
  c->text = text;
  c->symbol = symbol;
  c->occurrence = occurrence;
  c->cast_type = cast_type;
  for (const auto& op : operands) c->operands.push_back(op->clone());
  return c;
}

std::optional<SymbolId> PointerMap::target_of(SymbolId pointer) const {
  auto it = targets.find(pointer);
  if (it == targets.end()) return std::nullopt;
  return it->second;
}

const FunctionDef* SourceModel::find_function(std::string_view name) const {
  for (const auto& f : functions)
    if (symbols[f.symbol].name == name) return &f;
  return nullptr;
}

const FunctionDef* SourceModel::function_of(SymbolId fn) const {
  auto it = function_index_.find(fn);
  if (it == function_index_.end()) return nullptr;
  return &functions[it->second];
}

std::optional<StmtId> SourceModel::stmt_at(const CodePosition& pos) const {
  auto it = stmt_by_pos_.find(pos);
  if (it == stmt_by_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<FileId> SourceModel::file_id(std::string_view path) const {
  for (FileId i = 0; i < files.size(); ++i)
    if (files[i].path == path) return i;
  // Fall back to a unique basename match.
  std::optional<FileId> found;
  for (FileId i = 0; i < files.size(); ++i) {
    std::string_view p = files[i].path;
    auto slash = p.find_last_of('/');
    std::string_view base = slash == std::string_view::npos ? p : p.substr(slash + 1);
    if (base == path) {
      if (found) return std::nullopt;
      found = i;
    }
  }
  return found;
}

std::string SourceModel::format(const CodePosition& pos) const {
  std::string file = pos.file < files.size() ? files[pos.file].path : "?";
  return file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

std::uint32_t SourceModel::total_logical_loc() const {
  std::uint32_t total = 0;
  for (const auto& f : files) total += f.logical_loc;
  return total;
}

void SourceModel::index_statements() {
  stmt_table_.clear();
  stmt_by_pos_.clear();
  function_index_.clear();
  for (std::uint32_t k = 0; k < functions.size(); ++k) {
    function_index_[functions[k].symbol] = k;
    index_stmt(*functions[k].body, kNoStmt, functions[k].symbol, 0);
  }
}

void SourceModel::index_stmt(const Stmt& s, StmtId parent, SymbolId fn, int loop_depth) {
  StmtId id = static_cast<StmtId>(stmt_table_.size());
  const_cast<Stmt&>(s).id = id;
  stmt_table_.push_back(StmtInfo{&s, parent, fn, loop_depth});
  // for-init/step share the head of their loop and are not separately addressable
  bool addressable = s.kind != StmtKind::Block &&
                     !(parent != kNoStmt && stmt_table_[parent].stmt->kind == StmtKind::For &&
                       (stmt_table_[parent].stmt->init.get() == &s || stmt_table_[parent].stmt->step.get() == &s));
  if (addressable) stmt_by_pos_.emplace(s.pos, id);
  bool is_loop = s.kind == StmtKind::While || s.kind == StmtKind::DoWhile || s.kind == StmtKind::For;
  int inner = loop_depth + (is_loop ? 1 : 0);
  for (const auto& c : s.children) index_stmt(*c, id, fn, loop_depth);
  if (s.init) index_stmt(*s.init, id, fn, loop_depth);
  if (s.step) index_stmt(*s.step, id, fn, inner);
  if (s.then_branch) index_stmt(*s.then_branch, id, fn, loop_depth);
  if (s.else_branch) index_stmt(*s.else_branch, id, fn, loop_depth);
  if (s.body) index_stmt(*s.body, id, fn, inner);
}

std::uint32_t count_logical_loc(std::string_view text) {
  std::uint32_t count = 0;
  bool in_block = false;
  bool has_code = false;
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      if (has_code) ++count;
      has_code = false;
      continue;
    }
    if (in_block) {
      if (c == '*' && i + 1 < text.size() && text[i + 1] == '/') {
        in_block = false;
        ++i;
      }
      continue;
    }
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i + 1 < text.size() && text[i + 1] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      in_block = true;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') continue;
    if (c == '"' || c == '\'') quote = c;
    has_code = true;
  }
  if (has_code) ++count;
  return count;
}

LocCount logical_loc(const SourceModel& model) {
  LocCount out;
  for (const auto& f : model.files) {
    out.per_file.push_back(f.logical_loc);
    out.total += f.logical_loc;
  }
  return out;
}

}  // namespace vdgslice

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vdgslice {

using FileId = std::uint32_t;
using SymbolId = std::uint32_t;
using StmtId = std::uint32_t;
inline constexpr SymbolId kNoSymbol = 0xffffffffu;
inline constexpr StmtId kNoStmt = 0xffffffffu;

/// Byte-based position; tabs count as one column.
struct CodePosition {
  FileId file = 0;
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  auto operator<=>(const CodePosition&) const = default;
};

enum class BaseType { Void, Char, Short, Int, Long, LongLong, Float, Double };

struct CType {
  BaseType base = BaseType::Int;
  bool is_unsigned = false;
  bool pointer = false;
  bool function_pointer = false;
  std::optional<std::int64_t> array_size;

  bool is_float() const { return !pointer && (base == BaseType::Float || base == BaseType::Double); }
  bool is_array() const { return array_size.has_value(); }
  bool is_integer_scalar() const { return !pointer && !function_pointer && !is_float() && base != BaseType::Void; }
  /// Width of the element type in bits (pointers are 64).
  int bit_width() const;
  std::int64_t min_value() const;
  std::int64_t max_value() const;
  /// Wraps `v` into the representable range of the element type.
  std::int64_t truncate(std::int64_t v) const;
  /// C spelling of the element type, without declarator decorations.
  std::string spelling() const;

  bool operator==(const CType&) const = default;
};

enum class SymbolKind { Global, Static, Local, Parameter, Function };

struct Symbol {
  std::string name;
  std::uint32_t substance = 0;
  SymbolKind kind = SymbolKind::Global;
  CType type;
  CodePosition decl_position;
  // Owning function for locals, parameters and function-scope statics.
  SymbolId function = kNoSymbol;
  // Declared but never defined here, or never declared at all.
  bool external = false;
  bool unresolved = false;

  bool is_shared() const { return kind == SymbolKind::Global || kind == SymbolKind::Static; }
};

enum class ExprKind {
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  Name,
  Unary,
  Binary,
  Ternary,
  Call,
  Index,
  Cast,
  AddressOf,
  Deref,
};

enum class UnaryOp { Neg, Plus, Not, BitNot };
enum class BinaryOp {
  Mul, Div, Mod, Add, Sub, Shl, Shr, Lt, Le, Gt, Ge, Eq, Ne, BitAnd, BitXor, BitOr, LogAnd, LogOr,
};

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);
int precedence(BinaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLiteral;
  CodePosition pos;
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  std::string text;             // literal spelling or identifier
  SymbolId symbol = kNoSymbol;  // Name: resolved symbol; Call: direct callee
  // Distinguishes copies of one source expression made by desugaring.
  std::uint32_t occurrence = 0;
  CType cast_type;
  // Unary/Deref/AddressOf/Cast: [0]; Binary/Index: [0],[1];
  // Ternary: cond, then, else; Call: callee, args...
  std::vector<ExprPtr> operands;

  ExprPtr clone() const;
};

enum class StmtKind { Assign, ExprStmt, Decl, If, While, DoWhile, For, Block, Break, Continue, Return, Empty };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  StmtKind kind = StmtKind::Empty;
  StmtId id = kNoStmt;
  CodePosition pos;
  ExprPtr target;  // Assign: lvalue
  ExprPtr value;   // Assign rhs, ExprStmt, Decl initializer, Return value
  ExprPtr cond;    // If/While/DoWhile/For (For: may be null)
  SymbolId decl_symbol = kNoSymbol;
  bool static_decl = false;
  std::vector<StmtPtr> children;  // Block
  StmtPtr then_branch;            // If
  StmtPtr else_branch;            // If (may be null)
  StmtPtr body;                   // loops
  StmtPtr init;                   // For
  StmtPtr step;                   // For
  std::optional<CodePosition> else_pos;
  bool from_switch = false;
};

struct FunctionDef {
  SymbolId symbol = kNoSymbol;
  std::vector<SymbolId> params;
  StmtPtr body;
  CodePosition header_pos;  // first token of the definition
  CodePosition name_pos;
  CodePosition end_pos;     // closing brace
};

struct GlobalDecl {
  SymbolId symbol = kNoSymbol;
  ExprPtr init;
  CodePosition pos;  // first token of the declaration
};

enum class UnitKind { Declaration, Function, Prototype, Typedef };

struct Unit {
  UnitKind kind = UnitKind::Declaration;
  std::uint32_t index = 0;  // into globals / functions; prototype: symbol id
  FileId file = 0;
};

struct SourceFile {
  std::string path;
  std::string text;
  std::uint32_t logical_loc = 0;
  std::uint32_t line_count = 0;
};

/// Pointer symbol -> its single pointed-to symbol; absent or nullopt means unknown.
struct PointerMap {
  std::map<SymbolId, std::optional<SymbolId>> targets;

  std::optional<SymbolId> target_of(SymbolId pointer) const;
};

struct StmtInfo {
  const Stmt* stmt = nullptr;
  StmtId parent = kNoStmt;  // enclosing statement, kNoStmt at function top
  SymbolId function = kNoSymbol;
  int loop_depth = 0;
};

class SourceModel {
 public:
  std::vector<SourceFile> files;
  std::vector<Unit> units;
  std::vector<Symbol> symbols;
  std::vector<GlobalDecl> globals;
  std::vector<FunctionDef> functions;
  PointerMap pointer_map;
  std::vector<std::string> warnings;

  const Symbol& symbol(SymbolId id) const { return symbols.at(id); }
  const FunctionDef* find_function(std::string_view name) const;
  const FunctionDef* function_of(SymbolId fn) const;
  const StmtInfo& stmt_info(StmtId id) const { return stmt_table_.at(id); }
  std::size_t stmt_count() const { return stmt_table_.size(); }
  /// Statement whose head is exactly `pos`, if any.
  std::optional<StmtId> stmt_at(const CodePosition& pos) const;
  std::optional<FileId> file_id(std::string_view path) const;
  std::string format(const CodePosition& pos) const;
  std::uint32_t total_logical_loc() const;

  /// Called once by the parser after all units are in place.
  void index_statements();

 private:
  void index_stmt(const Stmt& s, StmtId parent, SymbolId fn, int loop_depth);

  std::vector<StmtInfo> stmt_table_;
  std::map<CodePosition, StmtId> stmt_by_pos_;
  std::unordered_map<SymbolId, std::uint32_t> function_index_;
};

}  // namespace vdgslice

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vdgslice/source_model.hpp"

namespace vdgslice {

struct SourceBuffer {
  std::string path;
  std::string text;
};

/// Parses preprocessed C. Throws ParseError or PreprocessorDirectiveFound.
SourceModel parse_sources(const std::vector<std::string>& paths);
SourceModel parse_buffers(std::vector<SourceBuffer> buffers);

/// Single-target pointer resolution over every address assignment and
/// argument binding in the program. Pointers assigned inside loops, assigned
/// two distinct targets, or assigned anything but an address are unknown.
PointerMap resolve_pointer_targets(const SourceModel& model);

struct LocCount {
  std::vector<std::uint32_t> per_file;
  std::uint32_t total = 0;
};

/// Non-blank lines that hold something besides comments.
std::uint32_t count_logical_loc(std::string_view text);
LocCount logical_loc(const SourceModel& model);

/// Restricts printing to part of a program. Unset members keep everything.
struct PrintFilter {
  std::function<bool(const Stmt&)> keep_stmt;
  // Variables whose declaration is printed even when their declaring
  // statement is dropped (printed without initializer).
  std::function<bool(SymbolId)> declare;
  std::function<bool(SymbolId)> keep_function;
};

/// Renders the model back to C. Desugared constructs print in their
/// desugared form, so reparsing yields the same structure.
std::string print_program(const SourceModel& model, const PrintFilter* filter = nullptr);
std::string print_expr(const SourceModel& model, const Expr& e);

/// Canonical position-free rendering of the AST, used for structural comparison.
std::string structure_signature(const SourceModel& model);

}  // namespace vdgslice

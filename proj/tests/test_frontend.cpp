#include <doctest.h>

#include "fixtures.hpp"
#include "vdgslice/errors.hpp"
#include "vdgslice/frontend.hpp"

using namespace vdgslice;

namespace {

SymbolId symbol_named(const SourceModel& m, const std::string& name, SymbolKind kind) {
  for (SymbolId s = 0; s < m.symbols.size(); ++s)
    if (m.symbols[s].name == name && m.symbols[s].kind == kind) return s;
  return kNoSymbol;
}

}  // namespace

TEST_CASE("S1 parses into one file, three globals and one function") {
  SourceModel m = parse_buffers({{"s1.c", fixtures::read(fixtures::path("s1.c"))}});
  CHECK(m.files.size() == 1);
  CHECK(m.globals.size() == 3);
  CHECK(m.functions.size() == 1);
  CHECK(logical_loc(m).total == 8);
  CHECK(m.find_function("main_task") != nullptr);
}

TEST_CASE("an empty file has no units and no logical lines") {
  SourceModel m = parse_buffers({{"e.c", ""}});
  CHECK(m.units.empty());
  CHECK(logical_loc(m).total == 0);
}

TEST_CASE("a remaining preprocessor line is rejected") {
  CHECK_THROWS_AS(parse_buffers({{"p.c", "#include <x.h>\nint a;\n"}}), PreprocessorDirectiveFound);
}

TEST_CASE("syntax outside the subset raises ParseError") {
  CHECK_THROWS_AS(parse_buffers({{"b.c", "int f(void) { return 1 +; }\n"}}), ParseError);
}

TEST_CASE("logical lines skip blanks and comments") {
  CHECK(count_logical_loc("") == 0);
  CHECK(count_logical_loc("// a\n/* b\n c */\n\n   \n") == 0);
  CHECK(count_logical_loc("int a; // trailing\n/* x */ int b;\n\nint c;\n") == 3);
  CHECK(count_logical_loc("/* open\nstill */ int a;\n") == 1);
  CHECK(count_logical_loc("char *s = \"// not a comment\";\n") == 1);
}

TEST_CASE("single address-of assignment resolves the pointer") {
  SourceModel m = parse_buffers({{"p.c", "int x;\nint *p;\nvoid f(void) {\n  p = &x;\n  *p = 1;\n}\n"}});
  SymbolId p = symbol_named(m, "p", SymbolKind::Global);
  SymbolId x = symbol_named(m, "x", SymbolKind::Global);
  PointerMap pm = resolve_pointer_targets(m);
  REQUIRE(pm.target_of(p).has_value());
  CHECK(*pm.target_of(p) == x);
}

TEST_CASE("two distinct targets make the pointer unknown") {
  SourceModel m =
      parse_buffers({{"p.c", "int x, y;\nint *p;\nvoid f(void) {\n  p = &x;\n  p = &y;\n  *p = 1;\n}\n"}});
  CHECK_FALSE(resolve_pointer_targets(m).target_of(symbol_named(m, "p", SymbolKind::Global)).has_value());
}

TEST_CASE("pointers assigned inside loops are unknown") {
  SourceModel m = parse_buffers(
      {{"p.c", "int a[4];\nint *p;\nvoid f(void) {\n  int i;\n  for (i = 0; i < 4; i = i + 1) p = &a[i];\n}\n"}});
  CHECK_FALSE(resolve_pointer_targets(m).target_of(symbol_named(m, "p", SymbolKind::Global)).has_value());
}

TEST_CASE("a local shadowing a global is a distinct substance") {
  SourceModel m = parse_buffers({{"s.c", "int v;\nvoid f(void) {\n  int v;\n  v = 1;\n}\nvoid g(void) {\n  v = 2;\n}\n"}});
  SymbolId g = symbol_named(m, "v", SymbolKind::Global);
  SymbolId l = symbol_named(m, "v", SymbolKind::Local);
  REQUIRE(g != kNoSymbol);
  REQUIRE(l != kNoSymbol);
  CHECK(m.symbol(g).substance != m.symbol(l).substance);
}

TEST_CASE("parsing is deterministic and positions are one-based") {
  std::string text = fixtures::read(fixtures::path("s1.c"));
  SourceModel a = parse_buffers({{"s1.c", text}});
  SourceModel b = parse_buffers({{"s1.c", text}});
  CHECK(structure_signature(a) == structure_signature(b));
  CHECK(print_program(a) == print_program(b));
  CHECK(a.functions[0].name_pos.line == 2);
  CHECK(a.functions[0].name_pos.column == 6);
}

TEST_CASE("S1 pretty-prints and reparses to the same structure") {
  SourceModel m = parse_buffers({{"s1.c", fixtures::read(fixtures::path("s1.c"))}});
  SourceModel again = parse_buffers({{"s1.c", print_program(m)}});
  CHECK(structure_signature(again) == structure_signature(m));
}

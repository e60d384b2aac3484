#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "vdgslice/errors.hpp"
#include "vdgslice/promela.hpp"

using namespace vdgslice;

namespace {

SlicingCriteria single_root(const std::string& entry, const std::string& var, std::uint32_t line) {
  SlicingCriteria c;
  c.entry_points = {entry};
  c.roots = {RootSpec{var, "t.c", line}};
  return c;
}

PromelaModel emit_text(const std::string& text, const SlicingCriteria& c, const EmitOptions& o = {}) {
  auto a = fixtures::analyze_text(text, c.entry_points);
  return convert(compute_slice(a->vdg, a->model, c), a->model, c, o);
}

DataMapping status_map() { return DataMapping{"st", {{0, 15, "OK"}, {16, 255, "ERR"}}}; }

bool holds(BinaryOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::Eq: return a == b;
    default: return a != b;
  }
}

// Evaluates the comparison at every value 0..255 and groups results by name.
std::optional<std::vector<std::string>> enumerate(const DataMapping& m, BinaryOp op, std::int64_t k, bool left) {
  std::map<std::string, std::set<bool>> seen;
  std::vector<std::string> order;
  for (std::int64_t v = 0; v <= 255; ++v)
    for (const auto& r : m.map)
      if (v >= r.lo && v <= r.hi) {
        if (!seen.count(r.name)) order.push_back(r.name);
        seen[r.name].insert(left ? holds(op, v, k) : holds(op, k, v));
      }
  std::vector<std::string> out;
  for (const auto& n : order) {
    if (seen[n].size() == 2) return std::nullopt;
    if (*seen[n].begin()) out.push_back(n);
  }
  return out;
}

const char* kDiag =
    "unsigned char st;\nint err;\nvoid diag(void) {\n  if (st > 15)\n    err = 1;\n  else\n    err = 0;\n}\n";

}  // namespace

TEST_CASE("S1 with C1 emits exactly the golden model") {
  auto a = fixtures::analyze({"s1.c"}, {"main_task"});
  SlicingCriteria c = load_criteria(fixtures::path("c1.json"));
  PromelaModel m = convert(compute_slice(a->vdg, a->model, c), a->model, c);
  CHECK(m.text == fixtures::read(fixtures::path("g1.pml")));
  CHECK(m.processes.size() == 1);
  REQUIRE(m.env_skeleton.choices.size() == 1);
  CHECK(m.env_skeleton.choices[0].variable == "x");
  CHECK(m.env_skeleton.choices[0].alternatives == 256);
}

TEST_CASE("an empty slice still yields a cyclic process") {
  auto a = fixtures::analyze({"s1.c"}, {"main_task"});
  SlicingCriteria c = load_criteria(fixtures::path("c1.json"));
  c.roots.clear();
  PromelaModel m = convert(compute_slice(a->vdg, a->model, c), a->model, c);
  CHECK(m.env_skeleton.choices.empty());
  REQUIRE(m.processes.size() == 1);
  CHECK(m.text.find("active proctype main_task()") != std::string::npos);
  CHECK(m.text.find("skip") != std::string::npos);
  CHECK(m.text.find("byte x;") == std::string::npos);
}

TEST_CASE("floating point in the slice is unsupported") {
  CHECK_THROWS_AS(emit_text("float f;\nvoid t(void) {\n  f = 1.5;\n}\n", single_root("t", "f", 3)),
                  UnsupportedConstruct);
}

TEST_CASE("a comparison aligned with the map becomes an abstract test") {
  auto c = single_root("diag", "err", 5);
  c.data_maps.push_back(status_map());
  PromelaModel m = emit_text(kDiag, c);
  CHECK(m.text.find("mtype = { OK, ERR };") != std::string::npos);
  CHECK(m.text.find(":: (st == ERR) -> err = 1") != std::string::npos);
  CHECK(apply_data_mapping(status_map(), "st", BinaryOp::Gt, 15, true, "t.c:4:7") == "st == ERR");
  CHECK(apply_data_mapping(status_map(), "st", BinaryOp::Le, 15, true, "t.c:4:7") == "st == OK");
  CHECK(apply_data_mapping(status_map(), "st", BinaryOp::Ge, 0, true, "t.c:4:7") == "true");
}

TEST_CASE("a comparison splitting a range is rejected") {
  CHECK_THROWS_AS(mapped_predicate_names(status_map(), BinaryOp::Gt, 7, true, "t.c:4:7"), UnmappedPredicate);
  std::string text = kDiag;
  text.replace(text.find("15"), 2, "7");
  auto c = single_root("diag", "err", 5);
  c.data_maps.push_back(status_map());
  CHECK_THROWS_AS(emit_text(text, c), UnmappedPredicate);
}

TEST_CASE("predicate mapping agrees with enumeration over the byte domain") {
  std::mt19937_64 rng(7);
  const BinaryOp ops[] = {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne};
  for (int trial = 0; trial < 400; ++trial) {
    DataMapping m{"v", {}};
    std::int64_t lo = 0;
    int names = 1 + static_cast<int>(rng() % 4);
    while (lo <= 255) {
      std::int64_t hi = std::min<std::int64_t>(255, lo + static_cast<std::int64_t>(rng() % 90));
      m.map.push_back({lo, hi, "N" + std::to_string(rng() % names)});
      lo = hi + 1;
    }
    BinaryOp op = ops[rng() % 6];
    std::int64_t k = static_cast<std::int64_t>(rng() % 270) - 5;
    bool left = rng() % 2;
    auto expected = enumerate(m, op, k, left);
    INFO("trial " << trial);
    if (!expected) {
      CHECK_THROWS_AS(mapped_predicate_names(m, op, k, left, "here"), UnmappedPredicate);
    } else {
      auto got = mapped_predicate_names(m, op, k, left, "here");
      CHECK(std::set<std::string>(got.begin(), got.end()) ==
            std::set<std::string>(expected->begin(), expected->end()));
    }
  }
}

TEST_CASE("an identity map selects exactly the values satisfying the predicate") {
  DataMapping id{"st", {}};
  for (int v = 0; v <= 255; ++v) id.map.push_back({v, v, "V" + std::to_string(v)});
  auto names = mapped_predicate_names(id, BinaryOp::Gt, 15, true, "t.c:4:7");
  REQUIRE(names.size() == 240);
  CHECK(names.front() == "V16");
  CHECK(names.back() == "V255");
  auto c = single_root("diag", "err", 5);
  c.data_maps.push_back(id);
  PromelaModel m = emit_text(kDiag, c);
  CHECK(m.env_skeleton.choices.size() == 1);
  CHECK(m.env_skeleton.choices[0].alternatives == 256);
}

TEST_CASE("a two-value map gives a two-way environment choice") {
  auto a = fixtures::analyze_text("unsigned char y, z;\nvoid t(void) {\n  z = y;\n}\n", {"t"});
  auto c = single_root("t", "z", 3);
  c.data_maps.push_back(DataMapping{"y", {{0, 0, "ZERO"}, {1, 1, "ONE"}}});
  Slice s = compute_slice(a->vdg, a->model, c);
  EnvironmentSkeleton env = generate_env_skeleton(s.interfaces, a->model, c);
  REQUIRE(env.choices.size() == 1);
  CHECK(env.choices[0].alternatives == 2);
  CHECK(env.text().find("ZERO") != std::string::npos);
  CHECK(generate_env_skeleton({}, a->model, c).choices.empty());
}

TEST_CASE("a wide unmapped interface is unbounded") {
  CHECK_THROWS_AS(emit_text("int a, b;\nvoid t(void) {\n  b = a;\n}\n", single_root("t", "b", 3)), UnboundedInterface);
  auto c = single_root("t", "b", 3);
  c.data_maps.push_back(DataMapping{"a", {{-2147483648LL, -1, "NEG"}, {0, 2147483647LL, "NONNEG"}}});
  c.roots[0].line = 4;
  CHECK_NOTHROW(emit_text("int a, b;\nvoid t(void) {\n  if (a < 0)\n    b = 1;\n}\n", c));
}

TEST_CASE("a map not covering its variable's type is a schema error") {
  auto c = single_root("diag", "err", 5);
  c.data_maps.push_back(DataMapping{"st", {{0, 15, "OK"}}});
  CHECK_THROWS_AS(emit_text(kDiag, c), SchemaError);
}

TEST_CASE("model types use the narrowest covering width") {
  CType uc{BaseType::Char};
  uc.is_unsigned = true;
  CHECK(promela_type(uc) == "byte");
  CHECK(promela_type(CType{BaseType::Short}) == "short");
  CHECK(promela_type(CType{BaseType::Int}) == "int");
}

TEST_CASE("separate environment processes drive the interfaces") {
  auto a = fixtures::analyze({"s1.c"}, {"main_task"});
  SlicingCriteria c = load_criteria(fixtures::path("c1.json"));
  PromelaModel m = convert(compute_slice(a->vdg, a->model, c), a->model, c, EmitOptions{true});
  CHECK(m.processes.size() == 2);
  CHECK(m.text.find("active proctype env_main_task()") != std::string::npos);
  auto sw = m.text.find("active proctype main_task()");
  REQUIRE(sw != std::string::npos);
  CHECK(m.text.find("select", sw) == std::string::npos);
}

TEST_CASE("helper calls are inlined with prefixed locals") {
  PromelaModel m = emit_text(
      "int r;\nint h(int p) {\n  return p + 1;\n}\nvoid f(void) {\n  r = h(3);\n}\n", single_root("f", "r", 6));
  CHECK(m.text.find("h_") != std::string::npos);
  CHECK(m.text.find("    int h_1_p;\n    int h_1__ret;\n") != std::string::npos);
  CHECK(m.text.find("        h_1_p = 3;\n        h_1__ret = h_1_p + 1;\n        r = h_1__ret\n") != std::string::npos);
  CHECK(m.text.find("goto") == std::string::npos);
}

TEST_CASE("an early return jumps to the end of the inlined body") {
  PromelaModel m = emit_text(
      "unsigned char r;\nint h(int p) {\n  if (p > 2)\n    return 1;\n  return p;\n}\nvoid f(void) {\n  r = h(r);\n}\n",
      single_root("f", "r", 8));
  CHECK(m.text.find("goto h_1_end") != std::string::npos);
  CHECK(m.text.find("h_1_end:") != std::string::npos);
}

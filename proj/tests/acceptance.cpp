#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "interp.hpp"
#include "oracle.hpp"
#include "vdgslice/errors.hpp"

using namespace vdgslice;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o, bool blocking = true) {
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass && blocking) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome oracle_equivalence() {
  constexpr int kPrograms = 40;
  int matched = 0, multi_entry = 0;
  double fraction = 0;
  std::string first;
  for (int k = 0; k < kPrograms; ++k) {
    std::uint64_t seed = 1000 + k;
    auto p = corpus::desk_program(seed);
    auto a = fixtures::analyze_text(p.source, p.entries, p.file);
    auto roots = corpus::pick_roots(p, seed);
    Slice s = compute_slice(a->vdg, a->model, corpus::criteria_for(p, roots));
    if (s.statements == oracle::backward_slice(a->model, p.entries, roots)) {
      ++matched;
    } else if (first.empty()) {
      first = " first mismatch at seed " + std::to_string(seed);
    }
    if (p.entries.size() > 1) ++multi_entry;
    std::size_t heads = 0;
    for (StmtId id = 0; id < a->model.stmt_count(); ++id)
      heads += a->model.stmt_info(id).stmt->kind != StmtKind::Block;
    fraction += static_cast<double>(s.statements.size()) / static_cast<double>(heads);
  }
  return {matched == kPrograms, fmt("%.0f/%.0f programs match exactly (%.0f with several entries, mean slice %.0f%% of statements)",
                                    matched, kPrograms, multi_entry, 100 * fraction / kPrograms) + first};
}

Outcome weiser_check() {
  constexpr int kPrograms = 20;
  constexpr std::size_t kVectors = 1000;
  std::size_t mismatches = 0, values = 0;
  std::string first;
  for (int k = 0; k < kPrograms; ++k) {
    std::uint64_t seed = 2000 + k;
    auto p = corpus::desk_program(seed);
    auto a = fixtures::analyze_text(p.source, p.entries, p.file);
    auto c = corpus::criteria_for(p, corpus::pick_roots(p, seed));
    auto r = interp::weiser_check(a->model, c, compute_slice(a->vdg, a->model, c), kVectors, seed);
    mismatches += r.mismatches;
    values += r.root_values;
    if (r.mismatches && first.empty()) first = " first at seed " + std::to_string(seed) + " " + r.first_mismatch;
  }
  return {mismatches == 0 && values > 0,
          fmt("%.0f programs x %.0f vectors, %.0f mismatches, %.0f root values compared", kPrograms, kVectors,
              static_cast<double>(mismatches), static_cast<double>(values)) + first};
}

std::vector<std::string> interface_names(const Slice& s, const SourceModel& m) {
  std::vector<std::string> out;
  for (const auto& i : s.interfaces) out.push_back(m.symbol(i.symbol).name);
  return out;
}

Outcome fixture_s1() {
  auto a = fixtures::analyze({"s1.c"}, {"main_task"});
  SlicingCriteria c = load_criteria(fixtures::path("c1.json"));
  Slice full = compute_slice(a->vdg, a->model, c);
  SlicingCriteria cut = c;
  cut.cuts.push_back(CutSelector{"s1.c:9:9:y:p0:t811c9dc5:o0:u", "", ""});
  Slice part = compute_slice(a->vdg, a->model, cut);
  std::string model = convert(full, a->model, c).text;
  std::vector<std::string> problems;
  if (retained_lines(full, a->model, 0) != std::vector<std::uint32_t>{3, 4, 5, 7, 9}) problems.push_back("full lines");
  if (interface_names(full, a->model) != std::vector<std::string>{"x"}) problems.push_back("full interfaces");
  if (retained_lines(part, a->model, 0) != std::vector<std::uint32_t>{3, 9}) problems.push_back("cut lines");
  if (interface_names(part, a->model) != std::vector<std::string>{"y", "x"}) problems.push_back("cut interfaces");
  if (model != fixtures::read(fixtures::path("g1.pml"))) problems.push_back("model differs from golden");
  std::string detail = "lines {3,4,5,7,9} interfaces {x}; cut y@L9 lines {3,9} interfaces {y,x}; model equals golden"
                       " (golden syntax-checked by an independent Promela parser, not by SPIN)";
  if (!problems.empty()) {
    detail = "mismatch:";
    for (const auto& p : problems) detail += " " + p + ";";
  }
  return {problems.empty(), detail};
}

Outcome fixture_s2() {
  auto a = fixtures::analyze({"s2.c"}, {"task", "isr"});
  NodeIndex def = fixtures::node(*a, "s2.c:6:5:s:p1:t811c9dc5:o0:d");
  NodeIndex use = fixtures::node(*a, "s2.c:3:11:s:p0:t811c9dc5:o0:u");
  bool edge = false;
  for (auto e : a->vdg.in_edges(use))
    edge = edge || (a->vdg.edges[e].from == def && a->vdg.edges[e].cross_path && a->vdg.edges[e].kind == EdgeKind::Data);
  DepTree t = extract_goal_tree(a->vdg, fixtures::node(*a, "s2.c:3:5:out:p0:t811c9dc5:o0:d"));
  std::set<std::uint32_t> paths;
  for (const auto& n : t.nodes) paths.insert(a->vdg.nodes[n.vdg_node].path);
  return {edge && paths.size() == 2,
          std::string("isr->task cross-path edge ") + (edge ? "present" : "missing") + "; goal tree at out spans " +
              std::to_string(paths.size()) + " paths"};
}

struct Timing {
  std::uint32_t loc = 0;
  std::size_t nodes = 0, edges = 0, statements = 0;
  double seconds = 0;
};

Timing time_large(std::uint32_t loc, std::uint64_t seed) {
  auto p = corpus::large_program(seed, loc);
  auto start = Clock::now();
  auto a = fixtures::analyze_text(p.source, p.entries, p.file);
  Slice s = compute_slice(a->vdg, a->model, corpus::criteria_for(p, corpus::pick_roots(p, seed)));
  Timing t;
  t.seconds = seconds_since(start);
  t.loc = a->model.total_logical_loc();
  t.nodes = a->vdg.nodes.size();
  t.edges = a->vdg.edges.size();
  t.statements = s.statements.size();
  return t;
}

Outcome performance() {
  Timing t = time_large(100000, 1);
  return {t.loc >= 100000 && t.seconds < 300,
          fmt("%.0f logical LOC analyzed and sliced in %.1f s (limit 300 s), %.0f nodes, %.0f edges", t.loc, t.seconds,
              static_cast<double>(t.nodes), static_cast<double>(t.edges))};
}

Outcome stretch() {
  try {
    Timing t = time_large(350000, 2);
    return {t.loc >= 350000, fmt("%.0f logical LOC completed in %.1f s, %.0f nodes, %.0f edges", t.loc, t.seconds,
                                 static_cast<double>(t.nodes), static_cast<double>(t.edges))};
  } catch (const std::bad_alloc&) {
    return {false, "memory exhausted"};
  }
}

// Every rendered artifact of one program, from a fresh analysis.
std::string artifacts(const std::string& file, const std::string& text, const std::vector<std::string>& entries,
                      const SlicingCriteria& c, const std::optional<std::string>& cache) {
  auto a = vdgslice::analyze({{file, text}}, entries, cache);
  std::string out = write_vdg(a->vdg, a->model);
  for (const auto& root : c.roots) {
    for (NodeIndex n : resolve_root(a->vdg, a->model, root)) {
      try {
        DepTree t = extract_tree(a->vdg, n, root.direction, 100000);
        out += export_tree_text(t, a->vdg) + export_tree_text(fold_redundant(t), a->vdg);
      } catch (const TreeTooLarge& e) {
        out += e.what();
      }
    }
  }
  Slice s = compute_slice(a->vdg, a->model, c);
  out += render_slice_output(s, a->model) + sliced_source(s, a->model);
  try {
    out += convert(s, a->model, c).text;
  } catch (const UserError& e) {
    out += e.what();
  }
  return out;
}

Outcome determinism() {
  fs::path cache = fs::temp_directory_path() / ("vdgslice_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(cache);
  struct Case {
    std::string file, text;
    std::vector<std::string> entries;
    SlicingCriteria criteria;
  };
  std::vector<Case> cases;
  cases.push_back({"s1.c", fixtures::read(fixtures::path("s1.c")), {"main_task"}, load_criteria(fixtures::path("c1.json"))});
  SlicingCriteria c2;
  c2.entry_points = {"task", "isr"};
  c2.roots = {RootSpec{"out", "s2.c", 3}};
  cases.push_back({"s2.c", fixtures::read(fixtures::path("s2.c")), c2.entry_points, c2});
  for (int k = 0; k < 40; ++k) {
    auto p = corpus::desk_program(1000 + k);
    cases.push_back({p.file, p.source, p.entries, corpus::criteria_for(p, corpus::pick_roots(p, 1000 + k))});
  }
  std::size_t identical = 0;
  for (const auto& c : cases) {
    std::string first = artifacts(c.file, c.text, c.entries, c.criteria, std::nullopt);
    std::string second = artifacts(c.file, c.text, c.entries, c.criteria, std::nullopt);
    std::string stored = artifacts(c.file, c.text, c.entries, c.criteria, cache.string());
    std::string cached = artifacts(c.file, c.text, c.entries, c.criteria, cache.string());
    identical += first == second && first == stored && first == cached;
  }
  fs::remove_all(cache);
  return {identical == cases.size(),
          fmt("%.0f/%.0f programs give byte-identical trees, slices and models over fresh and cached runs",
              static_cast<double>(identical), static_cast<double>(cases.size()))};
}

}  // namespace

int main(int argc, char** argv) {
  bool with_stretch = !(argc > 1 && std::strcmp(argv[1], "--no-stretch") == 0);
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  report("oracle slice equivalence", guarded(oracle_equivalence));
  report("Weiser semantic check", guarded(weiser_check));
  report("fixture S1 end-to-end", guarded(fixture_s1));
  report("cross-path dependence", guarded(fixture_s2));
  report("performance", guarded(performance));
  report("determinism", guarded(determinism));
  if (with_stretch) report("performance stretch 350k (non-blocking)", guarded(stretch), false);
  return failures == 0 ? 0 : 1;
}

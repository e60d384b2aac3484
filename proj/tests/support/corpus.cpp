#include "corpus.hpp"

#include <algorithm>
#include <random>

#include "vdgslice/frontend.hpp"

namespace corpus {
namespace {

const char* const kArith[] = {"+", "-", "*", "&", "|", "^"};
const char* const kCompare[] = {"<", "<=", ">", ">=", "==", "!="};

struct Function {
  std::string name;
  bool returns_int = false;
  int params = 0;
  int layer = 0;
  int module = 0;
  bool entry = false;
};

class Generator {
 public:
  Generator(std::uint64_t seed, const GenOptions& o) : rng_(seed), o_(o) {}

  GeneratedProgram run() {
    declare_globals();
    plan_functions();
    for (std::size_t k = functions_.size(); k-- > 0;)
      if (!functions_[k].entry) emit_function(k);
    for (std::size_t k = 0; k < functions_.size(); ++k)
      if (functions_[k].entry) emit_function(k);
    for (const auto& l : lines_) out_.source += l + "\n";
    for (const auto& f : functions_)
      if (f.entry) out_.entries.push_back(f.name);
    return out_;
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  template <class T>
  const T& choose(const std::vector<T>& v) {
    return v[pick(static_cast<int>(v.size()))];
  }

  std::string prefix(int module) const { return o_.modules > 1 ? "m" + std::to_string(module) + "_" : ""; }

  void declare_globals() {
    globals_.resize(o_.modules);
    arrays_.resize(o_.modules);
    for (int m = 0; m < o_.modules; ++m) {
      for (int k = 0; k < o_.globals; ++k) {
        globals_[m].push_back(prefix(m) + "g" + std::to_string(k));
        lines_.push_back("unsigned char " + globals_[m].back() + ";");
      }
      for (int k = 0; k < o_.arrays; ++k) {
        arrays_[m].push_back(prefix(m) + "a" + std::to_string(k));
        lines_.push_back("unsigned char " + arrays_[m].back() + "[4];");
      }
    }
    if (o_.modules > 1) {
      for (int k = 0; k < 20; ++k) {
        shared_.push_back("sg" + std::to_string(k));
        lines_.push_back("unsigned char " + shared_.back() + ";");
      }
    }
    lines_.push_back("");
  }

  void plan_functions() {
    for (int m = 0; m < o_.modules; ++m) {
      for (int e = 0; e < o_.entries; ++e) {
        Function f;
        f.name = prefix(m) + "task" + std::to_string(e);
        f.entry = true;
        f.layer = -1;
        f.module = m;
        functions_.push_back(f);
      }
      int layers = std::max(o_.layers, 1);
      int per_layer = o_.layers > 0 ? std::max(1, o_.helpers / layers) : o_.helpers;
      for (int layer = 0; layer < layers; ++layer) {
        for (int h = 0; h < per_layer; ++h) {
          Function f;
          f.name = prefix(m) + "h" + std::to_string(layer * per_layer + h);
          f.returns_int = chance(0.6);
          f.params = pick(3);
          f.layer = o_.layers > 0 ? layer : 0;
          f.module = m;
          functions_.push_back(f);
        }
      }
    }
  }

  // ---- per-function state ----
  std::vector<std::string> callable(std::size_t self) const {
    std::vector<std::string> out;
    const Function& f = functions_[self];
    for (std::size_t k = 0; k < functions_.size(); ++k) {
      const Function& g = functions_[k];
      if (g.entry || g.module != f.module) continue;
      bool ok = o_.layers > 0 ? g.layer == f.layer + 1 : (f.entry || k > self);
      if (ok) out.push_back(g.name);
    }
    return out;
  }

  const Function& function_named(const std::string& name) const {
    return *std::find_if(functions_.begin(), functions_.end(), [&](const Function& f) { return f.name == name; });
  }

  std::string global_scalar() {
    if (!shared_.empty() && chance(o_.shared_use)) return choose(shared_);
    return choose(globals_[module_]);
  }

  std::vector<std::string> locals() const {
    std::vector<std::string> out;
    for (const auto& scope : scopes_) out.insert(out.end(), scope.begin(), scope.end());
    return out;
  }

  std::string readable() {
    auto l = locals();
    int r = pick(10);
    if (!counters_.empty() && r == 0) return choose(counters_);
    if (!l.empty() && r < 5) return choose(l);
    return global_scalar();
  }

  std::string array_ref(int depth) {
    return choose(arrays_[module_]) + "[(" + expr(depth + 1) + ") & 3]";
  }

  std::string expr(int depth = 0) {
    if (depth >= 2 || chance(0.45)) {
      int r = pick(10);
      if (r < 3) return std::to_string(pick(10));
      if (r == 3 && !arrays_[module_].empty() && depth < 2) return array_ref(depth);
      return readable();
    }
    return expr(depth + 1) + " " + kArith[pick(6)] + " " + expr(depth + 1);
  }

  std::string condition() {
    std::string c = expr(1) + " " + kCompare[pick(6)] + " " + expr(1);
    if (chance(0.15)) c += std::string(chance(0.5) ? " && " : " || ") + expr(1) + " " + kCompare[pick(6)] + " " + expr(1);
    return c;
  }

  void line(const std::string& text) { lines_.push_back(std::string(4 * indent_, ' ') + text); }
  std::uint32_t line_no() const { return static_cast<std::uint32_t>(lines_.size()); }

  void root_here(const std::string& var) {
    if (!functions_[self_].entry) return;
    out_.root_candidates.push_back(vdgslice::RootSpec{var, out_.file, line_no(), vdgslice::Direction::Goal});
  }

  std::string fresh(const char* stem) { return stem + std::to_string(fresh_++); }

  void assignment() {
    auto l = locals();
    int r = pick(10);
    std::string rhs = expr();
    if (r < 2 && !arrays_[module_].empty()) {
      line(array_ref(0) + " = " + rhs + ";");
      return;
    }
    std::string target = (!l.empty() && r < 5) ? choose(l) : global_scalar();
    line(target + " = " + rhs + ";");
    root_here(target);
  }

  void declaration() {
    std::string name = fresh("t");
    line("int " + name + " = " + expr() + ";");
    root_here(name);
    scopes_.back().push_back(name);
  }

  bool call_statement() {
    auto targets = callable(self_);
    if (targets.empty() || calls_left_ == 0) return false;
    --calls_left_;
    const Function& g = function_named(choose(targets));
    std::string args;
    for (int k = 0; k < g.params; ++k) args += (k ? ", " : "") + expr(1);
    std::string call = g.name + "(" + args + ")";
    if (g.returns_int && chance(0.8)) {
      auto l = locals();
      std::string target = (!l.empty() && chance(0.5)) ? choose(l) : global_scalar();
      line(target + " = " + call + ";");
      root_here(target);
    } else {
      line(call + ";");
    }
    return true;
  }

  void block(int count, int depth) {
    scopes_.emplace_back();
    for (int k = 0; k < count; ++k) statement(depth);
    scopes_.pop_back();
  }

  void statement(int depth) {
    int r = pick(100);
    bool nest = depth < o_.max_depth;
    if (r < 30) return assignment();
    if (r < 42) return declaration();
    if (r < 52 && call_statement()) return;
    if (nest && r < 66) {
      line("if (" + condition() + ") {");
      ++indent_;
      block(1 + pick(3), depth + 1);
      --indent_;
      if (chance(0.5)) {
        line("} else {");
        ++indent_;
        block(1 + pick(3), depth + 1);
        --indent_;
      }
      line("}");
      return;
    }
    if (nest && r < 76) {
      std::string i = fresh("i");
      line("int " + i + " = 0;");
      line("for (" + i + " = 0; " + i + " < " + std::to_string(1 + pick(3)) + "; " + i + " = " + i + " + 1) {");
      ++indent_;
      counters_.push_back(i);
      block(1 + pick(3), depth + 1);
      counters_.pop_back();
      --indent_;
      line("}");
      return;
    }
    if (nest && r < 86) {
      std::string n = fresh("n");
      line("int " + n + " = " + std::to_string(1 + pick(3)) + ";");
      line("while (" + n + " > 0) {");
      ++indent_;
      counters_.push_back(n);
      block(1 + pick(3), depth + 1);
      counters_.pop_back();
      line(n + " = " + n + " - 1;");
      --indent_;
      line("}");
      return;
    }
    if (nest && r < 94) {
      std::string n = fresh("n");
      line("int " + n + " = " + std::to_string(1 + pick(3)) + ";");
      line("do {");
      ++indent_;
      counters_.push_back(n);
      block(1 + pick(3), depth + 1);
      counters_.pop_back();
      line(n + " = " + n + " - 1;");
      --indent_;
      line("} while (" + n + " > 0);");
      return;
    }
    assignment();
  }

  void emit_function(std::size_t k) {
    const Function& f = functions_[k];
    self_ = k;
    module_ = f.module;
    fresh_ = 0;
    calls_left_ = o_.layers > 0 ? 2 : 3;
    scopes_.assign(1, {});
    counters_.clear();
    std::string params;
    for (int p = 0; p < f.params; ++p) {
      params += std::string(p ? ", " : "") + "int p" + std::to_string(p);
      scopes_[0].push_back("p" + std::to_string(p));
    }
    line(std::string(f.returns_int ? "int " : "void ") + f.name + "(" + (params.empty() ? "void" : params) + ") {");
    indent_ = 1;
    for (int s = 0; s < o_.statements; ++s) statement(0);
    if (f.returns_int) line("return " + expr() + ";");
    indent_ = 0;
    line("}");
    lines_.push_back("");
  }

  std::mt19937_64 rng_;
  GenOptions o_;
  GeneratedProgram out_;
  std::vector<std::string> lines_;
  std::vector<std::vector<std::string>> globals_, arrays_;
  std::vector<std::string> shared_;
  std::vector<Function> functions_;

  std::size_t self_ = 0;
  int module_ = 0;
  int fresh_ = 0;
  int indent_ = 0;
  int calls_left_ = 0;
  std::vector<std::vector<std::string>> scopes_;
  std::vector<std::string> counters_;
};

}  // namespace

GeneratedProgram generate_program(std::uint64_t seed, const GenOptions& options) {
  return Generator(seed, options).run();
}

GeneratedProgram desk_program(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  GenOptions o;
  o.entries = 1 + static_cast<int>(rng() % 3);
  o.helpers = 1 + static_cast<int>(rng() % 3);
  o.globals = 3 + static_cast<int>(rng() % 4);
  o.arrays = static_cast<int>(rng() % 2);
  o.statements = 6 + static_cast<int>(rng() % 6);
  for (;;) {
    GeneratedProgram p = generate_program(seed, o);
    if (vdgslice::count_logical_loc(p.source) <= static_cast<std::uint32_t>(o.max_loc) && !p.root_candidates.empty())
      return p;
    o.statements = std::max(2, o.statements - 2);
    o.max_depth = std::max(1, o.max_depth - (o.statements == 2 ? 1 : 0));
    ++seed;
  }
}

GeneratedProgram large_program(std::uint64_t seed, std::uint32_t loc) {
  GenOptions o;
  o.entries = 2;
  o.helpers = 6;
  o.layers = 3;
  o.globals = 10;
  o.arrays = 1;
  o.statements = 10;
  o.max_depth = 2;
  o.max_loc = 0;
  o.modules = 4;
  std::uint32_t sample = vdgslice::count_logical_loc(generate_program(seed, o).source);
  o.modules = std::max<int>(1, static_cast<int>(static_cast<double>(loc) * 4 / sample));
  for (;;) {
    GeneratedProgram p = generate_program(seed, o);
    std::uint32_t got = vdgslice::count_logical_loc(p.source);
    if (got >= loc) return p;
    o.modules = std::max(o.modules + 1, static_cast<int>(static_cast<double>(o.modules) * loc / got) + 1);
  }
}

vdgslice::SlicingCriteria criteria_for(const GeneratedProgram& p, std::vector<vdgslice::RootSpec> roots) {
  vdgslice::SlicingCriteria c;
  c.entry_points = p.entries;
  c.roots = std::move(roots);
  return c;
}

std::vector<vdgslice::RootSpec> pick_roots(const GeneratedProgram& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 31 + 7);
  std::vector<vdgslice::RootSpec> pool;
  std::size_t half = p.root_candidates.size() / 2;
  for (std::size_t k = half; k < p.root_candidates.size(); ++k) pool.push_back(p.root_candidates[k]);
  std::vector<vdgslice::RootSpec> out;
  out.push_back(pool[rng() % pool.size()]);
  if (rng() % 2 == 0) {
    const auto& extra = p.root_candidates[rng() % p.root_candidates.size()];
    if (!(extra == out[0])) out.push_back(extra);
  }
  return out;
}

}  // namespace corpus

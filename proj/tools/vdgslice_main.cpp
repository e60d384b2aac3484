#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vdgslice/errors.hpp"
#include "vdgslice/service.hpp"

using namespace vdgslice;

namespace {

constexpr int kUserError = 2;
constexpr int kInternalError = 1;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("IoError", "cannot write " + path);
  out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct Loaded {
  std::unique_ptr<Analysis> analysis;
  SlicingCriteria criteria;
};

std::unique_ptr<Analysis> load_analysis(const std::vector<std::string>& entries_override) {
  std::string cache = cache_directory();
  Project project = load_project(cache);
  const auto& entries = entries_override.empty() ? project.entries : entries_override;
  auto a = analyze(read_sources(project.sources), entries, cache);
  std::cerr << "cache: " << (a->cache_hit ? "hit" : "miss") << "\n";
  return a;
}

Loaded load_with_criteria(const std::string& criteria_path) {
  Loaded l;
  l.criteria = load_criteria(criteria_path);
  l.analysis = load_analysis(l.criteria.entry_points);
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-dependence-graph slicer for embedded C"};
  app.set_version_flag("--version", VDGSLICE_VERSION);
  app.require_subcommand(1);

  std::vector<std::string> entries, sources;
  auto* analyze_cmd = app.add_subcommand("analyze", "Parse sources, build the VDG and cache the project");
  analyze_cmd->add_option("--entry", entries, "Entry function (task or interrupt handler)")->expected(1, -1);
  analyze_cmd->add_option("sources", sources, "Preprocessed C files")->required();

  std::string root_text, direction_text = "goal";
  bool folded = false, grouped = false;
  auto* tree_cmd = app.add_subcommand("tree", "Print goal or start trees");
  tree_cmd->add_option("--root", root_text, "VAR@FILE:LINE")->required();
  tree_cmd->add_option("--direction", direction_text, "goal or start")->check(CLI::IsMember({"goal", "start"}));
  tree_cmd->add_flag("--folded", folded, "Fold redundant subtrees");
  tree_cmd->add_flag("--grouped", grouped, "List nodes gathered by function");

  std::string criteria_path, colors_path, sliced_path, out_path;
  std::vector<std::string> pickups;
  auto* slice_cmd = app.add_subcommand("slice", "Slice by a criteria file");
  slice_cmd->add_option("--criteria", criteria_path, "Criteria JSON")->required();
  slice_cmd->add_option("--colors", colors_path, "Write color annotations to FILE");
  slice_cmd->add_option("--sliced-c", sliced_path, "Write the sliced C program to FILE");
  slice_cmd->add_option("--pickup", pickups, "Add a statement at FILE:LINE:COL");

  bool env_separate = false;
  auto* emit_cmd = app.add_subcommand("emit", "Emit the Promela model of a slice");
  emit_cmd->add_option("--criteria", criteria_path, "Criteria JSON")->required();
  emit_cmd->add_option("--out", out_path, "Model file")->required();
  emit_cmd->add_flag("--env-separate", env_separate, "Environment choices in their own processes");

  auto* report_cmd = app.add_subcommand("report", "Summarize the cached project");
  report_cmd->add_option("--criteria", criteria_path, "Criteria JSON");

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "Serve the project to the UI over HTTP");
  serve_cmd->add_option("--port", port, "TCP port")->required();
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--criteria", criteria_path, "Criteria JSON edited by the UI");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUserError;
  }

  try {
    if (*analyze_cmd) {
      if (entries.empty()) throw UserError("UsageError", "at least one entry required");
      std::string cache = cache_directory();
      auto a = analyze(read_sources(sources), entries, cache);
      save_project(Project{sources, entries}, cache);
      std::cerr << "cache: " << (a->cache_hit ? "hit" : "miss") << "\n";
      print_warnings(a->vdg.warnings);
      std::cout << render_summary(*a, true);
    } else if (*tree_cmd) {
      auto a = load_analysis({});
      std::cout << render_trees(*a, parse_root_spec(root_text, *parse_direction(direction_text)), folded, grouped);
    } else if (*slice_cmd) {
      Loaded l = load_with_criteria(criteria_path);
      const SourceModel& model = l.analysis->model;
      Slice slice = compute_slice(l.analysis->vdg, model, l.criteria);
      if (!pickups.empty()) {
        std::vector<CodePosition> positions;
        for (const auto& p : pickups) {
          auto c2 = p.rfind(':');
          auto c1 = c2 == std::string::npos ? c2 : p.rfind(':', c2 - 1);
          auto file = c1 == std::string::npos ? std::nullopt : model.file_id(p.substr(0, c1));
          if (!file) throw NotOnRetainedPath(p + ": not a FILE:LINE:COL position in the project");
          try {
            positions.push_back(CodePosition{*file, static_cast<std::uint32_t>(std::stoul(p.substr(c1 + 1))),
                                             static_cast<std::uint32_t>(std::stoul(p.substr(c2 + 1)))});
          } catch (const std::logic_error&) {
            throw NotOnRetainedPath(p + ": not a FILE:LINE:COL position in the project");
          }
        }
        slice = pickup_statements(slice, model, positions);
      }
      print_warnings(slice.warnings);
      std::cout << render_slice_output(slice, model);
      if (!colors_path.empty()) write_text(colors_path, render_color_annotations(color_report(slice, model), model));
      if (!sliced_path.empty()) write_text(sliced_path, sliced_source(slice, model));
    } else if (*emit_cmd) {
      Loaded l = load_with_criteria(criteria_path);
      Slice slice = compute_slice(l.analysis->vdg, l.analysis->model, l.criteria);
      print_warnings(slice.warnings);
      PromelaModel m = convert(slice, l.analysis->model, l.criteria, EmitOptions{env_separate});
      write_text(out_path, m.text);
      std::cout << "model: " << out_path << "\n";
      std::cout << "processes: " << m.processes.size() << "\n";
      std::cout << "interfaces: " << slice.interfaces.size() << "\n";
    } else if (*report_cmd) {
      std::unique_ptr<Analysis> a;
      std::optional<SlicingCriteria> criteria;
      if (!criteria_path.empty()) {
        Loaded l = load_with_criteria(criteria_path);
        a = std::move(l.analysis);
        criteria = std::move(l.criteria);
      } else {
        a = load_analysis({});
      }
      std::cout << render_summary(*a, false);
      CallGraph cg = build_call_graph(a->model);
      std::cout << "# callgraph\n";
      for (const auto& e : cg.edges)
        std::cout << a->model.symbol(e.caller).name << " -> " << a->model.symbol(e.callee).name << " "
                  << a->model.format(e.pos) << "\n";
      if (criteria) std::cout << render_slice_output(compute_slice(a->vdg, a->model, *criteria), a->model);
    } else if (*serve_cmd) {
      std::string path = criteria_path;
      SlicingCriteria criteria;
      std::unique_ptr<Analysis> a;
      if (path.empty()) {
        path = (std::filesystem::path(cache_directory()) / "criteria.json").string();
        if (std::filesystem::exists(path)) criteria = load_criteria(path);
        a = load_analysis(criteria.entry_points);
        if (criteria.entry_points.empty()) criteria.entry_points = load_project(cache_directory()).entries;
      } else {
        criteria = load_criteria(path);
        a = load_analysis(criteria.entry_points);
      }
      Session session(std::move(a), std::move(criteria), path);
      std::cerr << "serving on http://" << host << ":" << port << "\n";
      if (!serve(session, host, port)) throw UserError("IoError", "cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return 0;
}

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vdgslice/errors.hpp"
#include "vdgslice/project.hpp"

namespace vdgslice {
namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
  }
  fs::rename(tmp, p);
}

}  // namespace

std::uint64_t content_hash(const std::vector<SourceBuffer>& sources, const std::vector<std::string>& entries) {
  std::string key = "vdgslice " VDGSLICE_VERSION "\n";
  for (const auto& e : entries) key += "entry " + e + "\n";
  for (const auto& s : sources) {
    key += "file " + s.path + " " + std::to_string(s.text.size()) + "\n";
    key += s.text;
  }
  return fnv1a64(key);
}

std::vector<SourceBuffer> read_sources(const std::vector<std::string>& paths) {
  std::vector<SourceBuffer> out;
  for (const auto& p : paths) {
    auto text = read_file(p);
    if (!text) throw ParseError(p + ": cannot open file");
    out.push_back(SourceBuffer{p, std::move(*text)});
  }
  return out;
}

std::string write_vdg(const Vdg& vdg, const SourceModel& model) {
  std::ostringstream out;
  out << "vdg " << vdg.nodes.size() << ' ' << vdg.edges.size() << ' ' << vdg.traces.size() << ' '
      << vdg.entries.size() << ' ' << vdg.warnings.size() << '\n';
  for (TraceId t = 1; t < vdg.traces.size(); ++t) {
    const StackFrame& f = vdg.traces.trace(t).back();
    const TraceInfo& info = vdg.trace_info[t];
    out << "t " << info.parent << ' ' << f.call_site.file << ' ' << f.call_site.line << ' ' << f.call_site.column << ' '
        << f.callee << ' ' << info.call_stmt << ' ' << info.callee << '\n';
  }
  for (SymbolId e : vdg.entries) out << "e " << e << '\n';
  for (const auto& w : vdg.warnings) out << "w " << w << '\n';
  for (const auto& n : vdg.nodes) {
    out << "n " << n.symbol << ' ' << n.substance << ' ' << n.pos.file << ' ' << n.pos.line << ' ' << n.pos.column
        << ' ' << n.path << ' ' << n.trace << ' ' << n.occurrence << ' ' << role_letter(n.role) << ' ' << n.stmt << ' '
        << n.function << ' ' << (n.entry_reached ? 1 : 0) << '\n';
  }
  for (const auto& e : vdg.edges)
    out << "g " << e.from << ' ' << e.to << ' ' << edge_letter(e.kind) << ' ' << (e.cross_path ? 1 : 0) << '\n';
  (void)model;
  return out.str();
}

Vdg read_vdg(std::string_view text, const SourceModel& model) {
  std::istringstream in{std::string(text)};
  auto fail = [] { throw std::runtime_error("corrupt VDG cache entry"); };
  std::string tag;
  std::size_t n_nodes = 0, n_edges = 0, n_traces = 0, n_entries = 0, n_warnings = 0;
  if (!(in >> tag >> n_nodes >> n_edges >> n_traces >> n_entries >> n_warnings) || tag != "vdg") fail();
  Vdg vdg;
  vdg.trace_info.resize(n_traces);
  for (TraceId t = 1; t < n_traces; ++t) {
    TraceInfo info;
    StackFrame f;
    if (!(in >> tag >> info.parent >> f.call_site.file >> f.call_site.line >> f.call_site.column >> f.callee >>
          info.call_stmt >> info.callee) ||
        tag != "t")
      fail();
    if (vdg.traces.push(info.parent, f) != t) fail();
    vdg.trace_info[t] = info;
  }
  for (std::size_t k = 0; k < n_entries; ++k) {
    SymbolId e;
    if (!(in >> tag >> e) || tag != "e") fail();
    vdg.entries.push_back(e);
  }
  in >> std::ws;
  for (std::size_t k = 0; k < n_warnings; ++k) {
    std::string line;
    std::getline(in, line);
    if (line.rfind("w ", 0) != 0) fail();
    vdg.warnings.push_back(line.substr(2));
  }
  vdg.nodes.resize(n_nodes);
  for (auto& n : vdg.nodes) {
    char role;
    int reached;
    if (!(in >> tag >> n.symbol >> n.substance >> n.pos.file >> n.pos.line >> n.pos.column >> n.path >> n.trace >>
          n.occurrence >> role >> n.stmt >> n.function >> reached) ||
        tag != "n")
      fail();
    n.role = role == 'd' ? NodeRole::Def : role == 'c' ? NodeRole::CondUse : NodeRole::Use;
    n.entry_reached = reached != 0;
    if (n.symbol >= model.symbols.size() || n.pos.file >= model.files.size()) fail();
  }
  vdg.edges.resize(n_edges);
  for (auto& e : vdg.edges) {
    char kind;
    int cross;
    if (!(in >> tag >> e.from >> e.to >> kind >> cross) || tag != "g") fail();
    if (e.from >= n_nodes || e.to >= n_nodes) fail();
    e.kind = kind == 'd' ? EdgeKind::Data : kind == 'a' ? EdgeKind::Assignment : EdgeKind::Control;
    e.cross_path = cross != 0;
  }
  vdg.finalize(model);
  return vdg;
}

std::unique_ptr<Analysis> analyze(std::vector<SourceBuffer> sources, const std::vector<std::string>& entries,
                                  const std::optional<std::string>& cache_dir) {
  auto start = std::chrono::steady_clock::now();
  auto a = std::make_unique<Analysis>();
  a->content_hash = content_hash(sources, entries);
  a->model = parse_buffers(std::move(sources));
  a->paths = enumerate_execution_paths(a->model, entries);
  fs::path cached;
  if (cache_dir) {
    cached = fs::path(*cache_dir) / ("vdg-" + hex64(a->content_hash) + ".txt");
    if (auto text = read_file(cached)) {
      try {
        a->vdg = read_vdg(*text, a->model);
        a->cache_hit = true;
      } catch (const std::runtime_error&) {
        a->vdg = Vdg{};
      }
    }
  }
  if (!a->cache_hit) {
    a->vdg = build_vdg(a->model, a->paths);
    a->vdg.finalize(a->model);
    if (cache_dir) write_file(cached, write_vdg(a->vdg, a->model));
  }
  a->elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return a;
}

std::string cache_directory() {
  if (const char* env = std::getenv("VDGSLICE_CACHE_DIR"); env && *env) return env;
  return ".vdgslice";
}

void save_project(const Project& project, const std::string& dir) {
  nlohmann::ordered_json j;
  j["sources"] = nlohmann::json::array();
  for (const auto& s : project.sources) j["sources"].push_back(fs::absolute(s).lexically_normal().string());
  j["display"] = project.sources;
  j["entries"] = project.entries;
  write_file(fs::path(dir) / "project.json", j.dump(2) + "\n");
}

Project load_project(const std::string& dir) {
  auto text = read_file(fs::path(dir) / "project.json");
  if (!text) throw UserError("NoProject", "no analyzed project in " + dir + " (run 'vdgslice analyze' first)");
  try {
    auto j = nlohmann::json::parse(*text);
    Project p;
    auto absolute = j.at("sources").get<std::vector<std::string>>();
    auto display = j.at("display").get<std::vector<std::string>>();
    // Display paths are kept when they still name the same file from here.
    for (std::size_t k = 0; k < absolute.size(); ++k) {
      bool same = k < display.size() && fs::absolute(display[k]).lexically_normal().string() == absolute[k];
      p.sources.push_back(same ? display[k] : absolute[k]);
    }
    p.entries = j.at("entries").get<std::vector<std::string>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw UserError("NoProject", "corrupt project file in " + dir + ": " + e.what());
  }
}

std::string render_summary(const Analysis& a, bool with_elapsed) {
  std::string out;
  out += "files: " + std::to_string(a.model.files.size()) + "\n";
  out += "logical_loc: " + std::to_string(a.model.total_logical_loc()) + "\n";
  out += "paths: " + std::to_string(a.paths.paths.size()) + "\n";
  out += "nodes: " + std::to_string(a.vdg.nodes.size()) + "\n";
  out += "edges: " + std::to_string(a.vdg.edges.size()) + "\n";
  if (with_elapsed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", a.elapsed_ms);
    out += std::string("elapsed_ms: ") + buf + "\n";
  }
  return out;
}

RootSpec parse_root_spec(const std::string& text, Direction direction) {
  auto at = text.find('@');
  auto colon = text.rfind(':');
  if (at == std::string::npos || colon == std::string::npos || colon < at || at == 0)
    throw SchemaError("root '" + text + "' is not of the form VAR@FILE:LINE");
  RootSpec r;
  r.variable = text.substr(0, at);
  r.file = text.substr(at + 1, colon - at - 1);
  try {
    std::size_t used = 0;
    unsigned long line = std::stoul(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || line == 0) throw std::invalid_argument("line");
    r.line = static_cast<std::uint32_t>(line);
  } catch (const std::exception&) {
    throw SchemaError("root '" + text + "' has no valid line number");
  }
  r.direction = direction;
  return r;
}

std::string render_trees(const Analysis& a, const RootSpec& root, bool folded, bool grouped) {
  std::string out;
  for (NodeIndex n : resolve_root(a.vdg, a.model, root)) {
    DepTree tree = extract_tree(a.vdg, n, root.direction);
    if (folded) tree = fold_redundant(tree);
    out += "# " + std::string(direction_name(root.direction)) + " tree " + a.vdg.nodes[n].id + " (" +
           std::to_string(tree.node_count()) + " nodes)\n";
    out += export_tree_text(tree, a.vdg);
    if (grouped) {
      GroupedTree g = gather_by_function(tree, a.vdg);
      for (std::size_t k = 0; k < g.groups.size(); ++k) {
        const auto& grp = g.groups[k];
        out += "group " + std::to_string(k) + " " + a.model.symbol(grp.function).name + " p" +
               std::to_string(grp.path) + " t" + a.vdg.traces.hash(a.model, grp.trace) + ":";
        for (auto m : grp.members) out += " " + std::to_string(m);
        out += "\n";
      }
      for (const auto& [from, to] : g.edges) out += "group-edge " + std::to_string(from) + " " + std::to_string(to) + "\n";
    }
  }
  return out;
}

std::string render_slice_output(const Slice& slice, const SourceModel& model) {
  std::string out = "# slice\n" + render_slice_report(slice, model);
  out += "# interfaces\n" + render_interface_table(slice, model);
  out += "# colors\n" + render_color_annotations(color_report(slice, model), model);
  return out;
}

}  // namespace vdgslice

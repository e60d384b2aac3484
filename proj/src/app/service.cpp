#include <thread>

#include <httplib.h>

#include "vdgslice/errors.hpp"
#include "vdgslice/service.hpp"

namespace vdgslice {

using ojson = nlohmann::ordered_json;

namespace {

Response error(int status, const std::string& kind, const std::string& message, std::uint64_t revision) {
  Response r;
  r.status = status;
  r.body["revision"] = revision;
  r.body["error"] = kind;
  r.body["message"] = message;
  return r;
}

ojson position_json(const SourceModel& model, const CodePosition& p) {
  return ojson{{"file", model.files.at(p.file).path}, {"line", p.line}, {"column", p.column}};
}

ojson tree_json(const DepTree& tree, const Vdg& vdg, const SourceModel& model) {
  ojson nodes = ojson::array();
  for (std::uint32_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& t = tree.nodes[k];
    const VdgNode& v = vdg.nodes[t.vdg_node];
    ojson n;
    n["index"] = k;
    n["id"] = v.id;
    n["variable"] = model.symbol(v.symbol).name;
    n["role"] = std::string(1, role_letter(v.role));
    n["edge"] = t.edge ? ojson(std::string(edge_name(*t.edge))) : ojson(nullptr);
    n["cross_path"] = false;
    if (t.parent != kNoTreeNode) {
      NodeIndex p = tree.nodes[t.parent].vdg_node;
      n["cross_path"] = vdg.nodes[p].path != v.path;
    }
    n["depth"] = t.depth;
    n["parent"] = t.parent == kNoTreeNode ? ojson(nullptr) : ojson(t.parent);
    n["children"] = t.children;
    n["marker"] = std::string(marker_name(t.marker));
    n["ref_target"] = t.ref_target == kNoTreeNode ? ojson(nullptr) : ojson(t.ref_target);
    n["anchor"] = position_json(model, v.pos);
    n["path"] = v.path;
    n["function"] = v.function == kNoSymbol ? "" : model.symbol(v.function).name;
    nodes.push_back(std::move(n));
  }
  return nodes;
}

}  // namespace

Session::Session(std::unique_ptr<Analysis> analysis, SlicingCriteria criteria, std::string criteria_path)
    : analysis_(std::move(analysis)), criteria_(std::move(criteria)), criteria_path_(std::move(criteria_path)) {
  recompute();
}

std::uint64_t Session::revision() const {
  std::shared_lock lock(mutex_);
  return revision_;
}

void Session::recompute() {
  slice_error_.reset();
  try {
    slice_ = compute_slice(analysis_->vdg, analysis_->model, criteria_);
  } catch (const UserError& e) {
    slice_ = Slice{};
    slice_error_ = e.what();
  }
}

ojson Session::slice_payload() const {
  const SourceModel& model = analysis_->model;
  ojson out;
  out["revision"] = revision_;
  out["report"] = render_slice_report(slice_, model);
  ojson lines = ojson::object();
  for (FileId f = 0; f < model.files.size(); ++f) lines[model.files[f].path] = retained_lines(slice_, model, f);
  out["retained_lines"] = lines;
  ojson ifaces = ojson::array();
  for (const auto& v : slice_.interfaces) {
    const Symbol& s = model.symbol(v.symbol);
    ojson i;
    i["name"] = s.name;
    i["type"] = s.type.spelling();
    i["origin"] = v.from_cut ? "cut" : "input";
    i["paths"] = v.paths;
    ojson pos = ojson::array();
    for (const auto& p : v.positions) pos.push_back(position_json(model, p));
    i["positions"] = pos;
    ifaces.push_back(std::move(i));
  }
  out["interfaces"] = ifaces;
  out["interface_table"] = render_interface_table(slice_, model);
  ColorClassification colors = color_report(slice_, model);
  ojson cls = ojson::object();
  for (FileId f = 0; f < model.files.size(); ++f) {
    ojson per = ojson::array();
    for (LineClass c : colors.lines[f]) per.push_back(std::string(line_class_name(c)));
    cls[model.files[f].path] = per;
  }
  out["colors"] = cls;
  out["color_annotations"] = render_color_annotations(colors, model);
  out["output"] = render_slice_output(slice_, model);
  out["warnings"] = slice_.warnings;
  out["error"] = slice_error_ ? ojson(*slice_error_) : ojson(nullptr);
  return out;
}

Response Session::get_tree(const std::string& root, const std::string& direction, bool folded) const {
  std::shared_lock lock(mutex_);
  const Vdg& vdg = analysis_->vdg;
  auto dir = parse_direction(direction.empty() ? "goal" : direction);
  if (!dir) return error(422, "SchemaError", "direction must be goal or start", revision_);
  std::vector<NodeIndex> roots;
  try {
    if (auto n = vdg.find(root)) roots.push_back(*n);
    else roots = resolve_root(vdg, analysis_->model, parse_root_spec(root, *dir));
  } catch (const UnknownNode& e) {
    return error(404, e.kind(), e.what(), revision_);
  } catch (const UserError& e) {
    return error(404, e.kind(), e.what(), revision_);
  }
  Response r;
  r.body["revision"] = revision_;
  r.body["direction"] = std::string(direction_name(*dir));
  r.body["folded"] = folded;
  r.body["trees"] = ojson::array();
  try {
    for (NodeIndex n : roots) {
      DepTree tree = extract_tree(vdg, n, *dir);
      if (folded) tree = fold_redundant(tree);
      ojson t;
      t["root"] = vdg.nodes[n].id;
      t["node_count"] = tree.node_count();
      t["nodes"] = tree_json(tree, vdg, analysis_->model);
      GroupedTree g = gather_by_function(tree, vdg);
      ojson groups = ojson::array();
      for (const auto& grp : g.groups)
        groups.push_back({{"function", analysis_->model.symbol(grp.function).name},
                          {"path", grp.path},
                          {"trace", vdg.traces.hash(analysis_->model, grp.trace)},
                          {"members", grp.members}});
      t["groups"] = groups;
      ojson gedges = ojson::array();
      for (const auto& [a, b] : g.edges) gedges.push_back({a, b});
      t["group_edges"] = gedges;
      t["text"] = export_tree_text(tree, vdg);
      r.body["trees"].push_back(std::move(t));
    }
  } catch (const TreeTooLarge& e) {
    return error(422, e.kind(), e.what(), revision_);
  }
  return r;
}

Response Session::get_callgraph() const {
  std::shared_lock lock(mutex_);
  const SourceModel& model = analysis_->model;
  CallGraph cg = build_call_graph(model);
  Response r;
  r.body["revision"] = revision_;
  ojson nodes = ojson::array();
  for (SymbolId f : cg.nodes) {
    ojson n;
    n["name"] = model.symbol(f).name;
    const FunctionDef* def = model.function_of(f);
    n["defined"] = def != nullptr;
    n["anchor"] = def ? position_json(model, def->name_pos) : ojson(nullptr);
    n["entry"] = std::find(analysis_->vdg.entries.begin(), analysis_->vdg.entries.end(), f) !=
                 analysis_->vdg.entries.end();
    n["in_slice"] = slice_.functions.count(f) > 0;
    nodes.push_back(std::move(n));
  }
  ojson edges = ojson::array();
  for (const auto& e : cg.edges)
    edges.push_back({{"caller", model.symbol(e.caller).name},
                     {"callee", model.symbol(e.callee).name},
                     {"site", position_json(model, e.pos)}});
  r.body["nodes"] = nodes;
  r.body["edges"] = edges;
  return r;
}

Response Session::get_source(const std::string& file) const {
  std::shared_lock lock(mutex_);
  const SourceModel& model = analysis_->model;
  auto id = model.file_id(file);
  if (!id) return error(404, "NotFound", "no analyzed file named '" + file + "'", revision_);
  const SourceFile& src = model.files[*id];
  ColorClassification colors = color_report(slice_, model);
  Response r;
  r.body["revision"] = revision_;
  r.body["file"] = src.path;
  ojson lines = ojson::array();
  std::size_t start = 0;
  for (std::uint32_t l = 0; l < src.line_count; ++l) {
    std::size_t end = src.text.find('\n', start);
    if (end == std::string::npos) end = src.text.size();
    lines.push_back({{"line", l + 1},
                     {"text", src.text.substr(start, end - start)},
                     {"class", std::string(line_class_name(colors.lines[*id][l]))}});
    start = end + 1;
  }
  r.body["lines"] = lines;
  ojson anchors = ojson::array();
  std::vector<NodeIndex> nodes;
  for (NodeIndex n = 0; n < analysis_->vdg.nodes.size(); ++n)
    if (analysis_->vdg.nodes[n].pos.file == *id) nodes.push_back(n);
  std::sort(nodes.begin(), nodes.end(), [&](NodeIndex a, NodeIndex b) { return analysis_->vdg.id_less(a, b); });
  for (NodeIndex n : nodes) {
    const VdgNode& v = analysis_->vdg.nodes[n];
    const std::string& name = model.symbol(v.symbol).name;
    anchors.push_back({{"id", v.id},
                       {"line", v.pos.line},
                       {"column", v.pos.column},
                       {"length", name.size()},
                       {"variable", name}});
  }
  r.body["anchors"] = anchors;
  return r;
}

Response Session::get_cuts() const {
  std::shared_lock lock(mutex_);
  Response r;
  r.body["revision"] = revision_;
  ojson cuts = ojson::array();
  for (const auto& c : criteria_.cuts) {
    if (c.by_node()) cuts.push_back({{"node", c.node}});
    else cuts.push_back({{"variable", c.variable}, {"function", c.function}});
  }
  r.body["cuts"] = cuts;
  return r;
}

Response Session::get_interfaces() const {
  std::shared_lock lock(mutex_);
  ojson p = slice_payload();
  Response r;
  r.body["revision"] = revision_;
  r.body["interfaces"] = p["interfaces"];
  r.body["interface_table"] = p["interface_table"];
  return r;
}

Response Session::put_cut(const std::string& selector_json) {
  std::unique_lock lock(mutex_);
  CutSelector sel;
  try {
    sel = parse_cut_selector(selector_json);
  } catch (const UserError& e) {
    return error(422, e.kind(), e.what(), revision_);
  }
  if (sel.by_node() && !analysis_->vdg.find(sel.node))
    return error(422, "UnknownNode", "UnknownNode: no node with id '" + sel.node + "'", revision_);
  Response r;
  std::vector<std::string> warnings;
  if (std::find(criteria_.cuts.begin(), criteria_.cuts.end(), sel) != criteria_.cuts.end()) {
    warnings.push_back("cut " + sel.describe() + " is already present");
  } else {
    criteria_.cuts.push_back(sel);
    ++revision_;
    recompute();
  }
  r.body = slice_payload();
  for (const auto& w : warnings) r.body["warnings"].push_back(w);
  return r;
}

Response Session::delete_cut(const std::string& selector_json) {
  std::unique_lock lock(mutex_);
  CutSelector sel;
  try {
    sel = parse_cut_selector(selector_json);
  } catch (const UserError& e) {
    return error(422, e.kind(), e.what(), revision_);
  }
  Response r;
  auto it = std::find(criteria_.cuts.begin(), criteria_.cuts.end(), sel);
  std::vector<std::string> warnings;
  if (it == criteria_.cuts.end()) {
    warnings.push_back("cut " + sel.describe() + " is not present");
  } else {
    criteria_.cuts.erase(it);
    ++revision_;
    recompute();
  }
  r.body = slice_payload();
  for (const auto& w : warnings) r.body["warnings"].push_back(w);
  return r;
}

Response Session::post_reslice() {
  std::unique_lock lock(mutex_);
  recompute();
  if (!criteria_path_.empty()) save_criteria(criteria_, criteria_path_);
  Response r;
  r.body = slice_payload();
  return r;
}

Response Session::post_emit(const std::string& options_json) const {
  std::shared_lock lock(mutex_);
  EmitOptions options;
  if (!options_json.empty()) {
    try {
      auto j = nlohmann::json::parse(options_json);
      if (!j.is_object()) throw SchemaError("$: expected an object");
      for (auto& [key, value] : j.items()) {
        if (key != "env_separate" || !value.is_boolean()) throw SchemaError("$." + key + ": unexpected member");
        options.env_separate = value.get<bool>();
      }
    } catch (const nlohmann::json::exception& e) {
      return error(422, "SchemaError", std::string("SchemaError: ") + e.what(), revision_);
    } catch (const UserError& e) {
      return error(422, e.kind(), e.what(), revision_);
    }
  }
  if (slice_error_) return error(422, "SliceError", *slice_error_, revision_);
  try {
    PromelaModel m = convert(slice_, analysis_->model, criteria_, options);
    Response r;
    r.body["revision"] = revision_;
    r.body["text"] = m.text;
    return r;
  } catch (const UserError& e) {
    return error(422, e.kind(), e.what(), revision_);
  }
}

struct HttpServer::Impl {
  Session& session;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Session& s) : session(s) {}

  static void reply(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(2) + "\n", "application/json");
  }

  template <class F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      reply(res, f());
    } catch (const std::exception& e) {
      Response r;
      r.status = 500;
      r.body["error"] = "InternalError";
      r.body["message"] = e.what();
      reply(res, r);
    }
  }

  void routes() {
    server.Get("/tree", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        bool folded = !req.has_param("folded") || req.get_param_value("folded") != "false";
        return session.get_tree(req.get_param_value("root"), req.get_param_value("direction"), folded);
      });
    });
    server.Get("/callgraph", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return session.get_callgraph(); });
    });
    server.Get(R"(/source/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return session.get_source(req.matches[1]); });
    });
    server.Get("/cuts", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return session.get_cuts(); });
    });
    server.Put("/cuts", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return session.put_cut(req.body); });
    });
    server.Delete("/cuts", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return session.delete_cut(req.body); });
    });
    server.Post("/reslice", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return session.post_reslice(); });
    });
    server.Get("/interfaces", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return session.get_interfaces(); });
    });
    server.Post("/emit", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return session.post_emit(req.body); });
    });
  }
};

HttpServer::HttpServer(Session& session) : impl_(std::make_unique<Impl>(session)) { impl_->routes(); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  int port = impl_->server.bind_to_any_port("127.0.0.1");
  if (port < 0) return -1;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

bool serve(Session& session, const std::string& host, int port) {
  HttpServer::Impl impl(session);
  impl.routes();
  return impl.server.listen(host, port);
}

}  // namespace vdgslice

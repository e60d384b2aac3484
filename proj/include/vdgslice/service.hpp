#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "vdgslice/project.hpp"

namespace vdgslice {

struct Response {
  int status = 200;
  nlohmann::ordered_json body;
};

/// One analyzed project plus the criteria being edited. Every mutation that
/// changes the criteria bumps the revision; every payload carries it.
class Session {
 public:
  Session(std::unique_ptr<Analysis> analysis, SlicingCriteria criteria, std::string criteria_path);

  /// `root` is a node id or VAR@FILE:LINE.
  Response get_tree(const std::string& root, const std::string& direction, bool folded) const;
  Response get_callgraph() const;
  Response get_source(const std::string& file) const;
  Response get_cuts() const;
  Response get_interfaces() const;
  Response put_cut(const std::string& selector_json);
  Response delete_cut(const std::string& selector_json);
  /// Re-slices with the current criteria and writes them to the criteria file.
  Response post_reslice();
  Response post_emit(const std::string& options_json) const;

  std::uint64_t revision() const;
  const Analysis& analysis() const { return *analysis_; }

 private:
  nlohmann::ordered_json slice_payload() const;
  void recompute();

  std::unique_ptr<Analysis> analysis_;
  SlicingCriteria criteria_;
  std::string criteria_path_;
  Slice slice_;
  std::optional<std::string> slice_error_;
  std::uint64_t revision_ = 0;
  mutable std::shared_mutex mutex_;
};

/// Serves the session over HTTP until `stop` is requested or the process ends.
/// Returns false when the address cannot be bound.
bool serve(Session& session, const std::string& host, int port);

class HttpServer {
 public:
  explicit HttpServer(Session& session);
  ~HttpServer();
  /// Binds to an ephemeral port on localhost and serves in a background thread.
  int start();
  void stop();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace vdgslice

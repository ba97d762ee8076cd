#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "dexp/depgraph.h"
#include "dexp/extlibs/bundle.h"
#include "dexp/preview.h"
#include "dexp/render.h"
#include "dexp/typecheck.h"

namespace dexp {

struct ServiceConfig {
  std::filesystem::path asset_dir;
  /// Per-preview evaluation budget; past it the preview is reported pending.
  std::chrono::milliseconds preview_budget{2000};
  RenderOptions render;
};

/// One editor session: text, caches and generation counter. All access goes
/// through Service, which serializes work per session.
struct Session {
  std::string id;
  std::shared_ptr<CountingLibrary> lib;
  LiveState live;
  PreviewCache previews;
  TypeCache types;

  std::string text;
  /// Generation of the latest edit handled.
  std::uint64_t generation = 0;
  /// Generation whose text was last bound without parse errors.
  std::uint64_t bound_generation = 0;
  std::optional<Rebound> bound;
  /// Highest generation announced, possibly not yet handled. Running
  /// previews stop once this passes their generation.
  std::atomic<std::uint64_t> announced{0};

  std::mutex work;
};

/// Request/response engine behind the wire protocol. Every message is
/// {kind, session, generation, payload}. Thread-safe.
class Service {
 public:
  explicit Service(ServiceConfig config = {});

  nlohmann::json handle(const nlohmann::json& request);
  /// Parses one text frame; malformed JSON gives an error response.
  std::string handle_text(std::string_view frame);

  /// Called as soon as a message arrives, before it is queued: an edit
  /// raises the session's announced generation so older in-flight previews
  /// stop early.
  void preannounce(const nlohmann::json& request);

  std::size_t session_count() const;
  /// Counting library of a session, for inspection.
  std::shared_ptr<CountingLibrary> session_library(const std::string& id) const;

 private:
  using json = nlohmann::json;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const LibrarySet> library_for(bool images, bool tables);

  json open(const json& req);
  json edit(Session& s, const json& req);
  json previews(Session& s, const json& req);
  json preview_at(Session& s, const json& req);
  json complete(Session& s, const json& req);
  json diagnostics(Session& s, const json& req);
  json stats(Session& s, const json& req);
  json eval(const json& req);

  /// Budgeted, cancellable evaluation of one vertex.
  json preview_json(Session& s, std::uint64_t generation, const Vertex& v);

  ServiceConfig config_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<const LibrarySet>> libraries_;
  std::uint64_t next_session_ = 1;
};

/// Protocol error thrown inside handlers; becomes an `error` response.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dexp

#include "dexp/service.h"

#include <algorithm>

namespace dexp {

using nlohmann::json;

namespace {

struct Superseded {};

json reply(const json& req, const json& payload) {
  return {{"kind", req.value("kind", "")},
          {"session", req.contains("session") ? req["session"] : json(nullptr)},
          {"generation",
           req.contains("generation") ? req["generation"] : json(nullptr)},
          {"payload", payload}};
}

json error_reply(const json& req, const std::string& message) {
  json out = {{"kind", "error"},
              {"session", nullptr},
              {"generation", nullptr},
              {"payload", {{"message", message}}}};
  if (req.is_object()) {
    if (req.contains("session")) out["session"] = req["session"];
    if (req.contains("generation")) out["generation"] = req["generation"];
    if (req.contains("kind") && req["kind"].is_string()) {
      out["payload"]["request"] = req["kind"];
    }
  }
  return out;
}

std::optional<std::uint64_t> non_negative(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  return std::nullopt;
}

const json& payload_of(const json& req) {
  static const json empty = json::object();
  auto it = req.find("payload");
  if (it == req.end() || it->is_null()) return empty;
  if (!it->is_object()) throw ProtocolError("payload must be an object");
  return *it;
}

std::size_t offset_of(const json& payload) {
  auto it = payload.find("offset");
  auto n = it == payload.end() ? std::nullopt : non_negative(*it);
  if (!n) throw ProtocolError("payload.offset must be a non-negative integer");
  return *n;
}

std::optional<std::uint64_t> generation_of(const json& req) {
  auto it = req.find("generation");
  if (it == req.end() || it->is_null()) return std::nullopt;
  auto n = non_negative(*it);
  if (!n) throw ProtocolError("generation must be a non-negative integer");
  return n;
}

json span_json(const Span& s) { return {{"start", s.begin}, {"end", s.end}}; }

json parse_errors_json(const Program& p) {
  json out = json::array();
  for (const auto& e : p.errors) {
    out.push_back({{"start", e.span.begin},
                   {"end", e.span.end},
                   {"location", e.location},
                   {"message", e.message}});
  }
  return out;
}

void announce(Session& s, std::uint64_t g) {
  std::uint64_t cur = s.announced.load();
  while (cur < g && !s.announced.compare_exchange_weak(cur, g)) {
  }
}

std::string library_key(bool images, bool tables) {
  return std::string(images ? "i" : "-") + (tables ? "t" : "-");
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}

std::size_t Service::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<CountingLibrary> Service::session_library(
    const std::string& id) const {
  auto s = find(id);
  return s ? s->lib : nullptr;
}

void Service::preannounce(const json& req) {
  if (!req.is_object() || req.value("kind", "") != "edit") return;
  auto sid = req.find("session");
  auto gen = req.find("generation");
  if (sid == req.end() || !sid->is_string()) return;
  auto g = gen == req.end() ? std::nullopt : non_negative(*gen);
  if (!g) return;
  auto s = find(sid->get<std::string>());
  if (!s) return;
  announce(*s, *g);
}

std::string Service::handle_text(std::string_view frame) {
  json req;
  try {
    req = json::parse(frame);
  } catch (const json::parse_error& e) {
    return error_reply(json(nullptr), std::string("malformed JSON: ") + e.what())
        .dump();
  }
  return handle(req).dump();
}

json Service::handle(const json& req) {
  try {
    if (!req.is_object()) throw ProtocolError("message must be a JSON object");
    auto kind_it = req.find("kind");
    if (kind_it == req.end() || !kind_it->is_string()) {
      throw ProtocolError("message needs a string `kind`");
    }
    const std::string kind = *kind_it;
    if (kind == "open") return open(req);
    if (kind == "eval") return eval(req);

    auto sid = req.find("session");
    if (sid == req.end() || !sid->is_string()) {
      throw ProtocolError(kind + " needs a session");
    }
    if (kind == "close") {
      std::lock_guard lock(mu_);
      if (!sessions_.erase(sid->get<std::string>())) {
        throw ProtocolError("unknown session " + sid->get<std::string>());
      }
      return reply(req, json::object());
    }
    auto s = find(*sid);
    if (!s) throw ProtocolError("unknown session " + sid->get<std::string>());

    std::lock_guard work(s->work);
    if (kind == "edit") return edit(*s, req);
    if (kind == "previews") return previews(*s, req);
    if (kind == "previewAt") return preview_at(*s, req);
    if (kind == "complete") return complete(*s, req);
    if (kind == "diagnostics") return diagnostics(*s, req);
    if (kind == "stats") return stats(*s, req);
    throw ProtocolError("unknown kind " + kind);
  } catch (const ProtocolError& e) {
    return error_reply(req, e.what());
  } catch (const json::exception& e) {
    return error_reply(req, std::string("bad message: ") + e.what());
  }
}

std::shared_ptr<const LibrarySet> Service::library_for(bool images,
                                                      bool tables) {
  std::lock_guard lock(mu_);
  auto& lib = libraries_[library_key(images, tables)];
  if (!lib) {
    LibraryConfig cfg;
    cfg.asset_dir = config_.asset_dir;
    cfg.with_images = images;
    cfg.with_tables = tables;
    lib = make_library(cfg);
  }
  return lib;
}

json Service::open(const json& req) {
  const json& p = payload_of(req);
  bool images = p.value("images", true);
  bool tables = p.value("tables", true);

  std::shared_ptr<const LibrarySet> base = library_for(images, tables);
  auto s = std::make_shared<Session>();
  {
    std::lock_guard lock(mu_);
    s->id = "s" + std::to_string(next_session_++);
    sessions_[s->id] = s;
  }
  s->lib = std::make_shared<CountingLibrary>(base);
  s->live.roots = s->lib->roots();

  json roots = json::array();
  for (const auto& [name, v] : s->live.roots) roots.push_back(name);
  return {{"kind", "open"},
          {"session", s->id},
          {"generation", 0},
          {"payload", {{"roots", roots}}}};
}

json Service::edit(Session& s, const json& req) {
  const json& p = payload_of(req);
  auto text = p.find("text");
  if (text == p.end() || !text->is_string()) {
    throw ProtocolError("edit needs payload.text");
  }
  std::uint64_t g = generation_of(req).value_or(s.generation + 1);
  json out = reply(req, json::object());
  out["generation"] = g;
  if (g <= s.generation) {
    out["payload"] = {{"superseded", true}, {"current", s.generation}};
    return out;
  }
  s.generation = g;
  announce(s, g);
  s.text = text->get<std::string>();

  Program parsed = parse(s.text);
  if (parsed.ok()) {
    s.bound = rebind(s.live, s.text);
    s.bound_generation = g;
  }
  out["payload"] = {{"ok", parsed.ok()},
                    {"parseErrors", parse_errors_json(parsed)},
                    {"commands", parsed.commands.size()},
                    {"boundGeneration", s.bound_generation}};
  return out;
}

json Service::preview_json(Session& s, std::uint64_t generation,
                           const Vertex& v) {
  EvalControl control;
  control.cancelled = [&s, generation] {
    return s.announced.load() > generation;
  };
  control.deadline = std::chrono::steady_clock::now() + config_.preview_budget;
  try {
    Preview p = eval_preview(v, s.bound->binding.graph, s.previews, *s.lib,
                             std::move(control));
    return render_preview(p, config_.render);
  } catch (const PreviewInterrupted& e) {
    if (!e.timed_out()) throw Superseded{};
    return {{"type", "pending"}};
  }
}

namespace {

/// Generation check shared by preview requests. Returns false when the
/// request is stale.
bool current_generation(const Session& s, std::uint64_t g) {
  if (g > s.generation) {
    throw ProtocolError("unknown generation " + std::to_string(g));
  }
  return g == s.generation && s.announced.load() <= g;
}

}  // namespace

json Service::previews(Session& s, const json& req) {
  std::uint64_t g = generation_of(req).value_or(s.generation);
  json out = reply(req, json::object());
  out["generation"] = g;
  if (!current_generation(s, g)) {
    out["payload"] = {{"superseded", true}};
    return out;
  }
  json items = json::array();
  if (s.bound) {
    const auto& cmds = s.bound->program.commands;
    const auto& vertices = s.bound->binding.command_vertices;
    try {
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        json item = {{"index", i}, {"preview", preview_json(s, g, vertices[i])}};
        item.update(span_json(cmds[i].span));
        if (cmds[i].let_name) item["let"] = *cmds[i].let_name;
        items.push_back(std::move(item));
      }
    } catch (const Superseded&) {
      out["payload"] = {{"superseded", true}};
      return out;
    }
  }
  out["payload"] = {{"previews", std::move(items)},
                    {"boundGeneration", s.bound_generation}};
  return out;
}

json Service::preview_at(Session& s, const json& req) {
  std::uint64_t g = generation_of(req).value_or(s.generation);
  std::size_t offset = offset_of(payload_of(req));
  json out = reply(req, json::object());
  out["generation"] = g;
  if (!current_generation(s, g)) {
    out["payload"] = {{"superseded", true}};
    return out;
  }
  json payload = {{"offset", offset},
                  {"preview", nullptr},
                  {"boundGeneration", s.bound_generation}};
  if (s.bound) {
    auto hit = node_at_cursor(s.bound->program, offset);
    if (hit) {
      auto it = s.bound->binding.expr_vertex.find(hit->expr);
      if (it != s.bound->binding.expr_vertex.end()) {
        try {
          payload["preview"] = preview_json(s, g, it->second);
        } catch (const Superseded&) {
          out["payload"] = {{"superseded", true}};
          return out;
        }
        payload.update(span_json(hit->expr->span));
        payload["expr"] = pretty(*hit->expr);
      }
    }
  }
  out["payload"] = std::move(payload);
  return out;
}

json Service::complete(Session& s, const json& req) {
  std::size_t offset = offset_of(payload_of(req));
  if (offset > s.text.size()) throw ProtocolError("offset past end of text");
  json items = json::array();
  for (const auto& [name, sig] :
       completions_in_text(s.text, offset, s.live, *s.lib)) {
    items.push_back({{"name", name}, {"signature", to_string(sig)}});
  }
  json out = reply(req, {{"offset", offset}, {"items", std::move(items)}});
  out["generation"] = s.generation;
  return out;
}

json Service::diagnostics(Session& s, const json& req) {
  json items = json::array();
  Program current = parse(s.text);
  for (const auto& e : current.errors) {
    items.push_back({{"start", e.span.begin},
                     {"end", e.span.end},
                     {"severity", "error"},
                     {"message", e.message}});
  }
  if (s.bound && s.bound_generation == s.generation) {
    for (const auto& d :
         check_program(s.bound->program, s.bound->binding, *s.lib, s.types)) {
      items.push_back({{"start", d.span.begin},
                       {"end", d.span.end},
                       {"severity", d.severity},
                       {"message", d.message}});
    }
  }
  std::stable_sort(items.begin(), items.end(), [](const json& a, const json& b) {
    return a["start"].get<std::size_t>() < b["start"].get<std::size_t>();
  });
  json out = reply(req, {{"diagnostics", std::move(items)}});
  out["generation"] = s.generation;
  return out;
}

json Service::stats(Session& s, const json& req) {
  json calls = json::object();
  for (const auto& [m, n] : s.lib->snapshot()) calls[m] = n;
  json out = reply(req, {{"generation", s.generation},
                         {"boundGeneration", s.bound_generation},
                         {"nodeCache", s.live.cache.size()},
                         {"previewCache", s.previews.size()},
                         {"typeCache", s.types.size()},
                         {"calls", std::move(calls)}});
  out["generation"] = s.generation;
  return out;
}

json Service::eval(const json& req) {
  const json& p = payload_of(req);
  auto text = p.find("text");
  if (text == p.end() || !text->is_string()) {
    throw ProtocolError("eval needs payload.text");
  }
  auto base = library_for(p.value("images", true), p.value("tables", true));
  LiveState live;
  live.roots = base->roots();
  Rebound r = rebind(live, text->get<std::string>());
  PreviewCache cache;
  json values = json::array();
  for (auto& [i, preview] : command_previews(r.binding, cache, *base)) {
    values.push_back(render_preview(preview, config_.render));
  }
  return reply(req, {{"values", std::move(values)},
                     {"parseErrors", parse_errors_json(r.program)}});
}

}  // namespace dexp

#include "dexp/harness.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dexp/depgraph.h"
#include "dexp/extlibs/lazy_image.h"
#include "dexp/preview.h"
#include "dexp/refeval.h"
#include "dexp/syntax.h"

namespace dexp {

using nlohmann::json;

EditScript EditScript::from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("edit script must be a JSON array");
  EditScript s;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string()) {
      throw std::runtime_error("edit step needs a string field `text`");
    }
    EditStep step{item["text"].get<std::string>(), {}};
    if (item.contains("label") && !item["label"].is_null()) {
      if (!item["label"].is_string()) {
        throw std::runtime_error("edit step `label` must be a string");
      }
      step.label = item["label"].get<std::string>();
    }
    s.steps.push_back(std::move(step));
  }
  return s;
}

EditScript EditScript::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
  return from_json(j);
}

json EditScript::to_json() const {
  json out = json::array();
  for (const auto& s : steps) {
    json item = {{"text", s.text}};
    if (!s.label.empty()) item["label"] = s.label;
    out.push_back(std::move(item));
  }
  return out;
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCbv: return "cbv";
    case Strategy::kLazy: return "lazy";
    case Strategy::kLive: return "live";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "cbv") return Strategy::kCbv;
  if (name == "lazy") return Strategy::kLazy;
  if (name == "live") return Strategy::kLive;
  return std::nullopt;
}

const std::vector<std::string>& image_members() {
  static const std::vector<std::string> names = {"load", "greyScale", "blur",
                                                 "combine"};
  return names;
}

std::size_t image_calls(const StepReport& r) {
  std::size_t n = 0;
  for (const auto& m : image_members()) {
    auto it = r.calls.find(m);
    if (it != r.calls.end()) n += it->second;
  }
  return n;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct LiveRun {
  LiveState state;
  PreviewCache previews;
};

std::vector<Value> run_cbv(const Program& p, const TypedLibrary& lib) {
  return ReferenceEvaluator(lib).run(p).values;
}

std::vector<Value> run_lazy(const Program& p,
                            const std::shared_ptr<CountingLibrary>& counter) {
  LazyImageLibrary lazy(counter);
  ReferenceEvaluator ev(lazy);
  std::vector<Value> values = ev.run(p).values;
  ApplyFn apply = [&](const Value& c, const Value& a) {
    return ev.apply_closure(c, a);
  };
  for (auto& v : values) v = lazy.force(v, apply);
  return values;
}

std::vector<Value> run_live(const Program& p, LiveRun& live,
                            const TypedLibrary& lib) {
  Binding b = bind_prog(p, live.state.cache, live.state.symbols, live.state.roots);
  update_cache_in_place(live.state.cache, b.graph);
  std::vector<Value> values;
  for (auto& [i, preview] : command_previews(b, live.previews, lib)) {
    values.push_back(preview.is_evaluated()
                         ? preview.value()
                         : Value::bottom("preview needs " + preview.to_string()));
  }
  return values;
}

}  // namespace

std::vector<StepReport> replay(const EditScript& script, Strategy strategy,
                               const std::shared_ptr<CountingLibrary>& counter) {
  counter->reset();
  LiveRun live;
  live.state.roots = counter->roots();

  std::vector<StepReport> out;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const EditStep& step = script.steps[i];
    StepReport r;
    r.step = i + 1;
    r.label = step.label;
    r.strategy = strategy;

    auto before = counter->snapshot();
    auto t0 = Clock::now();
    Program p = parse(step.text);
    r.parse_ok = p.ok();
    if (r.parse_ok) {
      switch (strategy) {
        case Strategy::kCbv: r.values = run_cbv(p, *counter); break;
        case Strategy::kLazy: r.values = run_lazy(p, counter); break;
        case Strategy::kLive: r.values = run_live(p, live, *counter); break;
      }
    }
    r.ms = ms_since(t0);
    r.calls = count_delta(before, counter->snapshot());
    for (const auto& [m, n] : r.calls) r.total_calls += n;
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t Histogram::entries() const {
  std::size_t n = 0;
  for (const auto& [name, bins] : counts) {
    for (auto c : bins) n += c;
  }
  return n;
}

const std::vector<double>& default_edges() {
  static const std::vector<double> edges = {
      0, 5, 15, 50, 150, 500, 1000, std::numeric_limits<double>::infinity()};
  return edges;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::size_t bin_of(double ms, const std::vector<double>& edges) {
  auto it = std::upper_bound(edges.begin(), edges.end(), ms);
  if (it == edges.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - edges.begin()) - 1,
                               edges.size() - 2);
}

void add(Histogram& h, const StepReport& r) {
  auto& bins = h.counts[std::string(strategy_name(r.strategy))];
  bins.resize(h.edges.size() - 1, 0);
  ++bins[bin_of(r.ms, h.edges)];
}

}  // namespace

std::string csv_header() { return "step,label,strategy,ms,total_calls,calls_json"; }

std::string csv_row(const StepReport& r) {
  std::ostringstream ms;
  ms.setf(std::ios::fixed);
  ms.precision(3);
  ms << r.ms;
  json calls = json::object();
  for (const auto& [m, n] : r.calls) calls[m] = n;
  return std::to_string(r.step) + "," + csv_field(r.label) + "," +
         std::string(strategy_name(r.strategy)) + "," + ms.str() + "," +
         std::to_string(r.total_calls) + "," + csv_field(calls.dump());
}

Summary summarize(const std::vector<StepReport>& reports, double cut_ms) {
  Summary s;
  s.all.edges = default_edges();
  s.slow.edges = default_edges();
  s.csv = csv_header() + "\n";
  std::set<std::size_t> slow_steps;
  for (const auto& r : reports) {
    if (r.ms > cut_ms) slow_steps.insert(r.step);
  }
  for (const auto& r : reports) {
    s.csv += csv_row(r) + "\n";
    add(s.all, r);
    if (slow_steps.count(r.step)) add(s.slow, r);
  }
  return s;
}

}  // namespace dexp

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dexp/library.h"
#include "dexp/value.h"

namespace dexp {

struct EditStep {
  /// Whole program text after the edit.
  std::string text;
  std::string label;
};

struct EditScript {
  std::vector<EditStep> steps;

  /// JSON array of {text, label?}. Throws std::runtime_error on bad shape.
  static EditScript from_json(const nlohmann::json& j);
  static EditScript load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
};

enum class Strategy { kCbv, kLazy, kLive };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct StepReport {
  /// 1-based.
  std::size_t step = 0;
  std::string label;
  Strategy strategy = Strategy::kCbv;
  bool parse_ok = false;
  double ms = 0;
  std::map<std::string, std::size_t> calls;
  std::size_t total_calls = 0;
  /// Final value of each command; empty when the step did not parse.
  std::vector<Value> values;
};

/// Member names of the image library.
const std::vector<std::string>& image_members();
/// Calls of a report restricted to image_members().
std::size_t image_calls(const StepReport& r);

/// Replays every step. CBV and LAZY start from nothing at each step; LIVE
/// keeps its node cache and previews across steps, starting empty. Calls
/// are counted on `counter`, which is reset first.
std::vector<StepReport> replay(const EditScript& script, Strategy strategy,
                               const std::shared_ptr<CountingLibrary>& counter);

struct Histogram {
  /// Bin i holds delays in [edges[i], edges[i+1]); the last edge is infinite.
  std::vector<double> edges;
  std::map<std::string, std::vector<std::size_t>> counts;

  std::size_t entries() const;
};

struct Summary {
  std::string csv;
  Histogram all;
  /// Only steps where some strategy took longer than the cut.
  Histogram slow;
};

/// Histogram edges used by summarize().
const std::vector<double>& default_edges();

std::string csv_header();
std::string csv_row(const StepReport& r);

Summary summarize(const std::vector<StepReport>& reports, double cut_ms = 15.0);

}  // namespace dexp

#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dexp/depgraph.h"
#include "dexp/library.h"
#include "dexp/syntax.h"

namespace dexp {

/// A fully evaluated value, or an expression still waiting on the listed
/// variables.
class Preview {
 public:
  static Preview evaluated(Value v);
  /// `required` is sorted and deduplicated here.
  static Preview delayed(ExprPtr expr, std::vector<std::string> required);

  bool is_evaluated() const { return !expr_; }
  bool is_delayed() const { return static_cast<bool>(expr_); }
  const Value& value() const { return value_; }
  const ExprPtr& expr() const { return expr_; }
  const std::vector<std::string>& required() const { return required_; }

  std::string to_string() const;

  friend bool operator==(const Preview& a, const Preview& b);
  friend bool operator!=(const Preview& a, const Preview& b) { return !(a == b); }

 private:
  Value value_;
  ExprPtr expr_;
  std::vector<std::string> required_;
};

/// Previews by vertex. Entries are written once; storing a different
/// preview for a vertex already present is a logic error.
class PreviewCache {
 public:
  std::optional<Preview> find(const Vertex& v) const;
  void store(const Vertex& v, const Preview& p);
  std::size_t size() const { return entries_.size(); }
  bool contains(const Vertex& v) const { return entries_.count(v) > 0; }
  const std::unordered_map<Vertex, Preview>& entries() const {
    return entries_;
  }

 private:
  std::unordered_map<Vertex, Preview> entries_;
};

/// Stop conditions checked on entry to every vertex evaluation.
struct EvalControl {
  std::function<bool()> cancelled;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

class PreviewInterrupted : public std::runtime_error {
 public:
  explicit PreviewInterrupted(bool timed_out)
      : std::runtime_error(timed_out ? "preview timed out"
                                     : "preview cancelled"),
        timed_out_(timed_out) {}
  bool timed_out() const { return timed_out_; }

 private:
  bool timed_out_;
};

/// Applies closures produced by previews: substitutes the argument and
/// evaluates the body directly against the library.
class ClosureApplier {
 public:
  explicit ClosureApplier(const ExternalLibrary& lib,
                          std::function<void()> checkpoint = {},
                          std::size_t max_depth = 10'000);

  Value apply(const Value& closure, const Value& arg);
  Value eval_closed(const Expr& e);
  ApplyFn as_fn();

 private:
  const ExternalLibrary& lib_;
  std::function<void()> checkpoint_;
  std::size_t max_depth_;
  std::size_t depth_ = 0;
};

/// Demand-driven preview evaluation over a dependency graph.
class PreviewEvaluator {
 public:
  PreviewEvaluator(const DepGraph& graph, PreviewCache& cache,
                   const ExternalLibrary& lib, EvalControl control = {});
  PreviewEvaluator(const PreviewEvaluator&) = delete;
  PreviewEvaluator& operator=(const PreviewEvaluator&) = delete;

  /// Throws std::invalid_argument if `v` is not in the graph and
  /// PreviewInterrupted when the control says stop.
  Preview eval(const Vertex& v);
  /// Delayed form of eval(v).
  Preview lift(const Vertex& v);

  /// Vertices evaluated without a cache hit.
  std::size_t computed() const { return computed_; }

 private:
  void checkpoint() const;
  Preview compute(const Vertex& v);

  const DepGraph& graph_;
  PreviewCache& cache_;
  const ExternalLibrary& lib_;
  EvalControl control_;
  ClosureApplier applier_;
  std::size_t computed_ = 0;
};

/// Expression form of a preview: evaluated values become literals or
/// lambdas, delayed previews pass through.
Preview lift_preview(const Preview& p);

Preview eval_preview(const Vertex& v, const DepGraph& g, PreviewCache& cache,
                     const ExternalLibrary& lib, EvalControl control = {});

std::vector<std::pair<std::size_t, Preview>> command_previews(
    const Binding& b, PreviewCache& cache, const ExternalLibrary& lib,
    EvalControl control = {});

std::optional<Preview> preview_at_cursor(const Binding& b, const Program& p,
                                         std::size_t offset,
                                         PreviewCache& cache,
                                         const ExternalLibrary& lib,
                                         EvalControl control = {});

}  // namespace dexp

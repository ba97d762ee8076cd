#pragma once

#include <cstddef>
#include <vector>

#include "dexp/library.h"
#include "dexp/syntax.h"

namespace dexp {

struct EvalOptions {
  std::size_t step_limit = 1'000'000;
  std::size_t max_apply_depth = 10'000;
};

struct EvalReport {
  /// One value per command, in order.
  std::vector<Value> values;
  /// Reductions performed, including those inside closure applications.
  std::size_t steps = 0;
  bool step_limit_hit = false;
};

/// Small-step call-by-value reducer used as the correctness oracle.
///
/// Free variables that are not let-bound earlier in the program resolve to
/// the library's roots, or to a bottom naming the variable.
class ReferenceEvaluator {
 public:
  explicit ReferenceEvaluator(const ExternalLibrary& lib, EvalOptions opts = {});

  /// Commands of a program; parse errors are ignored.
  EvalReport run(const Program& program);

  /// Substitutes `arg` for the closure parameter and reduces the body to a
  /// value. Non-closures and runaway recursion give bottom.
  Value apply_closure(const Value& closure, const Value& arg);

 private:
  struct StepLimit {};

  ExprPtr reduce(ExprPtr e);
  std::optional<ExprPtr> step(const ExprPtr& e);
  void tick();

  const ExternalLibrary& lib_;
  EvalOptions opts_;
  RootList roots_;
  std::size_t steps_ = 0;
  std::size_t depth_ = 0;
};

std::vector<Value> evaluate(const Program& program, const ExternalLibrary& lib);

/// Call-by-name elimination of the first let binding: the binding becomes a
/// plain command and its term is substituted into later commands up to and
/// including the body of the next binding of the same name.
Program let_eliminate(const Program& program);
/// Repeats let_eliminate until no binding remains.
Program let_eliminate_all(const Program& program);

}  // namespace dexp

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dexp/syntax.h"
#include "dexp/value.h"

namespace dexp::fuzz {

enum class Ty { kNum, kList, kImage, kTable, kGrouped };

struct Options {
  std::size_t max_commands = 6;
  int max_depth = 4;
  /// Only calls that type check and cannot fail at run time.
  bool well_typed = false;
  /// Share of calls in untyped mode drawn from random members and arities.
  double wild_rate = 0.15;
  bool images = true;
  bool tables = true;
  /// Every let introduces a new name; otherwise names are sometimes reused.
  bool unique_names = false;
};

/// Random closed programs over the bundled libraries. Programs are ASTs
/// without spans; print them with `pretty`.
class Generator {
 public:
  explicit Generator(std::uint64_t seed, Options opts = {});

  Program program();
  /// Term of type `t` whose free variables are drawn from `scope`.
  ExprPtr term(Ty t, int depth,
               const std::vector<std::pair<std::string, Ty>>& scope);
  /// Any term, for replacement arguments.
  ExprPtr any_term(int depth,
                   const std::vector<std::pair<std::string, Ty>>& scope);

  std::mt19937_64& rng() { return rng_; }
  std::size_t below(std::size_t n);
  bool chance(double p);

 private:
  using Scope = std::vector<std::pair<std::string, Ty>>;

  Ty random_type();
  ExprPtr leaf(Ty t, const Scope& scope);
  ExprPtr wild(int depth, const Scope& scope);
  ExprPtr small(int lo, int hi);
  ExprPtr column();
  ExprPtr numeric_column();
  ExprPtr lambda(int depth, const Scope& scope);

  std::mt19937_64 rng_;
  Options opts_;
  std::size_t next_name_ = 0;
  std::size_t next_param_ = 0;
};

/// Reparsed pretty form; the result carries spans.
Program reparse(const Program& p);

/// Step into a member access: 0 is the instance, i > 0 argument i - 1.
using Path = std::vector<std::size_t>;

/// Holes of the edit context: every sub-term reachable through instances
/// and arguments without entering a lambda, the root included.
std::vector<Path> context_positions(const ExprPtr& e);
ExprPtr at(const ExprPtr& e, const Path& path);
ExprPtr replace_at(const ExprPtr& e, const Path& path, ExprPtr replacement);

/// Let names each command depends on, directly or through earlier lets.
std::vector<std::set<std::string>> transitive_dependencies(const Program& p);

/// Names let-bound anywhere in the program.
std::set<std::string> let_names(const Program& p);

/// Sample values of every kind, including ill-formed ones, for totality
/// checks.
std::vector<Value> value_pool(std::mt19937_64& rng);

/// Member names of the bundled libraries plus some that no library knows.
const std::vector<std::string>& member_pool();
/// member_pool() without names that have no source form.
const std::vector<std::string>& writable_member_pool();

}  // namespace dexp::fuzz

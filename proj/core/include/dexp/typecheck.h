#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dexp/depgraph.h"
#include "dexp/library.h"
#include "dexp/syntax.h"
#include "dexp/types.h"

namespace dexp {

/// Callsite edges reachable from a vertex, sorted. A vertex's type depends
/// on these besides its own identity, since parameter vertices are shared
/// by name.
using Fingerprint = std::vector<Edge>;

struct TypeEntry {
  TypePtr type;
  /// The error was raised at this vertex (not inherited).
  bool raised = false;
  /// Argument the raised error points at, when it is about one argument.
  std::optional<std::size_t> arg_index;
};

class TypeCache {
 public:
  const TypeEntry* find(const Vertex& v, const Fingerprint& fp) const;
  void store(const Vertex& v, const Fingerprint& fp, TypeEntry entry);
  std::size_t size() const;
  /// Types computed rather than found.
  std::size_t misses() const { return misses_; }
  void count_miss() { ++misses_; }

 private:
  std::unordered_map<Vertex, std::vector<std::pair<Fingerprint, TypeEntry>>>
      entries_;
  std::size_t misses_ = 0;
};

class TypeChecker {
 public:
  TypeChecker(const DepGraph& graph, const TypedLibrary& lib, TypeCache& cache);

  TypePtr check(const Vertex& v);
  /// Entry for a vertex checked earlier in this run or found in the cache.
  const TypeEntry* entry(const Vertex& v);
  const Fingerprint& fingerprint(const Vertex& v);

 private:
  TypeEntry compute(const Vertex& v);
  /// Parameter type of the function argument reached through `callsites`.
  std::pair<TypePtr, TypePtr> callsite_type(const Vertex& v, bool& ok,
                                            std::string& error);

  const DepGraph& graph_;
  const TypedLibrary& lib_;
  TypeCache& cache_;
  std::unordered_map<Vertex, Fingerprint> fingerprints_;
  std::unordered_set<Vertex> in_progress_;
  bool saw_cycle_ = false;
  std::unordered_map<Vertex, TypeEntry> uncached_;
};

TypePtr typecheck_vertex(const Vertex& v, const DepGraph& g,
                         const TypedLibrary& lib, TypeCache& cache);

struct Diagnostic {
  Span span;
  std::string severity;
  std::string message;
};

/// Type errors of all commands, one per vertex that raised one, in source
/// order.
std::vector<Diagnostic> check_program(const Program& p, const Binding& b,
                                      const TypedLibrary& lib,
                                      TypeCache& cache);

using Completion = std::pair<std::string, MemberSig>;

/// Members of the instance whose member name sits at `offset` (or right
/// after whose dot the offset is), sorted by name.
std::vector<Completion> completions(const Program& p, const Binding& b,
                                    std::size_t offset,
                                    const TypedLibrary& lib, TypeCache& cache);

/// Completion on text that may not parse, as while typing `x.`: the text
/// before the dot is closed up, bound against the session cache without
/// changing it, and the term ending at the dot is checked.
std::vector<Completion> completions_in_text(std::string_view text,
                                            std::size_t offset,
                                            const LiveState& state,
                                            const TypedLibrary& lib);

}  // namespace dexp

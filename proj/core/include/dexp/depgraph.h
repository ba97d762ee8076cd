#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dexp/library.h"
#include "dexp/syntax.h"
#include "dexp/value.h"

namespace dexp {

struct Symbol {
  std::uint64_t id = 0;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// Session-wide source of fresh symbols.
class SymbolGenerator {
 public:
  /// Issues symbols above `start`.
  explicit SymbolGenerator(std::uint64_t start = 0) : last_(start) {}
  Symbol next() { return Symbol{++last_}; }
  std::uint64_t issued() const { return last_; }

 private:
  std::uint64_t last_ = 0;
};

/// Graph vertex. Identity: Val by value, Var and Unresolved by name,
/// Mem and Fun by symbol.
class Vertex {
 public:
  enum class Kind { kVal, kVar, kMem, kFun, kUnresolved };

  static Vertex val(Value v);
  static Vertex var(std::string name);
  static Vertex mem(std::string member, Symbol s);
  static Vertex fun(std::string param, Symbol s);
  static Vertex unresolved(std::string name);

  Kind kind() const { return rep_->kind; }
  bool is_mem() const { return kind() == Kind::kMem; }
  bool is_fun() const { return kind() == Kind::kFun; }
  /// Payload of a Val vertex.
  const Value& value() const { return rep_->value; }
  /// Variable name, member name, or parameter name.
  const std::string& name() const { return rep_->name; }
  Symbol symbol() const { return rep_->symbol; }
  std::size_t hash() const { return rep_->hash; }

  std::string to_string() const;

  friend bool operator==(const Vertex& a, const Vertex& b);
  friend bool operator!=(const Vertex& a, const Vertex& b) { return !(a == b); }
  /// Total order used for deterministic output.
  friend bool operator<(const Vertex& a, const Vertex& b);

 private:
  struct Rep {
    Kind kind;
    Value value;
    std::string name;
    Symbol symbol;
    std::size_t hash;
  };
  explicit Vertex(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

std::string_view kind_name(Vertex::Kind kind);

struct EdgeLabel {
  enum class Kind { kBody, kArg, kCallsite };
  Kind kind = Kind::kBody;
  std::size_t index = 0;
  std::string member;  // callsite only

  static EdgeLabel body() { return {Kind::kBody, 0, {}}; }
  static EdgeLabel arg(std::size_t i) { return {Kind::kArg, i, {}}; }
  static EdgeLabel callsite(std::string m, std::size_t i) {
    return {Kind::kCallsite, i, std::move(m)};
  }

  std::string to_string() const;
  friend bool operator==(const EdgeLabel&, const EdgeLabel&) = default;
  friend auto operator<=>(const EdgeLabel&, const EdgeLabel&) = default;
};

struct Edge {
  Vertex from;
  Vertex to;
  EdgeLabel label;
  friend bool operator==(const Edge&, const Edge&) = default;
};

}  // namespace dexp

template <>
struct std::hash<dexp::Vertex> {
  std::size_t operator()(const dexp::Vertex& v) const { return v.hash(); }
};

namespace dexp {

class DepGraph {
 public:
  /// Adds the vertex if absent.
  void add_vertex(const Vertex& v);
  /// Adds both endpoints and the edge if absent.
  void add_edge(const Vertex& from, const Vertex& to, EdgeLabel label);

  bool contains(const Vertex& v) const { return index_.count(v) > 0; }
  /// Vertices in insertion order.
  const std::vector<Vertex>& vertices() const { return order_; }
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  /// Outgoing edges of `v` in insertion order.
  const std::vector<std::pair<Vertex, EdgeLabel>>& out_edges(
      const Vertex& v) const;
  /// Arg targets ordered by index (instance first).
  std::vector<Vertex> args_of(const Vertex& v) const;
  std::optional<Vertex> body_of(const Vertex& v) const;
  /// Callsite edges leaving `v`: (instance vertex, label).
  std::vector<std::pair<Vertex, EdgeLabel>> callsites_of(const Vertex& v) const;

  void merge(const DepGraph& other);
  DepGraph without_callsites() const;

  /// Vertex and edge set equality.
  bool same_as(const DepGraph& other) const;

  /// One line per vertex `id kind payload`, then one per edge
  /// `from to label`, ids assigned in sorted vertex order.
  std::string export_text() const;

 private:
  std::unordered_map<Vertex, std::size_t> index_;
  std::vector<Vertex> order_;
  std::vector<std::vector<std::pair<Vertex, EdgeLabel>>> out_;
};

/// Key of the node cache: node kind plus labelled dependencies.
struct CacheKey {
  bool is_fun = false;
  /// Member name or parameter name.
  std::string name;
  std::vector<std::pair<Vertex, EdgeLabel>> deps;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const;
};

class NodeCache {
 public:
  std::optional<Vertex> lookup(const CacheKey& key) const;
  void insert(const CacheKey& key, const Vertex& v);
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<CacheKey, Vertex, CacheKeyHash>& entries() const {
    return entries_;
  }
  /// Every entry of `older` is present here with the same vertex.
  bool includes(const NodeCache& older) const;

 private:
  std::unordered_map<CacheKey, Vertex, CacheKeyHash> entries_;
};

/// Identifier-to-vertex context.
using VarContext = std::map<std::string, Vertex, std::less<>>;

struct Binding {
  /// One per well-formed command, in order.
  std::vector<Vertex> command_vertices;
  std::unordered_map<const Expr*, Vertex> expr_vertex;
  DepGraph graph;
  /// Keeps the bound expressions alive for expr_vertex.
  std::vector<ExprPtr> bodies;
};

/// Binder state for one binding pass.
class Binder {
 public:
  /// `roots` resolve free identifiers not in the context to Val vertices.
  Binder(const NodeCache& cache, SymbolGenerator& symbols, const RootList& roots);

  Vertex bind_expr(const ExprPtr& e, const VarContext& ctx, Binding& out);
  Binding bind_prog(const Program& program);

 private:
  Vertex lookup_or_create(CacheKey key, bool is_fun, const std::string& name);

  const NodeCache& cache_;
  SymbolGenerator& symbols_;
  std::map<std::string, Value, std::less<>> roots_;
  // Vertices created during this pass, so repeated sub-expressions within
  // one program share a vertex.
  std::unordered_map<CacheKey, Vertex, CacheKeyHash> local_;
};

Binding bind_prog(const Program& program, const NodeCache& cache,
                  SymbolGenerator& symbols, const RootList& roots);

/// Cache key of a Mem or Fun vertex from its Arg/Body edges in `g`.
CacheKey key_of(const Vertex& v, const DepGraph& g);

/// Registers every Mem/Fun vertex of `g`; other entries are kept.
NodeCache update_cache(const NodeCache& cache, const DepGraph& g);
void update_cache_in_place(NodeCache& cache, const DepGraph& g);

/// Session binding state: node cache, symbol source and roots.
struct LiveState {
  NodeCache cache;
  SymbolGenerator symbols;
  RootList roots;
};

struct Rebound {
  Program program;
  Binding binding;
};

/// Parses, binds against the current cache, then folds the new graph into
/// the cache.
Rebound rebind(LiveState& state, std::string_view text);

}  // namespace dexp

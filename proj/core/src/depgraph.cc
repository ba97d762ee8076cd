#include "dexp/depgraph.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace dexp {

namespace {

std::size_t string_hash(const std::string& s) {
  return std::hash<std::string>{}(s);
}

}  // namespace

Vertex Vertex::val(Value v) {
  std::size_t h = 0x1001;
  hash_combine(h, v.hash());
  return Vertex(std::make_shared<const Rep>(
      Rep{Kind::kVal, std::move(v), {}, {}, h}));
}

Vertex Vertex::var(std::string name) {
  std::size_t h = 0x2002;
  hash_combine(h, string_hash(name));
  return Vertex(std::make_shared<const Rep>(
      Rep{Kind::kVar, Value(), std::move(name), {}, h}));
}

Vertex Vertex::mem(std::string member, Symbol s) {
  std::size_t h = 0x3003;
  hash_combine(h, std::hash<std::uint64_t>{}(s.id));
  return Vertex(std::make_shared<const Rep>(
      Rep{Kind::kMem, Value(), std::move(member), s, h}));
}

Vertex Vertex::fun(std::string param, Symbol s) {
  std::size_t h = 0x4004;
  hash_combine(h, std::hash<std::uint64_t>{}(s.id));
  return Vertex(std::make_shared<const Rep>(
      Rep{Kind::kFun, Value(), std::move(param), s, h}));
}

Vertex Vertex::unresolved(std::string name) {
  std::size_t h = 0x5005;
  hash_combine(h, string_hash(name));
  return Vertex(std::make_shared<const Rep>(
      Rep{Kind::kUnresolved, Value(), std::move(name), {}, h}));
}

bool operator==(const Vertex& a, const Vertex& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.kind() != b.kind() || a.hash() != b.hash()) return false;
  switch (a.kind()) {
    case Vertex::Kind::kVal:
      return a.value() == b.value();
    case Vertex::Kind::kVar:
    case Vertex::Kind::kUnresolved:
      return a.name() == b.name();
    case Vertex::Kind::kMem:
    case Vertex::Kind::kFun:
      return a.symbol() == b.symbol() && a.name() == b.name();
  }
  return false;
}

bool operator<(const Vertex& a, const Vertex& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case Vertex::Kind::kVal:
      return a.value().serialize() < b.value().serialize();
    case Vertex::Kind::kVar:
    case Vertex::Kind::kUnresolved:
      return a.name() < b.name();
    case Vertex::Kind::kMem:
    case Vertex::Kind::kFun:
      if (a.symbol() != b.symbol()) return a.symbol() < b.symbol();
      return a.name() < b.name();
  }
  return false;
}

std::string_view kind_name(Vertex::Kind kind) {
  switch (kind) {
    case Vertex::Kind::kVal: return "val";
    case Vertex::Kind::kVar: return "var";
    case Vertex::Kind::kMem: return "mem";
    case Vertex::Kind::kFun: return "fun";
    case Vertex::Kind::kUnresolved: return "unresolved";
  }
  return "?";
}

std::string Vertex::to_string() const {
  std::string out(kind_name(kind()));
  out += '(';
  switch (kind()) {
    case Kind::kVal:
      out += value().serialize();
      break;
    case Kind::kVar:
    case Kind::kUnresolved:
      out += name();
      break;
    case Kind::kMem:
    case Kind::kFun:
      out += name() + ", s" + std::to_string(symbol().id);
      break;
  }
  return out + ')';
}

std::string EdgeLabel::to_string() const {
  switch (kind) {
    case Kind::kBody:
      return "body";
    case Kind::kArg:
      return "arg(" + std::to_string(index) + ")";
    case Kind::kCallsite:
      return "callsite(" + quote_identifier(member) + "," +
             std::to_string(index) + ")";
  }
  return "?";
}

void DepGraph::add_vertex(const Vertex& v) {
  if (index_.emplace(v, order_.size()).second) {
    order_.push_back(v);
    out_.emplace_back();
  }
}

void DepGraph::add_edge(const Vertex& from, const Vertex& to, EdgeLabel label) {
  add_vertex(from);
  add_vertex(to);
  auto& out = out_[index_.at(from)];
  for (const auto& [target, l] : out) {
    if (l == label && target == to) return;
  }
  out.emplace_back(to, std::move(label));
}

std::vector<Edge> DepGraph::edges() const {
  std::vector<Edge> result;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    for (const auto& [to, label] : out_[i]) {
      result.push_back(Edge{order_[i], to, label});
    }
  }
  return result;
}

std::size_t DepGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& out : out_) n += out.size();
  return n;
}

const std::vector<std::pair<Vertex, EdgeLabel>>& DepGraph::out_edges(
    const Vertex& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) {
    throw std::invalid_argument("vertex not in graph: " + v.to_string());
  }
  return out_[it->second];
}

std::vector<Vertex> DepGraph::args_of(const Vertex& v) const {
  std::vector<std::pair<std::size_t, Vertex>> args;
  for (const auto& [to, label] : out_edges(v)) {
    if (label.kind == EdgeLabel::Kind::kArg) args.emplace_back(label.index, to);
  }
  std::sort(args.begin(), args.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Vertex> out;
  out.reserve(args.size());
  for (auto& [_, vx] : args) out.push_back(std::move(vx));
  return out;
}

std::optional<Vertex> DepGraph::body_of(const Vertex& v) const {
  for (const auto& [to, label] : out_edges(v)) {
    if (label.kind == EdgeLabel::Kind::kBody) return to;
  }
  return std::nullopt;
}

std::vector<std::pair<Vertex, EdgeLabel>> DepGraph::callsites_of(
    const Vertex& v) const {
  std::vector<std::pair<Vertex, EdgeLabel>> out;
  auto it = index_.find(v);
  if (it == index_.end()) return out;
  for (const auto& e : out_[it->second]) {
    if (e.second.kind == EdgeLabel::Kind::kCallsite) out.push_back(e);
  }
  return out;
}

void DepGraph::merge(const DepGraph& other) {
  for (std::size_t i = 0; i < other.order_.size(); ++i) {
    add_vertex(other.order_[i]);
    for (const auto& [to, label] : other.out_[i]) {
      add_edge(other.order_[i], to, label);
    }
  }
}

DepGraph DepGraph::without_callsites() const {
  DepGraph g;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    g.add_vertex(order_[i]);
    for (const auto& [to, label] : out_[i]) {
      if (label.kind != EdgeLabel::Kind::kCallsite) {
        g.add_edge(order_[i], to, label);
      }
    }
  }
  return g;
}

bool DepGraph::same_as(const DepGraph& other) const {
  if (order_.size() != other.order_.size()) return false;
  if (edge_count() != other.edge_count()) return false;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    auto it = other.index_.find(order_[i]);
    if (it == other.index_.end()) return false;
    const auto& theirs = other.out_[it->second];
    for (const auto& e : out_[i]) {
      if (std::find(theirs.begin(), theirs.end(), e) == theirs.end()) {
        return false;
      }
    }
  }
  return true;
}

std::string DepGraph::export_text() const {
  std::vector<Vertex> sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<Vertex, std::size_t> id;
  std::ostringstream out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Vertex& v = sorted[i];
    id.emplace(v, i);
    out << 'v' << i << ' ' << kind_name(v.kind()) << ' ';
    switch (v.kind()) {
      case Vertex::Kind::kVal:
        out << v.value().serialize();
        break;
      case Vertex::Kind::kVar:
      case Vertex::Kind::kUnresolved:
        out << quote_identifier(v.name());
        break;
      case Vertex::Kind::kMem:
      case Vertex::Kind::kFun:
        out << quote_identifier(v.name()) << " s" << v.symbol().id;
        break;
    }
    out << '\n';
  }
  std::vector<std::tuple<std::size_t, std::size_t, EdgeLabel>> lines;
  for (const Edge& e : edges()) {
    lines.emplace_back(id.at(e.from), id.at(e.to), e.label);
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [from, to, label] : lines) {
    out << 'v' << from << " v" << to << ' ' << label.to_string() << '\n';
  }
  return out.str();
}

std::size_t CacheKeyHash::operator()(const CacheKey& k) const {
  std::size_t h = k.is_fun ? 0x77 : 0x33;
  hash_combine(h, string_hash(k.name));
  for (const auto& [v, label] : k.deps) {
    hash_combine(h, v.hash());
    hash_combine(h, static_cast<std::size_t>(label.kind) * 31 + label.index);
  }
  return h;
}

std::optional<Vertex> NodeCache::lookup(const CacheKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void NodeCache::insert(const CacheKey& key, const Vertex& v) {
  entries_.insert_or_assign(key, v);
}

bool NodeCache::includes(const NodeCache& older) const {
  for (const auto& [key, v] : older.entries_) {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second != v) return false;
  }
  return true;
}

Binder::Binder(const NodeCache& cache, SymbolGenerator& symbols,
               const RootList& roots)
    : cache_(cache), symbols_(symbols) {
  for (const auto& [name, value] : roots) roots_.emplace(name, value);
}

Vertex Binder::lookup_or_create(CacheKey key, bool is_fun,
                                const std::string& name) {
  if (auto it = local_.find(key); it != local_.end()) return it->second;
  if (auto hit = cache_.lookup(key)) {
    local_.emplace(std::move(key), *hit);
    return *hit;
  }
  Vertex v = is_fun ? Vertex::fun(name, symbols_.next())
                    : Vertex::mem(name, symbols_.next());
  local_.emplace(std::move(key), v);
  return v;
}

Vertex Binder::bind_expr(const ExprPtr& e, const VarContext& ctx,
                         Binding& out) {
  Vertex v = Vertex::val(Value());
  if (auto* lit = e->literal()) {
    v = Vertex::val(lit->value);
    out.graph.add_vertex(v);
  } else if (auto* var = e->variable()) {
    if (auto it = ctx.find(var->name); it != ctx.end()) {
      v = it->second;
    } else if (auto root = roots_.find(var->name); root != roots_.end()) {
      v = Vertex::val(root->second);
    } else {
      v = Vertex::unresolved(var->name);
    }
    out.graph.add_vertex(v);
  } else if (auto* mem = e->member()) {
    std::vector<Vertex> deps;
    deps.push_back(bind_expr(mem->instance, ctx, out));
    for (const auto& a : mem->args) deps.push_back(bind_expr(a, ctx, out));
    CacheKey key{false, mem->member, {}};
    for (std::size_t i = 0; i < deps.size(); ++i) {
      key.deps.emplace_back(deps[i], EdgeLabel::arg(i));
    }
    v = lookup_or_create(std::move(key), false, mem->member);
    for (std::size_t i = 0; i < deps.size(); ++i) {
      out.graph.add_edge(v, deps[i], EdgeLabel::arg(i));
    }
    for (std::size_t i = 0; i < mem->args.size(); ++i) {
      if (auto* lam = mem->args[i]->lambda()) {
        EdgeLabel cs = EdgeLabel::callsite(mem->member, i + 1);
        out.graph.add_edge(deps[i + 1], deps[0], cs);
        out.graph.add_edge(Vertex::var(lam->param), deps[0], cs);
      }
    }
  } else if (auto* lam = e->lambda()) {
    VarContext inner = ctx;
    inner.insert_or_assign(lam->param, Vertex::var(lam->param));
    Vertex body = bind_expr(lam->body, inner, out);
    CacheKey key{true, lam->param, {{body, EdgeLabel::body()}}};
    v = lookup_or_create(std::move(key), true, lam->param);
    out.graph.add_edge(v, body, EdgeLabel::body());
  }
  out.expr_vertex.insert_or_assign(e.get(), v);
  return v;
}

Binding Binder::bind_prog(const Program& program) {
  Binding out;
  VarContext ctx;
  for (const Command& c : program.commands) {
    Vertex v = bind_expr(c.body, ctx, out);
    out.command_vertices.push_back(v);
    out.bodies.push_back(c.body);
    if (c.let_name) ctx.insert_or_assign(*c.let_name, v);
  }
  return out;
}

Binding bind_prog(const Program& program, const NodeCache& cache,
                  SymbolGenerator& symbols, const RootList& roots) {
  Binder binder(cache, symbols, roots);
  return binder.bind_prog(program);
}

CacheKey key_of(const Vertex& v, const DepGraph& g) {
  if (v.is_fun()) {
    auto body = g.body_of(v);
    if (!body) throw std::invalid_argument("function vertex without body");
    return CacheKey{true, v.name(), {{*body, EdgeLabel::body()}}};
  }
  if (!v.is_mem()) throw std::invalid_argument("not a member or function vertex");
  CacheKey key{false, v.name(), {}};
  auto args = g.args_of(v);
  for (std::size_t i = 0; i < args.size(); ++i) {
    key.deps.emplace_back(args[i], EdgeLabel::arg(i));
  }
  return key;
}

void update_cache_in_place(NodeCache& cache, const DepGraph& g) {
  for (const Vertex& v : g.vertices()) {
    if (v.is_mem() || v.is_fun()) cache.insert(key_of(v, g), v);
  }
}

NodeCache update_cache(const NodeCache& cache, const DepGraph& g) {
  NodeCache out = cache;
  update_cache_in_place(out, g);
  return out;
}

Rebound rebind(LiveState& state, std::string_view text) {
  Rebound r{parse(text), {}};
  r.binding = bind_prog(r.program, state.cache, state.symbols, state.roots);
  update_cache_in_place(state.cache, r.binding.graph);
  return r;
}

}  // namespace dexp

#include "dexp/typecheck.h"

#include <algorithm>
#include <functional>

namespace dexp {

const TypeEntry* TypeCache::find(const Vertex& v, const Fingerprint& fp) const {
  auto it = entries_.find(v);
  if (it == entries_.end()) return nullptr;
  for (const auto& [key, entry] : it->second) {
    if (key == fp) return &entry;
  }
  return nullptr;
}

void TypeCache::store(const Vertex& v, const Fingerprint& fp, TypeEntry entry) {
  auto& slot = entries_[v];
  for (auto& [key, existing] : slot) {
    if (key == fp) {
      existing = std::move(entry);
      return;
    }
  }
  slot.emplace_back(fp, std::move(entry));
}

std::size_t TypeCache::size() const {
  std::size_t n = 0;
  for (const auto& [_, slot] : entries_) n += slot.size();
  return n;
}

TypeChecker::TypeChecker(const DepGraph& graph, const TypedLibrary& lib,
                         TypeCache& cache)
    : graph_(graph), lib_(lib), cache_(cache) {}

const Fingerprint& TypeChecker::fingerprint(const Vertex& v) {
  if (auto it = fingerprints_.find(v); it != fingerprints_.end()) {
    return it->second;
  }
  Fingerprint fp;
  std::unordered_set<Vertex> seen{v};
  std::vector<Vertex> stack{v};
  while (!stack.empty()) {
    Vertex cur = stack.back();
    stack.pop_back();
    for (const auto& [to, label] : graph_.out_edges(cur)) {
      if (label.kind == EdgeLabel::Kind::kCallsite) {
        fp.push_back(Edge{cur, to, label});
      }
      if (seen.insert(to).second) stack.push_back(to);
    }
  }
  std::sort(fp.begin(), fp.end(), [](const Edge& a, const Edge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.label < b.label;
  });
  return fingerprints_.emplace(v, std::move(fp)).first->second;
}

const TypeEntry* TypeChecker::entry(const Vertex& v) {
  if (auto it = uncached_.find(v); it != uncached_.end()) return &it->second;
  return cache_.find(v, fingerprint(v));
}

TypePtr TypeChecker::check(const Vertex& v) {
  if (!graph_.contains(v)) {
    throw std::invalid_argument("vertex not in graph: " + v.to_string());
  }
  const Fingerprint& fp = fingerprint(v);
  if (auto* hit = cache_.find(v, fp)) return hit->type;
  if (in_progress_.count(v)) {
    saw_cycle_ = true;
    return Type::error("recursive parameter type", true);
  }
  in_progress_.insert(v);
  bool outer_cycle = saw_cycle_;
  saw_cycle_ = false;
  TypeEntry e = compute(v);
  in_progress_.erase(v);
  cache_.count_miss();
  TypePtr t = e.type;
  if (saw_cycle_) {
    uncached_.insert_or_assign(v, std::move(e));
  } else {
    uncached_.erase(v);
    cache_.store(v, fp, std::move(e));
  }
  saw_cycle_ |= outer_cycle;
  return t;
}

namespace {

TypeEntry raised(std::string message,
                 std::optional<std::size_t> arg = std::nullopt) {
  return TypeEntry{Type::error(std::move(message)), true, arg};
}

TypeEntry inherited(const TypePtr& error) {
  return TypeEntry{Type::error(error->name, true), false, std::nullopt};
}

TypeEntry ok(TypePtr t) { return TypeEntry{std::move(t), false, std::nullopt}; }

}  // namespace

std::pair<TypePtr, TypePtr> TypeChecker::callsite_type(const Vertex& v,
                                                       bool& good,
                                                       std::string& error) {
  // good=false with an empty message means the problem is reported
  // elsewhere; "!"-prefixed messages are problems of the function argument
  // itself.
  good = false;
  auto sites = graph_.callsites_of(v);
  if (sites.empty()) {
    error = "cannot infer the type of " + quote_identifier(v.name());
    return {};
  }
  std::vector<std::pair<TypePtr, TypePtr>> found;
  for (const auto& [inst, label] : sites) {
    TypePtr t0 = check(inst);
    if (t0->is_error() || t0->kind != Type::Kind::kObject) {
      error.clear();
      return {};
    }
    const ObjectSignature* sig = lib_.object_type(t0->name);
    if (!sig) {
      error.clear();
      return {};
    }
    auto m = sig->members.find(label.member);
    if (m == sig->members.end() || label.index == 0 ||
        label.index > m->second.params.size()) {
      error.clear();
      return {};
    }
    const TypePtr& p = m->second.params[label.index - 1];
    if (p->kind != Type::Kind::kFun) {
      error = "!" + label.member + " expects " + to_string(*p) +
              " as argument " + std::to_string(label.index) +
              ", not a function";
      return {};
    }
    found.emplace_back(p->input, p->output);
  }
  for (const auto& f : found) {
    if (!same_type(f.first, found[0].first) ||
        !same_type(f.second, found[0].second)) {
      error = "ambiguous parameter type for " + quote_identifier(v.name());
      return {};
    }
  }
  good = true;
  return found.front();
}

TypeEntry TypeChecker::compute(const Vertex& v) {
  switch (v.kind()) {
    case Vertex::Kind::kVal: {
      TypePtr t = lib_.type_of(v.value());
      if (t->is_error()) return raised(t->name);
      return ok(t);
    }
    case Vertex::Kind::kUnresolved:
      return raised("unbound variable " + quote_identifier(v.name()));
    case Vertex::Kind::kVar: {
      bool good = false;
      std::string error;
      auto [in, out] = callsite_type(v, good, error);
      if (good) return ok(in);
      if (error.empty() || error[0] == '!') {
        return inherited(Type::error(error.empty() ? "parameter type unknown"
                                                   : error.substr(1)));
      }
      return raised(error);
    }
    case Vertex::Kind::kFun: {
      bool good = false;
      std::string error;
      auto [in, out] = callsite_type(v, good, error);
      auto body = graph_.body_of(v);
      TypePtr tb = body ? check(*body) : Type::error("missing body");
      if (!good) {
        if (error.empty()) return inherited(Type::error("parameter type unknown"));
        return raised(error[0] == '!' ? error.substr(1) : error);
      }
      if (tb->is_error()) return inherited(tb);
      if (!same_type(tb, out)) {
        return raised("function returns " + to_string(*tb) + ", expected " +
                      to_string(*out));
      }
      return ok(Type::fun(in, out));
    }
    case Vertex::Kind::kMem: {
      std::vector<Vertex> deps = graph_.args_of(v);
      std::vector<TypePtr> ts;
      for (const Vertex& d : deps) ts.push_back(check(d));
      const std::string& m = v.name();
      if (ts[0]->is_error()) return inherited(ts[0]);
      if (ts[0]->kind != Type::Kind::kObject) {
        return raised("no member " + quote_identifier(m) + " on " +
                      to_string(*ts[0]));
      }
      const ObjectSignature* sig = lib_.object_type(ts[0]->name);
      if (!sig || !sig->members.count(m)) {
        return raised("no member " + quote_identifier(m));
      }
      const MemberSig& ms = sig->members.at(m);
      std::size_t given = deps.size() - 1;
      if (given != ms.params.size()) {
        return raised(m + " expects " + std::to_string(ms.params.size()) +
                      " argument" + (ms.params.size() == 1 ? "" : "s") +
                      ", got " + std::to_string(given));
      }
      for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i]->is_error()) return inherited(ts[i]);
      }
      for (std::size_t i = 1; i < ts.size(); ++i) {
        if (!same_type(ts[i], ms.params[i - 1])) {
          return raised("argument " + std::to_string(i) + " of " + m +
                            ": expected " + to_string(*ms.params[i - 1]) +
                            ", got " + to_string(*ts[i]),
                        i - 1);
        }
      }
      return ok(ms.result);
    }
  }
  return raised("unknown vertex");
}

TypePtr typecheck_vertex(const Vertex& v, const DepGraph& g,
                         const TypedLibrary& lib, TypeCache& cache) {
  TypeChecker checker(g, lib, cache);
  return checker.check(v);
}

namespace {

void walk(const ExprPtr& e, const std::function<void(const ExprPtr&)>& f) {
  f(e);
  if (auto* mem = e->member()) {
    walk(mem->instance, f);
    for (const auto& a : mem->args) walk(a, f);
  } else if (auto* lam = e->lambda()) {
    walk(lam->body, f);
  }
}

}  // namespace

std::vector<Diagnostic> check_program(const Program& p, const Binding& b,
                                      const TypedLibrary& lib,
                                      TypeCache& cache) {
  TypeChecker checker(b.graph, lib, cache);
  for (const Vertex& v : b.command_vertices) checker.check(v);

  // First expression (in source order) bound to each vertex.
  std::unordered_map<Vertex, const Expr*> first;
  for (const Command& c : p.commands) {
    walk(c.body, [&](const ExprPtr& e) {
      auto it = b.expr_vertex.find(e.get());
      if (it == b.expr_vertex.end()) return;
      auto [slot, fresh] = first.emplace(it->second, e.get());
      if (!fresh && e->span.begin < slot->second->span.begin) {
        slot->second = e.get();
      }
    });
  }

  std::vector<Diagnostic> out;
  std::unordered_set<Vertex> seen;
  std::vector<Vertex> stack(b.command_vertices.begin(),
                            b.command_vertices.end());
  for (const Vertex& v : stack) seen.insert(v);
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (const auto& [to, _] : b.graph.out_edges(v)) {
      if (seen.insert(to).second) stack.push_back(to);
    }
    const TypeEntry* e = checker.entry(v);
    if (!e || !e->raised) continue;
    auto it = first.find(v);
    if (it == first.end()) continue;
    Span span = it->second->span;
    if (e->arg_index) {
      if (auto* mem = it->second->member(); mem && *e->arg_index < mem->args.size()) {
        span = mem->args[*e->arg_index]->span;
      }
    }
    out.push_back(Diagnostic{span, "error", e->type->name});
  }
  std::sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
    return a.span.end < b.span.end;
  });
  return out;
}

namespace {

std::vector<Completion> members_of(const TypePtr& t, const TypedLibrary& lib) {
  std::vector<Completion> out;
  if (t->kind != Type::Kind::kObject) return out;
  const ObjectSignature* sig = lib.object_type(t->name);
  if (!sig) return out;
  for (const auto& [name, ms] : sig->members) out.emplace_back(name, ms);
  return out;
}

}  // namespace

std::vector<Completion> completions(const Program& p, const Binding& b,
                                    std::size_t offset,
                                    const TypedLibrary& lib, TypeCache& cache) {
  const Expr* best = nullptr;
  for (const Command& c : p.commands) {
    walk(c.body, [&](const ExprPtr& e) {
      auto* mem = e->member();
      if (!mem || !mem->member_span.touches(offset)) return;
      if (!best || e->span.length() < best->span.length()) best = e.get();
    });
  }
  if (!best) return {};
  auto it = b.expr_vertex.find(best->member()->instance.get());
  if (it == b.expr_vertex.end()) return {};
  TypeChecker checker(b.graph, lib, cache);
  return members_of(checker.check(it->second), lib);
}

namespace {

constexpr std::string_view kPlaceholder = "__complete__";

bool ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '_';
}

// Open parentheses of the command that `prefix` ends in.
std::size_t open_parens(std::string_view prefix) {
  std::size_t depth = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = prefix[i];
    if (c == '#') {
      while (i + 1 < prefix.size() && prefix[i + 1] != '\n') ++i;
    } else if (c == '"') {
      for (++i; i < prefix.size() && prefix[i] != '"' && prefix[i] != '\n'; ++i) {
        if (prefix[i] == '\\') ++i;
      }
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth) --depth;
    }
  }
  return depth;
}

}  // namespace

std::vector<Completion> completions_in_text(std::string_view text,
                                            std::size_t offset,
                                            const LiveState& state,
                                            const TypedLibrary& lib) {
  if (offset > text.size()) return {};
  std::size_t end = offset;
  while (end > 0 && ident_char(text[end - 1])) --end;
  if (end == 0 || text[end - 1] != '.') return {};
  std::string_view before = text.substr(0, end - 1);
  std::string repaired(before);
  repaired += '.';
  repaired += kPlaceholder;
  repaired.append(open_parens(before), ')');

  Program p = parse(repaired);
  const Expr* target = nullptr;
  for (const Command& c : p.commands) {
    walk(c.body, [&](const ExprPtr& e) {
      auto* mem = e->member();
      if (mem && mem->member == kPlaceholder && mem->member_span.begin == end) {
        target = e.get();
      }
    });
  }
  if (!target) return {};
  SymbolGenerator symbols(state.symbols.issued() + (1ULL << 40));
  Binding b = bind_prog(p, state.cache, symbols, state.roots);
  auto it = b.expr_vertex.find(target->member()->instance.get());
  if (it == b.expr_vertex.end()) return {};
  TypeCache scratch;
  TypeChecker checker(b.graph, lib, scratch);
  return members_of(checker.check(it->second), lib);
}

}  // namespace dexp

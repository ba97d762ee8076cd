#include "dexp/preview.h"

#include <algorithm>

namespace dexp {

Preview Preview::evaluated(Value v) {
  Preview p;
  p.value_ = std::move(v);
  return p;
}

Preview Preview::delayed(ExprPtr expr, std::vector<std::string> required) {
  Preview p;
  p.expr_ = std::move(expr);
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());
  p.required_ = std::move(required);
  return p;
}

std::string Preview::to_string() const {
  if (is_evaluated()) return value_.serialize();
  std::string out = "delayed(" + pretty(*expr_) + "; needs";
  for (const auto& r : required_) out += " " + quote_identifier(r);
  return out + ")";
}

bool operator==(const Preview& a, const Preview& b) {
  if (a.is_evaluated() != b.is_evaluated()) return false;
  if (a.is_evaluated()) return a.value_ == b.value_;
  return a.required_ == b.required_ && same_structure(*a.expr_, *b.expr_);
}

std::optional<Preview> PreviewCache::find(const Vertex& v) const {
  auto it = entries_.find(v);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PreviewCache::store(const Vertex& v, const Preview& p) {
  auto [it, fresh] = entries_.emplace(v, p);
  if (!fresh && it->second != p) {
    throw std::logic_error("conflicting preview for " + v.to_string());
  }
}

ClosureApplier::ClosureApplier(const ExternalLibrary& lib,
                               std::function<void()> checkpoint,
                               std::size_t max_depth)
    : lib_(lib), checkpoint_(std::move(checkpoint)), max_depth_(max_depth) {}

ApplyFn ClosureApplier::as_fn() {
  return [this](const Value& c, const Value& x) { return apply(c, x); };
}

Value ClosureApplier::apply(const Value& closure, const Value& arg) {
  if (!closure.is_closure()) return Value::bottom("not a function");
  if (depth_ >= max_depth_) {
    return Value::bottom("function application nested too deeply");
  }
  if (checkpoint_) checkpoint_();
  ++depth_;
  struct Guard {
    std::size_t& d;
    ~Guard() { --d; }
  } guard{depth_};
  const Closure& c = closure.as_closure();
  ExprPtr body = substitute(c.body, c.param, value_to_expr(arg));
  return eval_closed(*body);
}

Value ClosureApplier::eval_closed(const Expr& e) {
  if (auto* lit = e.literal()) return lit->value;
  if (auto* var = e.variable()) {
    return Value::bottom("unbound variable " + var->name);
  }
  if (auto* lam = e.lambda()) return Value::closure(lam->param, lam->body);
  const auto& mem = *e.member();
  Value receiver = eval_closed(*mem.instance);
  std::vector<Value> args;
  args.reserve(mem.args.size());
  for (const auto& a : mem.args) args.push_back(eval_closed(*a));
  return lib_.eval_member(receiver, mem.member, args, as_fn());
}

PreviewEvaluator::PreviewEvaluator(const DepGraph& graph, PreviewCache& cache,
                                   const ExternalLibrary& lib,
                                   EvalControl control)
    : graph_(graph),
      cache_(cache),
      lib_(lib),
      control_(std::move(control)),
      applier_(lib, [this] { checkpoint(); }) {}

void PreviewEvaluator::checkpoint() const {
  if (control_.cancelled && control_.cancelled()) throw PreviewInterrupted(false);
  if (control_.deadline &&
      std::chrono::steady_clock::now() >= *control_.deadline) {
    throw PreviewInterrupted(true);
  }
}

Preview PreviewEvaluator::eval(const Vertex& v) {
  if (!graph_.contains(v)) {
    throw std::invalid_argument("vertex not in graph: " + v.to_string());
  }
  if (auto hit = cache_.find(v)) return *hit;
  checkpoint();
  Preview p = compute(v);
  ++computed_;
  cache_.store(v, p);
  return p;
}

Preview PreviewEvaluator::lift(const Vertex& v) { return lift_preview(eval(v)); }

Preview lift_preview(const Preview& p) {
  if (p.is_delayed()) return p;
  return Preview::delayed(value_to_expr(p.value()), {});
}

Preview PreviewEvaluator::compute(const Vertex& v) {
  switch (v.kind()) {
    case Vertex::Kind::kVal:
      return Preview::evaluated(v.value());
    case Vertex::Kind::kVar:
      return Preview::delayed(make_variable(v.name()), {v.name()});
    case Vertex::Kind::kUnresolved:
      return Preview::evaluated(Value::bottom("unbound variable " + v.name()));
    case Vertex::Kind::kMem: {
      std::vector<Vertex> deps = graph_.args_of(v);
      std::vector<Preview> ps;
      ps.reserve(deps.size());
      bool all_values = true;
      for (const Vertex& d : deps) {
        ps.push_back(eval(d));
        all_values &= ps.back().is_evaluated();
      }
      if (all_values) {
        std::vector<Value> args;
        for (std::size_t i = 1; i < ps.size(); ++i) args.push_back(ps[i].value());
        return Preview::evaluated(
            lib_.eval_member(ps[0].value(), v.name(), args, applier_.as_fn()));
      }
      std::vector<ExprPtr> lifted;
      std::vector<std::string> required;
      for (const Preview& p : ps) {
        Preview l = lift_preview(p);
        lifted.push_back(l.expr());
        required.insert(required.end(), l.required().begin(),
                        l.required().end());
      }
      ExprPtr instance = lifted.front();
      lifted.erase(lifted.begin());
      return Preview::delayed(
          make_member(std::move(instance), v.name(), std::move(lifted)),
          std::move(required));
    }
    case Vertex::Kind::kFun: {
      auto body = graph_.body_of(v);
      if (!body) throw std::invalid_argument("function vertex without body");
      Preview p = eval(*body);
      const std::string& x = v.name();
      if (p.is_evaluated()) {
        return Preview::evaluated(Value::closure(x, value_to_expr(p.value())));
      }
      std::vector<std::string> rest;
      for (const auto& r : p.required()) {
        if (r != x) rest.push_back(r);
      }
      if (rest.empty()) return Preview::evaluated(Value::closure(x, p.expr()));
      return Preview::delayed(make_lambda(x, p.expr()), std::move(rest));
    }
  }
  return Preview::evaluated(Value::bottom("unknown vertex"));
}

Preview eval_preview(const Vertex& v, const DepGraph& g, PreviewCache& cache,
                     const ExternalLibrary& lib, EvalControl control) {
  PreviewEvaluator ev(g, cache, lib, std::move(control));
  return ev.eval(v);
}

std::vector<std::pair<std::size_t, Preview>> command_previews(
    const Binding& b, PreviewCache& cache, const ExternalLibrary& lib,
    EvalControl control) {
  PreviewEvaluator ev(b.graph, cache, lib, std::move(control));
  std::vector<std::pair<std::size_t, Preview>> out;
  for (std::size_t i = 0; i < b.command_vertices.size(); ++i) {
    out.emplace_back(i, ev.eval(b.command_vertices[i]));
  }
  return out;
}

std::optional<Preview> preview_at_cursor(const Binding& b, const Program& p,
                                         std::size_t offset,
                                         PreviewCache& cache,
                                         const ExternalLibrary& lib,
                                         EvalControl control) {
  auto hit = node_at_cursor(p, offset);
  if (!hit) return std::nullopt;
  auto it = b.expr_vertex.find(hit->expr);
  if (it == b.expr_vertex.end()) return std::nullopt;
  return eval_preview(it->second, b.graph, cache, lib, std::move(control));
}

}  // namespace dexp

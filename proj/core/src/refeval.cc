#include "dexp/refeval.h"

#include <set>

namespace dexp {

namespace {

bool is_value(const Expr& e) { return e.literal() || e.lambda(); }

Value as_value(const Expr& e) {
  if (auto* lit = e.literal()) return lit->value;
  const auto& lam = *e.lambda();
  return Value::closure(lam.param, lam.body);
}

// Replaces free variables not in `bound` with roots or unbound bottoms.
ExprPtr close_free(ExprPtr body, const std::set<std::string>& bound,
                   const RootList& roots) {
  for (const std::string& name : free_variables(*body)) {
    if (bound.count(name)) continue;
    ExprPtr replacement;
    for (const auto& [root, value] : roots) {
      if (root == name) {
        replacement = make_literal(value);
        break;
      }
    }
    if (!replacement) {
      replacement = make_literal(Value::bottom("unbound variable " + name));
    }
    body = substitute(body, name, replacement);
  }
  return body;
}

}  // namespace

ReferenceEvaluator::ReferenceEvaluator(const ExternalLibrary& lib,
                                       EvalOptions opts)
    : lib_(lib), opts_(opts), roots_(lib.roots()) {}

void ReferenceEvaluator::tick() {
  if (++steps_ > opts_.step_limit) throw StepLimit{};
}

std::optional<ExprPtr> ReferenceEvaluator::step(const ExprPtr& e) {
  if (is_value(*e)) return std::nullopt;
  if (auto* var = e->variable()) {
    tick();
    return make_literal(Value::bottom("unbound variable " + var->name), e->span);
  }
  const auto& mem = *e->member();
  if (auto next = step(mem.instance)) {
    return make_member(*next, mem.member, mem.args, e->span, mem.member_span);
  }
  for (std::size_t i = 0; i < mem.args.size(); ++i) {
    if (auto next = step(mem.args[i])) {
      std::vector<ExprPtr> args = mem.args;
      args[i] = *next;
      return make_member(mem.instance, mem.member, std::move(args), e->span,
                         mem.member_span);
    }
  }
  tick();
  std::vector<Value> args;
  args.reserve(mem.args.size());
  for (const auto& a : mem.args) args.push_back(as_value(*a));
  ApplyFn apply = [this](const Value& c, const Value& x) {
    return apply_closure(c, x);
  };
  Value result = lib_.eval_member(as_value(*mem.instance), mem.member, args,
                                  apply);
  return make_literal(std::move(result), e->span);
}

ExprPtr ReferenceEvaluator::reduce(ExprPtr e) {
  while (auto next = step(e)) e = std::move(*next);
  return e;
}

Value ReferenceEvaluator::apply_closure(const Value& closure, const Value& arg) {
  if (!closure.is_closure()) return Value::bottom("not a function");
  if (depth_ >= opts_.max_apply_depth) {
    return Value::bottom("function application nested too deeply");
  }
  ++depth_;
  struct Guard {
    std::size_t& d;
    ~Guard() { --d; }
  } guard{depth_};
  const Closure& c = closure.as_closure();
  tick();
  ExprPtr body = substitute(c.body, c.param, value_to_expr(arg));
  return as_value(*reduce(std::move(body)));
}

EvalReport ReferenceEvaluator::run(const Program& program) {
  struct Cmd {
    std::optional<std::string> let_name;
    ExprPtr body;
  };
  std::vector<Cmd> cmds;
  std::set<std::string> bound;
  for (const Command& c : program.commands) {
    cmds.push_back({c.let_name, close_free(c.body, bound, roots_)});
    if (c.let_name) bound.insert(*c.let_name);
  }

  EvalReport report;
  steps_ = 0;
  std::size_t k = 0;
  try {
    for (; k < cmds.size(); ++k) {
      ExprPtr v = reduce(cmds[k].body);
      if (cmds[k].let_name) {
        tick();
        const std::string& x = *cmds[k].let_name;
        for (std::size_t j = k + 1; j < cmds.size(); ++j) {
          cmds[j].body = substitute(cmds[j].body, x, v);
          if (cmds[j].let_name == x) break;
        }
      }
      report.values.push_back(as_value(*v));
    }
  } catch (const StepLimit&) {
    report.step_limit_hit = true;
    for (; k < cmds.size(); ++k) {
      report.values.push_back(Value::bottom("step limit exceeded"));
    }
  }
  report.steps = steps_;
  return report;
}

std::vector<Value> evaluate(const Program& program, const ExternalLibrary& lib) {
  return ReferenceEvaluator(lib).run(program).values;
}

namespace {

void collect_names(const Expr& e, std::set<std::string>& out) {
  if (auto* var = e.variable()) {
    out.insert(var->name);
  } else if (auto* mem = e.member()) {
    collect_names(*mem->instance, out);
    for (const auto& a : mem->args) collect_names(*a, out);
  } else if (auto* lam = e.lambda()) {
    out.insert(lam->param);
    collect_names(*lam->body, out);
  }
}

// Renames the binding at `j` and its uses up to the next rebinding.
void rename_let(Program& p, std::size_t j, const std::string& fresh) {
  std::string old = *p.commands[j].let_name;
  p.commands[j].let_name = fresh;
  ExprPtr var = make_variable(fresh);
  for (std::size_t i = j + 1; i < p.commands.size(); ++i) {
    p.commands[i].body = substitute(p.commands[i].body, old, var);
    if (p.commands[i].let_name == old) break;
  }
}

}  // namespace

Program let_eliminate(const Program& program) {
  Program out = program;
  for (std::size_t k = 0; k < out.commands.size(); ++k) {
    if (!out.commands[k].let_name) continue;
    std::string x = *out.commands[k].let_name;
    out.commands[k].let_name.reset();
    ExprPtr t = out.commands[k].body;
    std::set<std::string> t_free = free_variables(*t);
    for (std::size_t j = k + 1; j < out.commands.size(); ++j) {
      Command& c = out.commands[j];
      c.body = substitute(c.body, x, t);
      if (c.let_name == x) break;
      // A later binding of a variable free in t would capture it.
      if (c.let_name && t_free.count(*c.let_name)) {
        std::set<std::string> used;
        for (const auto& other : out.commands) {
          if (other.let_name) used.insert(*other.let_name);
          collect_names(*other.body, used);
        }
        used.insert(t_free.begin(), t_free.end());
        std::string fresh;
        for (int n = 1; fresh.empty() || used.count(fresh); ++n) {
          fresh = *c.let_name + "_" + std::to_string(n);
        }
        rename_let(out, j, fresh);
      }
    }
    break;
  }
  return out;
}

Program let_eliminate_all(const Program& program) {
  Program out = program;
  for (;;) {
    bool any = false;
    for (const auto& c : out.commands) any |= c.is_let();
    if (!any) return out;
    out = let_eliminate(out);
  }
}

}  // namespace dexp

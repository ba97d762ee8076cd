#include "fuzz.h"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dexp/extlibs/lazy_image.h"
#include "dexp/extlibs/table.h"

namespace dexp::fuzz {

namespace {

ExprPtr lit(double n) { return make_literal(Value::number(n)); }
ExprPtr str(std::string s) { return make_literal(Value::string(std::move(s))); }
ExprPtr var(std::string name) { return make_variable(std::move(name)); }
ExprPtr call(ExprPtr on, std::string m, std::vector<ExprPtr> args = {}) {
  return make_member(std::move(on), std::move(m), std::move(args));
}

const char* const kColumns[] = {"Athlete", "Team", "Games", "Medals"};
const char* const kTeams[] = {"Norland", "Estmark", "Westholm", "Atlantis"};

}  // namespace

Generator::Generator(std::uint64_t seed, Options opts)
    : rng_(seed), opts_(opts) {}

std::size_t Generator::below(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

bool Generator::chance(double p) {
  return std::bernoulli_distribution(p)(rng_);
}

Ty Generator::random_type() {
  std::vector<Ty> types = {Ty::kNum, Ty::kNum, Ty::kList, Ty::kList};
  if (opts_.images) types.push_back(Ty::kImage);
  if (opts_.tables) {
    types.push_back(Ty::kTable);
    types.push_back(Ty::kGrouped);
  }
  return types[below(types.size())];
}

ExprPtr Generator::small(int lo, int hi) {
  return lit(std::uniform_int_distribution<int>(lo, hi)(rng_));
}

ExprPtr Generator::column() { return str(kColumns[below(4)]); }
ExprPtr Generator::numeric_column() {
  return str(opts_.well_typed || chance(0.8) ? "Medals" : kColumns[below(4)]);
}

ExprPtr Generator::leaf(Ty t, const Scope& scope) {
  std::vector<std::string> vars;
  for (const auto& [name, ty] : scope) {
    if (ty == t) vars.push_back(name);
  }
  if (!vars.empty() && chance(0.5)) return var(vars[below(vars.size())]);
  switch (t) {
    case Ty::kNum:
      if (chance(0.2)) return lit(below(40) / 4.0);
      return small(opts_.well_typed ? 0 : -5, 60);
    case Ty::kList:
      if (chance(0.5)) return var("data");
      return call(var("list"), "range", {small(0, 12), small(0, 30)});
    case Ty::kImage:
      return call(var("image"), "load",
                  {str(chance(0.5) ? "shadow.png" : "poppe.png")});
    case Ty::kTable:
      return var("olympics");
    case Ty::kGrouped:
      return call(var("olympics"), "groupBy",
                  {str(chance(0.7) ? "Team" : "Games")});
  }
  throw std::logic_error("unknown type");
}

ExprPtr Generator::lambda(int depth, const Scope& scope) {
  std::string p = "p" + std::to_string(next_param_++ % 4);
  Scope inner;
  for (const auto& entry : scope) {
    if (entry.first != p) inner.push_back(entry);
  }
  inner.emplace_back(p, Ty::kNum);
  ExprPtr body = term(Ty::kNum, std::max(0, depth - 1), inner);
  return make_lambda(p, body);
}

ExprPtr Generator::wild(int depth, const Scope& scope) {
  ExprPtr on = any_term(std::max(0, depth - 1), scope);
  if (chance(0.2)) {
    const char* roots[] = {"list", "math", "image", "olympics", "data"};
    on = var(roots[below(5)]);
  }
  const auto& members = writable_member_pool();
  std::string m = members[below(members.size())];
  std::vector<ExprPtr> args;
  std::size_t arity = below(4);
  for (std::size_t i = 0; i < arity; ++i) {
    switch (below(5)) {
      case 0: args.push_back(lambda(depth, scope)); break;
      case 1: args.push_back(column()); break;
      case 2: args.push_back(small(-3, 140)); break;
      default: args.push_back(any_term(std::max(0, depth - 2), scope));
    }
  }
  return call(on, m, std::move(args));
}

ExprPtr Generator::any_term(int depth, const Scope& scope) {
  return term(random_type(), depth, scope);
}

ExprPtr Generator::term(Ty t, int depth, const Scope& scope) {
  if (depth <= 0 || chance(0.25)) return leaf(t, scope);
  if (!opts_.well_typed && chance(opts_.wild_rate)) return wild(depth, scope);
  const int d = depth - 1;
  const bool typed = opts_.well_typed;
  switch (t) {
    case Ty::kNum: {
      switch (below(typed ? 5 : 7)) {
        case 0: {
          const char* ops[] = {"add", "sub"};
          return call(var("math"), ops[below(2)],
                      {term(Ty::kNum, d, scope), term(Ty::kNum, d, scope)});
        }
        case 1:
          if (typed) {
            const char* ops[] = {"mul", "div"};
            return call(var("math"), ops[below(2)],
                        {term(Ty::kNum, d, scope), small(1, 5)});
          }
          return call(var("math"), chance(0.5) ? "mul" : "div",
                      {term(Ty::kNum, d, scope), term(Ty::kNum, d, scope)});
        case 2: return call(term(Ty::kList, d, scope), "sum");
        case 3: return call(term(Ty::kList, d, scope), "count");
        case 4:
          if (!opts_.tables) return call(term(Ty::kList, d, scope), "sum");
          return chance(0.5)
                     ? call(term(Ty::kTable, d, scope), "sum", {numeric_column()})
                     : call(term(Ty::kTable, d, scope), "countDistinct",
                            {column()});
        default:
          return call(term(Ty::kList, d, scope), "get", {small(-2, 40)});
      }
    }
    case Ty::kList:
      switch (below(4)) {
        case 0: return call(term(Ty::kList, d, scope), "map", {lambda(d, scope)});
        case 1: return call(term(Ty::kList, d, scope), "skip", {small(0, 20)});
        case 2: return call(term(Ty::kList, d, scope), "take", {small(0, 20)});
        default:
          return call(var("list"), "range", {small(-3, 10), small(0, 25)});
      }
    case Ty::kImage:
      switch (below(3)) {
        case 0: return call(term(Ty::kImage, d, scope), "greyScale");
        case 1: return call(term(Ty::kImage, d, scope), "blur", {small(0, 3)});
        default:
          return call(term(Ty::kImage, d, scope), "combine",
                      {term(Ty::kImage, d, scope), small(0, 100)});
      }
    case Ty::kTable: {
      std::size_t n = typed ? 4 : 5;
      switch (below(n)) {
        case 0:
          return call(term(Ty::kTable, d, scope), "filterEq",
                      {str(chance(0.5) ? "Team" : "Games"),
                       str(chance(0.7) ? kTeams[below(4)] : "Tokyo")});
        case 1:
          return call(term(Ty::kTable, d, scope), "sortByDesc", {column()});
        case 2: return call(term(Ty::kTable, d, scope), "take", {small(0, 7)});
        case 3: return call(term(Ty::kTable, d, scope), "skip", {small(0, 7)});
        default: {
          const char* ops[] = {"take", "skip", "sortByDesc"};
          std::size_t op = below(3);
          return call(term(Ty::kGrouped, d, scope), ops[op],
                      {op == 2 ? str("Team") : small(0, 4)});
        }
      }
    }
    case Ty::kGrouped:
      switch (below(3)) {
        case 0:
          return call(term(Ty::kTable, d, scope), "groupBy",
                      {str(chance(0.6) ? "Team" : "Games")});
        case 1:
          return call(term(Ty::kGrouped, d, scope), "sum", {numeric_column()});
        default:
          return call(term(Ty::kGrouped, d, scope), "countDistinct", {column()});
      }
  }
  throw std::logic_error("unknown type");
}

Program Generator::program() {
  Program p;
  Scope scope;
  std::size_t n = 1 + below(opts_.max_commands);
  for (std::size_t i = 0; i < n; ++i) {
    Ty t = random_type();
    ExprPtr body = term(t, static_cast<int>(below(opts_.max_depth)), scope);
    Command c;
    c.body = body;
    if (chance(0.55)) {
      std::string name;
      if (!opts_.unique_names && !scope.empty() && chance(0.15)) {
        name = scope[below(scope.size())].first;
      } else {
        name = "v" + std::to_string(next_name_++);
      }
      std::erase_if(scope, [&](const auto& e) { return e.first == name; });
      scope.emplace_back(name, t);
      c.let_name = name;
    }
    p.commands.push_back(std::move(c));
  }
  return p;
}

Program reparse(const Program& p) {
  std::string text = pretty(p);
  Program out = parse(text);
  if (!out.ok()) {
    throw std::logic_error("generated program does not reparse:\n" + text);
  }
  return out;
}

namespace {

void collect_positions(const ExprPtr& e, Path& path, std::vector<Path>& out) {
  out.push_back(path);
  const auto* m = e->member();
  if (!m) return;
  path.push_back(0);
  collect_positions(m->instance, path, out);
  path.pop_back();
  for (std::size_t i = 0; i < m->args.size(); ++i) {
    if (m->args[i]->lambda()) continue;
    path.push_back(i + 1);
    collect_positions(m->args[i], path, out);
    path.pop_back();
  }
}

ExprPtr replace_from(const ExprPtr& e, const Path& path, std::size_t i,
                     const ExprPtr& replacement) {
  if (i == path.size()) return replacement;
  const auto* m = e->member();
  if (!m) throw std::out_of_range("path leaves the expression");
  ExprPtr instance = m->instance;
  std::vector<ExprPtr> args = m->args;
  if (path[i] == 0) {
    instance = replace_from(instance, path, i + 1, replacement);
  } else {
    args.at(path[i] - 1) = replace_from(args.at(path[i] - 1), path, i + 1,
                                        replacement);
  }
  return make_member(instance, m->member, std::move(args), e->span,
                     m->member_span);
}

}  // namespace

std::vector<Path> context_positions(const ExprPtr& e) {
  std::vector<Path> out;
  Path path;
  collect_positions(e, path, out);
  return out;
}

ExprPtr at(const ExprPtr& e, const Path& path) {
  ExprPtr cur = e;
  for (std::size_t step : path) {
    const auto* m = cur->member();
    if (!m) throw std::out_of_range("path leaves the expression");
    cur = step == 0 ? m->instance : m->args.at(step - 1);
  }
  return cur;
}

ExprPtr replace_at(const ExprPtr& e, const Path& path, ExprPtr replacement) {
  return replace_from(e, path, 0, replacement);
}

std::vector<std::set<std::string>> transitive_dependencies(const Program& p) {
  std::map<std::string, std::set<std::string>> env;
  std::vector<std::set<std::string>> out;
  for (const auto& c : p.commands) {
    std::set<std::string> deps;
    for (const auto& v : free_variables(*c.body)) {
      auto it = env.find(v);
      if (it == env.end()) continue;
      deps.insert(v);
      deps.insert(it->second.begin(), it->second.end());
    }
    out.push_back(deps);
    if (c.let_name) env[*c.let_name] = deps;
  }
  return out;
}

std::set<std::string> let_names(const Program& p) {
  std::set<std::string> out;
  for (const auto& c : p.commands) {
    if (c.let_name) out.insert(*c.let_name);
  }
  return out;
}

const std::vector<std::string>& member_pool() {
  static const std::vector<std::string> names = {
      "range",   "map",       "skip",       "take",     "get",
      "count",   "sum",       "add",        "sub",      "mul",
      "div",     "load",      "greyScale",  "blur",     "combine",
      "filterEq", "groupBy",  "sortByDesc", "countDistinct",
      "",        "nope",      "constructor", "__proto__", "SUM"};
  return names;
}

std::vector<Value> value_pool(std::mt19937_64& rng) {
  auto image = [&](int w, int h) {
    ImageData d{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h * 3))};
    for (auto& b : d.rgb) b = static_cast<std::uint8_t>(rng() & 0xff);
    return Value::image(std::move(d));
  };
  TableData table{{"Name", "Score"},
                  {{Value::string("a"), Value::number(3)},
                   {Value::string("b"), Value::number(5)},
                   {Value::string("a"), Value::string("x")}}};
  TableData ragged{{"Only"}, {{}, {Value::number(1), Value::number(2)}}};
  std::vector<GroupedTable::Group> groups = {
      {Value::string("a"), {0, 2}}, {Value::string("b"), {1}}};
  auto grouped = std::make_shared<GroupedTable>(
      table, "Name", groups,
      std::vector<std::pair<std::string, std::vector<Value>>>{});

  std::vector<Value> pool = {
      Value::number(0),
      Value::number(1),
      Value::number(-1),
      Value::number(2.5),
      Value::number(64),
      Value::number(65),
      Value::number(100),
      Value::number(1e9),
      Value::number(-1e18),
      Value::string(""),
      Value::string("Medals"),
      Value::string("Name"),
      Value::string("Score"),
      Value::string("shadow.png"),
      Value::string("poppe.png"),
      Value::string("../olympics.csv"),
      Value::string("/etc/passwd"),
      Value::string("missing.png"),
      Value::list({}),
      Value::list({Value::number(1), Value::number(2), Value::number(3)}),
      Value::list({Value::string("x"), Value::bottom("inner")}),
      Value::list({Value::list({Value::number(1)})}),
      image(1, 1),
      image(8, 8),
      image(3, 5),
      image(0, 0),
      Value::table(table),
      Value::table(ragged),
      Value::table(TableData{}),
      Value::foreign(grouped),
      Value::module("list"),
      Value::module("math"),
      Value::module("image"),
      Value::module("elsewhere"),
      Value::closure("x", make_variable("x")),
      Value::closure("x", make_member(make_variable("math"), "add",
                                      {make_variable("x"), lit(1)})),
      Value::closure("x", make_member(make_variable("x"), "nope", {})),
      Value::closure("x", make_variable("list")),
      Value::bottom("earlier failure"),
  };
  pool.push_back(Value::foreign(std::make_shared<ImageThunk>(
      pool[23], "blur", std::vector<Value>{Value::number(1)})));
  pool.push_back(Value::foreign(std::make_shared<ImageThunk>(
      pool[22], "combine", std::vector<Value>{pool[23], Value::number(50)})));
  return pool;
}

const std::vector<std::string>& writable_member_pool() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& m : member_pool()) {
      if (!m.empty()) out.push_back(m);
    }
    return out;
  }();
  return names;
}

}  // namespace dexp::fuzz

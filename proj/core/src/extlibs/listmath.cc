#include "dexp/extlibs/listmath.h"

#include <cmath>

#include "dexp/extlibs/common.h"

namespace dexp {

using extlib::argument_error;
using extlib::arity_error;
using extlib::as_int;

ListMathLibrary::ListMathLibrary(std::int64_t data_size) {
  std::vector<Value> items;
  for (std::int64_t i = 0; i < data_size; ++i) {
    items.push_back(Value::number(static_cast<double>(i)));
  }
  data_ = Value::list(std::move(items));

  TypePtr num = types::num();
  TypePtr list = Type::object("list");
  ObjectSignature l{"list", {}};
  l.members["range"] = {{num, num}, list};
  l.members["map"] = {{Type::fun(num, num)}, list};
  l.members["skip"] = {{num}, list};
  l.members["take"] = {{num}, list};
  l.members["get"] = {{num}, num};
  l.members["count"] = {{}, num};
  l.members["sum"] = {{}, num};
  sigs_.emplace("list", std::move(l));

  ObjectSignature m{"math", {}};
  for (const char* op : {"add", "sub", "mul", "div"}) {
    m.members[op] = {{num, num}, num};
  }
  sigs_.emplace("math", std::move(m));
}

RootList ListMathLibrary::roots() const {
  return {{"list", Value::list({})},
          {"math", Value::module("math")},
          {"data", data_}};
}

bool ListMathLibrary::handles(const Value& receiver) const {
  if (receiver.kind() == Value::Kind::kList) return true;
  return receiver.kind() == Value::Kind::kModule &&
         receiver.as_string() == "math";
}

Value ListMathLibrary::eval_member(const Value& receiver,
                                   std::string_view member,
                                   std::span<const Value> args,
                                   const ApplyFn& apply) const {
  if (auto b = extlib::first_bottom(receiver, args)) return *b;
  if (receiver.kind() == Value::Kind::kList) {
    return list_member(receiver, member, args, apply);
  }
  if (handles(receiver)) return math_member(member, args);
  return extlib::no_member(receiver, member);
}

namespace {

Value finite(double n, std::string_view what) {
  if (!std::isfinite(n)) {
    return Value::bottom(std::string(what) + " is not a finite number");
  }
  return Value::number(n);
}

}  // namespace

Value ListMathLibrary::list_member(const Value& receiver,
                                   std::string_view member,
                                   std::span<const Value> args,
                                   const ApplyFn& apply) const {
  const auto& items = receiver.as_list();
  auto want = [&](std::size_t n) -> std::optional<Value> {
    if (args.size() != n) return arity_error(member, n, args.size());
    return std::nullopt;
  };

  if (member == "map") {
    if (auto e = want(1)) return *e;
    if (!args[0].is_closure()) return argument_error(member, "a function");
    std::vector<Value> out;
    out.reserve(items.size());
    for (const Value& item : items) {
      Value r = apply(args[0], item);
      if (r.is_bottom()) return r;
      if (r.is_closure()) {
        return Value::bottom("map function returned a function");
      }
      out.push_back(std::move(r));
    }
    return Value::list(std::move(out));
  }
  if (member == "range") {
    if (auto e = want(2)) return *e;
    auto a = as_int(args[0], -kMaxRange, kMaxRange);
    auto b = as_int(args[1], -kMaxRange, kMaxRange);
    if (!a || !b) return argument_error(member, "two integers");
    if (*b - *a > kMaxRange) return Value::bottom("range is too large");
    std::vector<Value> out(items.begin(), items.end());
    for (std::int64_t i = *a; i < *b; ++i) {
      out.push_back(Value::number(static_cast<double>(i)));
    }
    return Value::list(std::move(out));
  }
  if (member == "skip" || member == "take") {
    if (auto e = want(1)) return *e;
    auto n = as_int(args[0], 0, INT64_MAX / 2);
    if (!n) return argument_error(member, "a non-negative integer");
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(*n),
                                          items.size());
    if (member == "skip") {
      return Value::list({items.begin() + static_cast<std::ptrdiff_t>(k),
                          items.end()});
    }
    return Value::list(
        {items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k)});
  }
  if (member == "get") {
    if (auto e = want(1)) return *e;
    auto i = as_int(args[0], 0, INT64_MAX / 2);
    if (!i || static_cast<std::size_t>(*i) >= items.size()) {
      return Value::bottom("index out of range");
    }
    return items[static_cast<std::size_t>(*i)];
  }
  if (member == "count") {
    if (auto e = want(0)) return *e;
    return Value::number(static_cast<double>(items.size()));
  }
  if (member == "sum") {
    if (auto e = want(0)) return *e;
    double total = 0;
    for (const Value& item : items) {
      if (!item.is_number()) return Value::bottom("sum of a non-number");
      total += item.as_number();
    }
    return finite(total, "sum");
  }
  return extlib::no_member(receiver, member);
}

Value ListMathLibrary::math_member(std::string_view member,
                                   std::span<const Value> args) const {
  if (member != "add" && member != "sub" && member != "mul" &&
      member != "div") {
    return extlib::no_member(Value::module("math"), member);
  }
  if (args.size() != 2) return arity_error(member, 2, args.size());
  if (!args[0].is_number() || !args[1].is_number()) {
    return argument_error(member, "two numbers");
  }
  double a = args[0].as_number();
  double b = args[1].as_number();
  if (member == "add") return finite(a + b, member);
  if (member == "sub") return finite(a - b, member);
  if (member == "mul") return finite(a * b, member);
  if (b == 0) return Value::bottom("division by zero");
  return finite(a / b, member);
}

TypePtr ListMathLibrary::type_of(const Value& v) const {
  if (v.kind() == Value::Kind::kList) return Type::object("list");
  if (handles(v)) return Type::object("math");
  return Type::error("not a list or math value");
}

const ObjectSignature* ListMathLibrary::object_type(
    std::string_view name) const {
  auto it = sigs_.find(name);
  return it == sigs_.end() ? nullptr : &it->second;
}

}  // namespace dexp

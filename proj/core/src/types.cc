#include "dexp/types.h"

namespace dexp {

TypePtr Type::prim(std::string name) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kPrim;
  t->name = std::move(name);
  return t;
}

TypePtr Type::fun(TypePtr input, TypePtr output) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kFun;
  t->input = std::move(input);
  t->output = std::move(output);
  return t;
}

TypePtr Type::object(std::string name) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kObject;
  t->name = std::move(name);
  return t;
}

TypePtr Type::error(std::string message, bool propagated) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kError;
  t->name = std::move(message);
  t->propagated = propagated;
  return t;
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Type::Kind::kPrim:
    case Type::Kind::kObject:
      return a.name == b.name;
    case Type::Kind::kFun:
      return same_type(a.input, b.input) && same_type(a.output, b.output);
    case Type::Kind::kError:
      return a.name == b.name && a.propagated == b.propagated;
  }
  return false;
}

bool same_type(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case Type::Kind::kPrim:
    case Type::Kind::kObject:
      return t.name;
    case Type::Kind::kFun: {
      std::string in = to_string(*t.input);
      if (t.input->kind == Type::Kind::kFun) in = "(" + in + ")";
      return in + " -> " + to_string(*t.output);
    }
    case Type::Kind::kError:
      return "error: " + t.name;
  }
  return "?";
}

std::string to_string(const MemberSig& sig) {
  std::string out = "(";
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    if (i) out += ", ";
    out += to_string(*sig.params[i]);
  }
  return out + ") -> " + to_string(*sig.result);
}

namespace types {

TypePtr num() {
  static const TypePtr t = Type::prim("num");
  return t;
}

TypePtr str() {
  static const TypePtr t = Type::prim("str");
  return t;
}

}  // namespace types

}  // namespace dexp

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace dexp {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

/// Primitive, function, nominal object, or error type. Object types name a
/// signature that the typed library resolves on demand, which lets object
/// types refer to themselves (a list member returning a list).
struct Type {
  enum class Kind { kPrim, kFun, kObject, kError };

  Kind kind = Kind::kError;
  /// Primitive name, object name, or error message.
  std::string name;
  TypePtr input;
  TypePtr output;
  /// Error inherited from a sub-expression rather than raised here.
  bool propagated = false;

  static TypePtr prim(std::string name);
  static TypePtr fun(TypePtr input, TypePtr output);
  static TypePtr object(std::string name);
  static TypePtr error(std::string message, bool propagated = false);

  bool is_error() const { return kind == Kind::kError; }
};

bool operator==(const Type& a, const Type& b);
inline bool operator!=(const Type& a, const Type& b) { return !(a == b); }
bool same_type(const TypePtr& a, const TypePtr& b);

std::string to_string(const Type& t);

struct MemberSig {
  std::vector<TypePtr> params;
  TypePtr result;
};

std::string to_string(const MemberSig& sig);

struct ObjectSignature {
  std::string name;
  std::map<std::string, MemberSig> members;
};

namespace types {
TypePtr num();
TypePtr str();
}  // namespace types

}  // namespace dexp

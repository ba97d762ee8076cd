#pragma once

#include <map>
#include <string>

#include "dexp/library.h"

namespace dexp {

/// Lists of numbers and arithmetic. Roots: `list` (the empty list),
/// `math`, and `data` (0..size-1 by default).
///
/// list: range(a, b) appends [a, b) to the receiver; map(f); skip(n);
/// take(n); get(i); count; sum.  math: add, sub, mul, div.
class ListMathLibrary final : public TypedLibrary {
 public:
  static constexpr std::int64_t kMaxRange = 1'000'000;

  explicit ListMathLibrary(std::int64_t data_size = 100);

  std::string_view name() const override { return "listmath"; }
  RootList roots() const override;
  bool handles(const Value& receiver) const override;
  Value eval_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args,
                    const ApplyFn& apply) const override;
  TypePtr type_of(const Value& v) const override;
  const ObjectSignature* object_type(std::string_view name) const override;

 private:
  Value list_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args, const ApplyFn& apply) const;
  Value math_member(std::string_view member, std::span<const Value> args) const;

  Value data_;
  std::map<std::string, ObjectSignature, std::less<>> sigs_;
};

}  // namespace dexp

#include "dexp/extlibs/common.h"

#include <cmath>

namespace dexp::extlib {

std::optional<Value> first_bottom(const Value& receiver,
                                  std::span<const Value> args) {
  if (receiver.is_bottom()) return receiver;
  for (const Value& a : args) {
    if (a.is_bottom()) return a;
  }
  return std::nullopt;
}

Value no_member(const Value& receiver, std::string_view member) {
  return Value::bottom("no member " + std::string(member) + " on " +
                       std::string(receiver.tag()));
}

Value arity_error(std::string_view member, std::size_t expected,
                  std::size_t got) {
  return Value::bottom(std::string(member) + " expects " +
                       std::to_string(expected) + " argument" +
                       (expected == 1 ? "" : "s") + ", got " +
                       std::to_string(got));
}

Value argument_error(std::string_view member, std::string_view expected) {
  return Value::bottom(std::string(member) + " expects " +
                       std::string(expected));
}

std::optional<std::int64_t> as_int(const Value& v, std::int64_t lo,
                                   std::int64_t hi) {
  if (!v.is_number()) return std::nullopt;
  double n = v.as_number();
  if (n != std::trunc(n) || n < static_cast<double>(lo) ||
      n > static_cast<double>(hi)) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(n);
}

std::string display_text(const Value& v) {
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_string()) return v.as_string();
  return v.serialize();
}

}  // namespace dexp::extlib

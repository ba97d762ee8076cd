#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "dexp/value.h"

namespace dexp::extlib {

/// First bottom among receiver and arguments, if any.
std::optional<Value> first_bottom(const Value& receiver,
                                  std::span<const Value> args);

Value no_member(const Value& receiver, std::string_view member);
Value arity_error(std::string_view member, std::size_t expected,
                  std::size_t got);
Value argument_error(std::string_view member, std::string_view expected);

/// Integral number within [lo, hi].
std::optional<std::int64_t> as_int(const Value& v, std::int64_t lo,
                                   std::int64_t hi);

/// Display text of a scalar cell: numbers in decimal, strings verbatim.
std::string display_text(const Value& v);

}  // namespace dexp::extlib

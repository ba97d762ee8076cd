#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dexp {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Value;

/// Row-major 8-bit RGB pixels.
struct ImageData {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const ImageData&, const ImageData&) = default;
};

struct TableData {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
};

struct Closure {
  std::string param;
  ExprPtr body;
};

/// Library-defined object kinds the core does not know about (lazy image
/// thunks, grouped tables). Implementations must be immutable.
class ForeignValue {
 public:
  virtual ~ForeignValue() = default;
  virtual std::string_view tag() const = 0;
  virtual std::string serialize() const = 0;
  virtual bool equals(const ForeignValue& other) const = 0;
  virtual std::size_t hash() const = 0;
  /// A core value that stands in for this one when rendering, if any.
  virtual std::optional<Value> presentable() const;
};

/// An object of the calculus: either a library object (number, string,
/// list, image, table, module, foreign), a closure, or the failure value.
///
/// Values are immutable and cheap to copy. Equality is deep and exact.
class Value {
 public:
  enum class Kind {
    kNumber,
    kString,
    kList,
    kImage,
    kTable,
    kModule,
    kClosure,
    kForeign,
    kBottom,
  };

  /// The failure value with an empty message.
  Value();

  static Value number(double n);
  static Value string(std::string s);
  static Value list(std::vector<Value> items);
  static Value image(ImageData data);
  static Value table(TableData data);
  static Value module(std::string name);
  static Value closure(std::string param, ExprPtr body);
  static Value foreign(std::shared_ptr<const ForeignValue> v);
  static Value bottom(std::string message);

  Kind kind() const;
  bool is_bottom() const { return kind() == Kind::kBottom; }
  bool is_closure() const { return kind() == Kind::kClosure; }
  bool is_number() const { return kind() == Kind::kNumber; }
  bool is_string() const { return kind() == Kind::kString; }

  double as_number() const;
  /// String contents, module name or failure message.
  const std::string& as_string() const;
  const std::vector<Value>& as_list() const;
  const ImageData& as_image() const;
  const TableData& as_table() const;
  const Closure& as_closure() const;
  const ForeignValue& as_foreign() const;
  const std::string& bottom_message() const { return as_string(); }

  /// Dispatch tag: num, str, list, image, table, module, closure, bottom,
  /// or the foreign value's own tag.
  std::string_view tag() const;

  std::size_t hash() const;

  /// Canonical text form. Equal values serialize identically; images are
  /// summarized by size and pixel digest.
  std::string serialize() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  struct Rep;
  explicit Value(std::shared_ptr<const Rep> rep);
  std::shared_ptr<const Rep> rep_;
};

std::string_view kind_name(Value::Kind kind);

/// Decimal text; integral values print without a fraction.
std::string format_number(double n);

/// FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t seed = 1469598103934665603ULL);

inline void hash_combine(std::size_t& seed, std::size_t h) {
  seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace dexp

template <>
struct std::hash<dexp::Value> {
  std::size_t operator()(const dexp::Value& v) const { return v.hash(); }
};

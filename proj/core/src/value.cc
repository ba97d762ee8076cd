#include "dexp/value.h"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <variant>

#include "dexp/syntax.h"

namespace dexp {

namespace {

struct StringPayload {
  std::string text;
};
struct ModulePayload {
  std::string name;
};
struct BottomPayload {
  std::string message;
};

using Payload =
    std::variant<double, StringPayload, std::vector<Value>, ImageData,
                 TableData, ModulePayload, Closure,
                 std::shared_ptr<const ForeignValue>, BottomPayload>;

constexpr std::size_t kUnhashed = 0;

}  // namespace

struct Value::Rep {
  Kind kind;
  Payload payload;
  mutable std::atomic<std::size_t> hash{kUnhashed};

  Rep(Kind k, Payload p) : kind(k), payload(std::move(p)) {}
};

std::optional<Value> ForeignValue::presentable() const { return std::nullopt; }

std::optional<std::size_t> TableData::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

Value::Value() : Value(bottom("")) {}

Value::Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}

Value Value::number(double n) {
  return Value(std::make_shared<const Rep>(Kind::kNumber, n));
}

Value Value::string(std::string s) {
  return Value(
      std::make_shared<const Rep>(Kind::kString, StringPayload{std::move(s)}));
}

Value Value::list(std::vector<Value> items) {
  return Value(std::make_shared<const Rep>(Kind::kList, std::move(items)));
}

Value Value::image(ImageData data) {
  if (data.width < 0 || data.height < 0 ||
      data.rgb.size() != static_cast<std::size_t>(data.width) *
                             static_cast<std::size_t>(data.height) * 3) {
    throw std::invalid_argument("image buffer does not match its dimensions");
  }
  return Value(std::make_shared<const Rep>(Kind::kImage, std::move(data)));
}

Value Value::table(TableData data) {
  return Value(std::make_shared<const Rep>(Kind::kTable, std::move(data)));
}

Value Value::module(std::string name) {
  return Value(
      std::make_shared<const Rep>(Kind::kModule, ModulePayload{std::move(name)}));
}

Value Value::closure(std::string param, ExprPtr body) {
  return Value(std::make_shared<const Rep>(
      Kind::kClosure, Closure{std::move(param), std::move(body)}));
}

Value Value::foreign(std::shared_ptr<const ForeignValue> v) {
  if (!v) throw std::invalid_argument("null foreign value");
  return Value(std::make_shared<const Rep>(Kind::kForeign, std::move(v)));
}

Value Value::bottom(std::string message) {
  return Value(std::make_shared<const Rep>(Kind::kBottom,
                                           BottomPayload{std::move(message)}));
}

Value::Kind Value::kind() const { return rep_->kind; }

double Value::as_number() const { return std::get<double>(rep_->payload); }

const std::string& Value::as_string() const {
  switch (rep_->kind) {
    case Kind::kString:
      return std::get<StringPayload>(rep_->payload).text;
    case Kind::kModule:
      return std::get<ModulePayload>(rep_->payload).name;
    case Kind::kBottom:
      return std::get<BottomPayload>(rep_->payload).message;
    default:
      throw std::logic_error("value has no string payload");
  }
}

const std::vector<Value>& Value::as_list() const {
  return std::get<std::vector<Value>>(rep_->payload);
}

const ImageData& Value::as_image() const {
  return std::get<ImageData>(rep_->payload);
}

const TableData& Value::as_table() const {
  return std::get<TableData>(rep_->payload);
}

const Closure& Value::as_closure() const {
  return std::get<Closure>(rep_->payload);
}

const ForeignValue& Value::as_foreign() const {
  return *std::get<std::shared_ptr<const ForeignValue>>(rep_->payload);
}

std::string_view Value::tag() const {
  if (rep_->kind == Kind::kForeign) return as_foreign().tag();
  return kind_name(rep_->kind);
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::kNumber: return "num";
    case Value::Kind::kString: return "str";
    case Value::Kind::kList: return "list";
    case Value::Kind::kImage: return "image";
    case Value::Kind::kTable: return "table";
    case Value::Kind::kModule: return "module";
    case Value::Kind::kClosure: return "closure";
    case Value::Kind::kForeign: return "foreign";
    case Value::Kind::kBottom: return "bottom";
  }
  return "?";
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::size_t hash_string(std::string_view s) {
  return static_cast<std::size_t>(fnv1a(s.data(), s.size()));
}

std::size_t hash_number(double n) {
  if (n == 0) n = 0;  // fold -0
  std::uint64_t bits;
  std::memcpy(&bits, &n, sizeof bits);
  return static_cast<std::size_t>(fnv1a(&bits, sizeof bits));
}

std::size_t hash_expr(const Expr& e);

std::size_t compute_hash(Value::Kind kind, const Payload& payload) {
  std::size_t seed = static_cast<std::size_t>(kind) * 0x51ed27ULL + 1;
  switch (kind) {
    case Value::Kind::kNumber:
      hash_combine(seed, hash_number(std::get<double>(payload)));
      break;
    case Value::Kind::kString:
      hash_combine(seed, hash_string(std::get<StringPayload>(payload).text));
      break;
    case Value::Kind::kModule:
      hash_combine(seed, hash_string(std::get<ModulePayload>(payload).name));
      break;
    case Value::Kind::kBottom:
      hash_combine(seed, hash_string(std::get<BottomPayload>(payload).message));
      break;
    case Value::Kind::kList:
      for (const Value& v : std::get<std::vector<Value>>(payload)) {
        hash_combine(seed, v.hash());
      }
      break;
    case Value::Kind::kImage: {
      const auto& img = std::get<ImageData>(payload);
      hash_combine(seed, static_cast<std::size_t>(img.width));
      hash_combine(seed, static_cast<std::size_t>(img.height));
      hash_combine(seed, fnv1a(img.rgb.data(), img.rgb.size()));
      break;
    }
    case Value::Kind::kTable: {
      const auto& t = std::get<TableData>(payload);
      for (const auto& c : t.columns) hash_combine(seed, hash_string(c));
      for (const auto& row : t.rows) {
        for (const auto& cell : row) hash_combine(seed, cell.hash());
      }
      break;
    }
    case Value::Kind::kClosure: {
      const auto& c = std::get<Closure>(payload);
      hash_combine(seed, hash_string(c.param));
      hash_combine(seed, hash_expr(*c.body));
      break;
    }
    case Value::Kind::kForeign:
      hash_combine(seed,
                   std::get<std::shared_ptr<const ForeignValue>>(payload)->hash());
      break;
  }
  return seed == kUnhashed ? 1 : seed;
}

std::size_t hash_expr(const Expr& e) {
  std::size_t seed = e.node.index() + 17;
  if (auto* lit = e.literal()) {
    hash_combine(seed, lit->value.hash());
  } else if (auto* var = e.variable()) {
    hash_combine(seed, hash_string(var->name));
  } else if (auto* mem = e.member()) {
    hash_combine(seed, hash_expr(*mem->instance));
    hash_combine(seed, hash_string(mem->member));
    for (const auto& a : mem->args) hash_combine(seed, hash_expr(*a));
  } else if (auto* lam = e.lambda()) {
    hash_combine(seed, hash_string(lam->param));
    hash_combine(seed, hash_expr(*lam->body));
  }
  return seed;
}

}  // namespace

std::size_t Value::hash() const {
  std::size_t h = rep_->hash.load(std::memory_order_relaxed);
  if (h == kUnhashed) {
    h = compute_hash(rep_->kind, rep_->payload);
    rep_->hash.store(h, std::memory_order_relaxed);
  }
  return h;
}

bool operator==(const Value& a, const Value& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.rep_->kind != b.rep_->kind) return false;
  if (a.hash() != b.hash()) return false;
  switch (a.rep_->kind) {
    case Value::Kind::kNumber:
      return a.as_number() == b.as_number();
    case Value::Kind::kString:
    case Value::Kind::kModule:
    case Value::Kind::kBottom:
      return a.as_string() == b.as_string();
    case Value::Kind::kList:
      return a.as_list() == b.as_list();
    case Value::Kind::kImage:
      return a.as_image() == b.as_image();
    case Value::Kind::kTable: {
      const auto& x = a.as_table();
      const auto& y = b.as_table();
      return x.columns == y.columns && x.rows == y.rows;
    }
    case Value::Kind::kClosure: {
      const auto& x = a.as_closure();
      const auto& y = b.as_closure();
      return x.param == y.param && same_structure(*x.body, *y.body);
    }
    case Value::Kind::kForeign:
      return a.as_foreign().equals(b.as_foreign());
  }
  return false;
}

std::string format_number(double n) {
  if (std::isnan(n)) return "nan";
  if (std::isinf(n)) return n > 0 ? "inf" : "-inf";
  if (n == std::trunc(n) && std::fabs(n) < 1e15) {
    return std::to_string(static_cast<long long>(n));
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, n);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string Value::serialize() const {
  switch (rep_->kind) {
    case Kind::kNumber:
      return format_number(as_number());
    case Kind::kString:
      return quote_string(as_string());
    case Kind::kModule:
      return "<" + as_string() + ">";
    case Kind::kBottom:
      return as_string().empty() ? "⊥" : "⊥(" + as_string() + ")";
    case Kind::kList: {
      std::string out = "[";
      const auto& items = as_list();
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].serialize();
      }
      return out + "]";
    }
    case Kind::kImage: {
      const auto& img = as_image();
      char digest[17];
      std::snprintf(digest, sizeof digest, "%016llx",
                    static_cast<unsigned long long>(
                        fnv1a(img.rgb.data(), img.rgb.size())));
      return "image(" + std::to_string(img.width) + "x" +
             std::to_string(img.height) + "#" + digest + ")";
    }
    case Kind::kTable: {
      const auto& t = as_table();
      std::string out = "table(";
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ",";
        out += quote_string(t.columns[i]);
      }
      out += ";";
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (r) out += ";";
        for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
          if (c) out += ",";
          out += t.rows[r][c].serialize();
        }
      }
      return out + ")";
    }
    case Kind::kClosure: {
      const auto& c = as_closure();
      return "fun " + quote_identifier(c.param) + " -> " + pretty(*c.body);
    }
    case Kind::kForeign:
      return as_foreign().serialize();
  }
  return "?";
}

}  // namespace dexp

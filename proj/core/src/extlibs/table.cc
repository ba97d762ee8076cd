#include "dexp/extlibs/table.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dexp/extlibs/common.h"

namespace dexp {

namespace csv {

namespace {

Value cell_value(std::string_view text) {
  if (!text.empty()) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec == std::errc() && res.ptr == text.data() + text.size() &&
        std::isfinite(v)) {
      return Value::number(v);
    }
  }
  return Value::string(std::string(text));
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::variant<TableData, std::string> parse(std::string_view text) {
  TableData t;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split(line);
    if (header) {
      for (auto c : cells) t.columns.emplace_back(c);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      return "line " + std::to_string(line_no) + " has " +
             std::to_string(cells.size()) + " cells, expected " +
             std::to_string(t.columns.size());
    }
    std::vector<Value> row;
    for (auto c : cells) row.push_back(cell_value(c));
    t.rows.push_back(std::move(row));
  }
  if (header) return std::string("missing header row");
  return t;
}

std::variant<TableData, std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "cannot open " + p.filename().string();
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace csv

GroupedTable::GroupedTable(
    TableData source, std::string key_column, std::vector<Group> groups,
    std::vector<std::pair<std::string, std::vector<Value>>> aggs)
    : source_(std::move(source)),
      key_(std::move(key_column)),
      groups_(std::move(groups)),
      aggs_(std::move(aggs)) {
  hash_ = Value::table(source_).hash();
  hash_combine(hash_, std::hash<std::string>{}(key_));
  for (const auto& [name, vals] : aggs_) {
    hash_combine(hash_, std::hash<std::string>{}(name));
    for (const auto& v : vals) hash_combine(hash_, v.hash());
  }
}

TableData GroupedTable::materialize() const {
  TableData t;
  t.columns.push_back(key_);
  for (const auto& a : aggs_) t.columns.push_back(a.first);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    std::vector<Value> row{groups_[g].key};
    for (const auto& a : aggs_) row.push_back(a.second[g]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string GroupedTable::serialize() const {
  return "grouped(" + key_ + ";" + Value::table(materialize()).serialize() +
         ")";
}

bool GroupedTable::equals(const ForeignValue& other) const {
  auto* o = dynamic_cast<const GroupedTable*>(&other);
  if (!o || o->hash_ != hash_ || o->key_ != key_) return false;
  if (o->aggs_ != aggs_) return false;
  return Value::table(o->source_) == Value::table(source_);
}

std::optional<Value> GroupedTable::presentable() const {
  return Value::table(materialize());
}

using extlib::argument_error;
using extlib::arity_error;

TableLibrary::TableLibrary(const std::filesystem::path& file,
                           std::string root_name)
    : root_name_(std::move(root_name)) {
  auto r = csv::read_file(file);
  if (auto* t = std::get_if<TableData>(&r)) {
    root_ = Value::table(std::move(*t));
  } else {
    root_ = Value::bottom(std::get<std::string>(r));
  }

  TypePtr num = types::num();
  TypePtr str = types::str();
  TypePtr table = Type::object("table");
  TypePtr grouped = Type::object("grouped");
  ObjectSignature t{"table", {}};
  t.members["filterEq"] = {{str, str}, table};
  t.members["groupBy"] = {{str}, grouped};
  t.members["sortByDesc"] = {{str}, table};
  t.members["take"] = {{num}, table};
  t.members["skip"] = {{num}, table};
  t.members["sum"] = {{str}, num};
  t.members["countDistinct"] = {{str}, num};
  sigs_.emplace(t.name, std::move(t));
  ObjectSignature g{"grouped", {}};
  g.members["sum"] = {{str}, grouped};
  g.members["countDistinct"] = {{str}, grouped};
  g.members["filterEq"] = {{str, str}, table};
  g.members["sortByDesc"] = {{str}, table};
  g.members["take"] = {{num}, table};
  g.members["skip"] = {{num}, table};
  sigs_.emplace(g.name, std::move(g));
}

RootList TableLibrary::roots() const { return {{root_name_, root_}}; }

bool TableLibrary::handles(const Value& receiver) const {
  return receiver.kind() == Value::Kind::kTable ||
         (receiver.kind() == Value::Kind::kForeign &&
          receiver.tag() == "grouped");
}

Value TableLibrary::eval_member(const Value& receiver, std::string_view member,
                                std::span<const Value> args,
                                const ApplyFn&) const {
  if (auto b = extlib::first_bottom(receiver, args)) return *b;
  if (receiver.kind() == Value::Kind::kTable) {
    return table_member(receiver.as_table(), member, args);
  }
  if (handles(receiver)) {
    return grouped_member(
        static_cast<const GroupedTable&>(receiver.as_foreign()), member, args);
  }
  return extlib::no_member(receiver, member);
}

namespace {

Value unknown_column(std::string_view col) {
  return Value::bottom("unknown column " + std::string(col));
}

// Descending order: numbers above strings, numbers by value, strings
// lexicographically.
bool greater_cell(const Value& a, const Value& b) {
  if (a.is_number() != b.is_number()) return a.is_number();
  if (a.is_number()) return a.as_number() > b.as_number();
  return extlib::display_text(a) > extlib::display_text(b);
}

struct ColumnArg {
  std::size_t index = 0;
  std::optional<Value> error;
};

ColumnArg column_arg(const TableData& t, std::string_view member,
                     const Value& arg) {
  if (!arg.is_string()) return {0, argument_error(member, "a column name")};
  auto idx = t.column_index(arg.as_string());
  if (!idx) return {0, unknown_column(arg.as_string())};
  return {*idx, std::nullopt};
}

std::optional<double> column_sum(const TableData& t, std::size_t col,
                                 std::vector<std::size_t> const* rows) {
  double total = 0;
  auto add = [&](std::size_t r) {
    const Value& c = t.rows[r][col];
    if (!c.is_number()) return false;
    total += c.as_number();
    return true;
  };
  if (rows) {
    for (std::size_t r : *rows) {
      if (!add(r)) return std::nullopt;
    }
  } else {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (!add(r)) return std::nullopt;
    }
  }
  if (!std::isfinite(total)) return std::nullopt;
  return total;
}

std::size_t column_distinct(const TableData& t, std::size_t col,
                            std::vector<std::size_t> const* rows) {
  std::unordered_map<Value, bool> seen;
  if (rows) {
    for (std::size_t r : *rows) seen.emplace(t.rows[r][col], true);
  } else {
    for (const auto& row : t.rows) seen.emplace(row[col], true);
  }
  return seen.size();
}

}  // namespace

Value TableLibrary::table_member(const TableData& t, std::string_view member,
                                 std::span<const Value> args) const {
  auto want = [&](std::size_t n) -> std::optional<Value> {
    if (args.size() != n) return arity_error(member, n, args.size());
    return std::nullopt;
  };

  if (member == "take" || member == "skip") {
    if (auto e = want(1)) return *e;
    auto n = extlib::as_int(args[0], 0, INT64_MAX / 2);
    if (!n) return argument_error(member, "a non-negative integer");
    auto k = static_cast<std::ptrdiff_t>(
        std::min<std::size_t>(static_cast<std::size_t>(*n), t.rows.size()));
    TableData out{t.columns, {}};
    if (member == "take") {
      out.rows.assign(t.rows.begin(), t.rows.begin() + k);
    } else {
      out.rows.assign(t.rows.begin() + k, t.rows.end());
    }
    return Value::table(std::move(out));
  }
  if (member == "filterEq") {
    if (auto e = want(2)) return *e;
    auto col = column_arg(t, member, args[0]);
    if (col.error) return *col.error;
    if (!args[1].is_string()) return argument_error(member, "a text value");
    TableData out{t.columns, {}};
    for (const auto& row : t.rows) {
      if (extlib::display_text(row[col.index]) == args[1].as_string()) {
        out.rows.push_back(row);
      }
    }
    return Value::table(std::move(out));
  }
  if (member == "sortByDesc") {
    if (auto e = want(1)) return *e;
    auto col = column_arg(t, member, args[0]);
    if (col.error) return *col.error;
    TableData out = t;
    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [&](const auto& a, const auto& b) {
                       return greater_cell(a[col.index], b[col.index]);
                     });
    return Value::table(std::move(out));
  }
  if (member == "sum") {
    if (auto e = want(1)) return *e;
    auto col = column_arg(t, member, args[0]);
    if (col.error) return *col.error;
    auto s = column_sum(t, col.index, nullptr);
    if (!s) return Value::bottom("sum over a non-numeric column");
    return Value::number(*s);
  }
  if (member == "countDistinct") {
    if (auto e = want(1)) return *e;
    auto col = column_arg(t, member, args[0]);
    if (col.error) return *col.error;
    return Value::number(
        static_cast<double>(column_distinct(t, col.index, nullptr)));
  }
  if (member == "groupBy") {
    if (auto e = want(1)) return *e;
    auto col = column_arg(t, member, args[0]);
    if (col.error) return *col.error;
    std::vector<GroupedTable::Group> groups;
    std::unordered_map<Value, std::size_t> index;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const Value& key = t.rows[r][col.index];
      auto [it, fresh] = index.emplace(key, groups.size());
      if (fresh) groups.push_back({key, {}});
      groups[it->second].rows.push_back(r);
    }
    return Value::foreign(std::make_shared<GroupedTable>(
        t, t.columns[col.index], std::move(groups),
        std::vector<std::pair<std::string, std::vector<Value>>>{}));
  }
  return extlib::no_member(Value::table(t), member);
}

Value TableLibrary::grouped_member(const GroupedTable& g,
                                   std::string_view member,
                                   std::span<const Value> args) const {
  if (member == "sum" || member == "countDistinct") {
    if (args.size() != 1) return arity_error(member, 1, args.size());
    auto col = column_arg(g.source(), member, args[0]);
    if (col.error) return *col.error;
    std::vector<Value> vals;
    for (const auto& grp : g.groups()) {
      if (member == "sum") {
        auto s = column_sum(g.source(), col.index, &grp.rows);
        if (!s) return Value::bottom("sum over a non-numeric column");
        vals.push_back(Value::number(*s));
      } else {
        vals.push_back(Value::number(static_cast<double>(
            column_distinct(g.source(), col.index, &grp.rows))));
      }
    }
    auto aggs = g.aggregates();
    aggs.emplace_back(std::string(member) + " " + g.source().columns[col.index],
                      std::move(vals));
    return Value::foreign(std::make_shared<GroupedTable>(
        g.source(), g.key_column(), g.groups(), std::move(aggs)));
  }
  if (member == "filterEq" || member == "sortByDesc" || member == "take" ||
      member == "skip") {
    return table_member(g.materialize(), member, args);
  }
  return Value::bottom("no member " + std::string(member) + " on grouped");
}

TypePtr TableLibrary::type_of(const Value& v) const {
  if (v.kind() == Value::Kind::kTable) return Type::object("table");
  if (handles(v)) return Type::object("grouped");
  return Type::error("not a table value");
}

const ObjectSignature* TableLibrary::object_type(std::string_view name) const {
  auto it = sigs_.find(name);
  return it == sigs_.end() ? nullptr : &it->second;
}

}  // namespace dexp

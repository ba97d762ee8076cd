#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "dexp/library.h"

namespace dexp {

namespace csv {
/// Header row then comma-separated rows. Cells that read as numbers become
/// numbers; everything else is a string.
std::variant<TableData, std::string> read_file(const std::filesystem::path& p);
std::variant<TableData, std::string> parse(std::string_view text);
}  // namespace csv

/// Table grouped by a key column, with aggregate columns accumulated so far.
/// Groups keep first-occurrence order.
class GroupedTable final : public ForeignValue {
 public:
  struct Group {
    Value key;
    std::vector<std::size_t> rows;
  };

  GroupedTable(TableData source, std::string key_column,
               std::vector<Group> groups,
               std::vector<std::pair<std::string, std::vector<Value>>> aggs);

  std::string_view tag() const override { return "grouped"; }
  std::string serialize() const override;
  bool equals(const ForeignValue& other) const override;
  std::size_t hash() const override { return hash_; }
  std::optional<Value> presentable() const override;

  /// One row per group: key, then each aggregate.
  TableData materialize() const;

  const TableData& source() const { return source_; }
  const std::string& key_column() const { return key_; }
  const std::vector<Group>& groups() const { return groups_; }
  const std::vector<std::pair<std::string, std::vector<Value>>>& aggregates()
      const {
    return aggs_;
  }

 private:
  TableData source_;
  std::string key_;
  std::vector<Group> groups_;
  std::vector<std::pair<std::string, std::vector<Value>>> aggs_;
  std::size_t hash_;
};

/// Tables loaded from CSV. Members on tables: filterEq(col, value),
/// groupBy(col), sortByDesc(col), take(n), skip(n), sum(col),
/// countDistinct(col). Grouped tables take sum and countDistinct as
/// aggregates; the remaining members apply to the materialized groups.
class TableLibrary final : public TypedLibrary {
 public:
  /// Binds `root_name` to the table read from `file`; a missing or broken
  /// file binds it to a bottom value.
  TableLibrary(const std::filesystem::path& file, std::string root_name);

  std::string_view name() const override { return "table"; }
  RootList roots() const override;
  bool handles(const Value& receiver) const override;
  Value eval_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args,
                    const ApplyFn& apply) const override;
  TypePtr type_of(const Value& v) const override;
  const ObjectSignature* object_type(std::string_view name) const override;

 private:
  Value table_member(const TableData& t, std::string_view member,
                     std::span<const Value> args) const;
  Value grouped_member(const GroupedTable& g, std::string_view member,
                       std::span<const Value> args) const;

  std::string root_name_;
  Value root_;
  std::map<std::string, ObjectSignature, std::less<>> sigs_;
};

}  // namespace dexp

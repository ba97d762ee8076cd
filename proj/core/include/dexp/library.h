#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dexp/types.h"
#include "dexp/value.h"

namespace dexp {

/// Evaluates a closure applied to one argument. Handed to libraries for the
/// duration of a single member call.
using ApplyFn = std::function<Value(const Value& closure, const Value& arg)>;

using RootList = std::vector<std::pair<std::string, Value>>;

/// A plug-in supplying objects and member evaluation. Implementations must
/// be total (misuse yields a bottom value) and deterministic.
class ExternalLibrary {
 public:
  virtual ~ExternalLibrary() = default;

  virtual std::string_view name() const = 0;
  /// Global identifiers the library binds.
  virtual RootList roots() const = 0;
  /// Whether this library owns member calls on `receiver`.
  virtual bool handles(const Value& receiver) const = 0;
  virtual Value eval_member(const Value& receiver, std::string_view member,
                            std::span<const Value> args,
                            const ApplyFn& apply) const = 0;
};

class TypedLibrary : public ExternalLibrary {
 public:
  /// Runtime type of a value; bottom types as an error.
  virtual TypePtr type_of(const Value& v) const = 0;
  /// Signature of a nominal object type, or null if unknown here.
  virtual const ObjectSignature* object_type(std::string_view name) const = 0;
};

/// Several libraries behind one interface. Member calls go to the first
/// library that handles the receiver; bottom receivers and arguments are
/// absorbed before dispatch.
class LibrarySet final : public TypedLibrary {
 public:
  explicit LibrarySet(std::vector<std::shared_ptr<const TypedLibrary>> libs);

  std::string_view name() const override { return "set"; }
  RootList roots() const override;
  bool handles(const Value& receiver) const override;
  Value eval_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args,
                    const ApplyFn& apply) const override;
  TypePtr type_of(const Value& v) const override;
  const ObjectSignature* object_type(std::string_view name) const override;

  const std::vector<std::shared_ptr<const TypedLibrary>>& libraries() const {
    return libs_;
  }

 private:
  std::vector<std::shared_ptr<const TypedLibrary>> libs_;
};

/// Transparent wrapper counting eval_member invocations per member name.
/// Nested calls made through `apply` are counted too.
class CountingLibrary final : public TypedLibrary {
 public:
  explicit CountingLibrary(std::shared_ptr<const TypedLibrary> inner);

  std::string_view name() const override { return inner_->name(); }
  RootList roots() const override { return inner_->roots(); }
  bool handles(const Value& receiver) const override {
    return inner_->handles(receiver);
  }
  Value eval_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args,
                    const ApplyFn& apply) const override;
  TypePtr type_of(const Value& v) const override { return inner_->type_of(v); }
  const ObjectSignature* object_type(std::string_view name) const override {
    return inner_->object_type(name);
  }

  std::map<std::string, std::size_t> snapshot() const;
  std::size_t total() const;
  /// Sum of counts for the given member names.
  std::size_t total_for(std::span<const std::string> members) const;
  void reset();

  const TypedLibrary& inner() const { return *inner_; }

 private:
  std::shared_ptr<const TypedLibrary> inner_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::size_t, std::less<>> counts_;
};

/// Difference of two count snapshots (after minus before), zero entries
/// dropped.
std::map<std::string, std::size_t> count_delta(
    const std::map<std::string, std::size_t>& before,
    const std::map<std::string, std::size_t>& after);

}  // namespace dexp

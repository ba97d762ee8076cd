#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>

#include "dexp/library.h"

namespace dexp {

/// Deferred image operation: receiver.op(args) where receiver and image
/// arguments may themselves be deferred.
class ImageThunk final : public ForeignValue {
 public:
  ImageThunk(Value receiver, std::string op, std::vector<Value> args);

  std::string_view tag() const override { return "lazy-image"; }
  std::string serialize() const override;
  bool equals(const ForeignValue& other) const override;
  std::size_t hash() const override { return hash_; }

  const Value& receiver() const { return receiver_; }
  const std::string& op() const { return op_; }
  const std::vector<Value>& args() const { return args_; }

 private:
  Value receiver_;
  std::string op_;
  std::vector<Value> args_;
  std::size_t hash_;
};

/// Image operations build thunks instead of computing pixels; everything
/// else goes to the inner library with thunk operands forced first. Forcing
/// runs the operations through the inner library and shares results for
/// equal thunks until reset_memo().
class LazyImageLibrary final : public TypedLibrary {
 public:
  explicit LazyImageLibrary(std::shared_ptr<const TypedLibrary> inner);

  std::string_view name() const override { return "lazy-image"; }
  RootList roots() const override { return inner_->roots(); }
  bool handles(const Value& receiver) const override;
  Value eval_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args,
                    const ApplyFn& apply) const override;
  TypePtr type_of(const Value& v) const override;
  const ObjectSignature* object_type(std::string_view name) const override {
    return inner_->object_type(name);
  }

  /// Concrete value of `v`; non-thunks are returned unchanged.
  Value force(const Value& v, const ApplyFn& apply) const;
  void reset_memo();

  static bool is_thunk(const Value& v);

 private:
  std::shared_ptr<const TypedLibrary> inner_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Value, Value> memo_;
};

}  // namespace dexp

#include "dexp/extlibs/lazy_image.h"

#include "dexp/extlibs/image.h"

namespace dexp {

ImageThunk::ImageThunk(Value receiver, std::string op, std::vector<Value> args)
    : receiver_(std::move(receiver)), op_(std::move(op)), args_(std::move(args)) {
  hash_ = receiver_.hash();
  hash_combine(hash_, std::hash<std::string>{}(op_));
  for (const Value& a : args_) hash_combine(hash_, a.hash());
}

std::string ImageThunk::serialize() const {
  std::string out = "lazy(" + receiver_.serialize() + "." + op_ + "(";
  for (std::size_t i = 0; i < args_.size(); ++i) {
    if (i) out += ", ";
    out += args_[i].serialize();
  }
  return out + "))";
}

bool ImageThunk::equals(const ForeignValue& other) const {
  auto* o = dynamic_cast<const ImageThunk*>(&other);
  return o && o->hash_ == hash_ && o->op_ == op_ &&
         o->receiver_ == receiver_ && o->args_ == args_;
}

LazyImageLibrary::LazyImageLibrary(std::shared_ptr<const TypedLibrary> inner)
    : inner_(std::move(inner)) {}

bool LazyImageLibrary::is_thunk(const Value& v) {
  return v.kind() == Value::Kind::kForeign && v.tag() == "lazy-image";
}

bool LazyImageLibrary::handles(const Value& receiver) const {
  return is_thunk(receiver) || inner_->handles(receiver);
}

Value LazyImageLibrary::eval_member(const Value& receiver,
                                    std::string_view member,
                                    std::span<const Value> args,
                                    const ApplyFn& apply) const {
  if (receiver.is_bottom()) return receiver;
  for (const Value& a : args) {
    if (a.is_bottom()) return a;
  }
  auto image_like = [](const Value& v) {
    return v.kind() == Value::Kind::kImage || is_thunk(v);
  };
  bool on_module = receiver.kind() == Value::Kind::kModule &&
                   receiver.as_string() == "image";
  if ((on_module || image_like(receiver)) &&
      ImageLibrary::is_image_member(on_module, member)) {
    if (auto err = ImageLibrary::check_call(on_module, member, args,
                                            image_like)) {
      return *err;
    }
    return Value::foreign(std::make_shared<ImageThunk>(
        receiver, std::string(member),
        std::vector<Value>(args.begin(), args.end())));
  }
  Value r = force(receiver, apply);
  std::vector<Value> forced;
  forced.reserve(args.size());
  for (const Value& a : args) forced.push_back(force(a, apply));
  return inner_->eval_member(r, member, forced, apply);
}

Value LazyImageLibrary::force(const Value& v, const ApplyFn& apply) const {
  if (!is_thunk(v)) return v;
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find(v);
    if (it != memo_.end()) return it->second;
  }
  const auto& t = static_cast<const ImageThunk&>(v.as_foreign());
  Value r = force(t.receiver(), apply);
  std::vector<Value> args;
  args.reserve(t.args().size());
  for (const Value& a : t.args()) args.push_back(force(a, apply));
  Value result = inner_->eval_member(r, t.op(), args, apply);
  std::lock_guard lock(mu_);
  memo_.emplace(v, result);
  return result;
}

void LazyImageLibrary::reset_memo() {
  std::lock_guard lock(mu_);
  memo_.clear();
}

TypePtr LazyImageLibrary::type_of(const Value& v) const {
  if (is_thunk(v)) return Type::object("image");
  return inner_->type_of(v);
}

}  // namespace dexp

#include "dexp/library.h"

#include <set>

namespace dexp {

LibrarySet::LibrarySet(std::vector<std::shared_ptr<const TypedLibrary>> libs)
    : libs_(std::move(libs)) {}

RootList LibrarySet::roots() const {
  RootList out;
  std::set<std::string> seen;
  for (const auto& lib : libs_) {
    for (auto& [name, value] : lib->roots()) {
      if (seen.insert(name).second) out.emplace_back(name, value);
    }
  }
  return out;
}

bool LibrarySet::handles(const Value& receiver) const {
  for (const auto& lib : libs_) {
    if (lib->handles(receiver)) return true;
  }
  return false;
}

Value LibrarySet::eval_member(const Value& receiver, std::string_view member,
                              std::span<const Value> args,
                              const ApplyFn& apply) const {
  if (receiver.is_bottom()) return receiver;
  for (const Value& a : args) {
    if (a.is_bottom()) return a;
  }
  for (const auto& lib : libs_) {
    if (lib->handles(receiver)) {
      return lib->eval_member(receiver, member, args, apply);
    }
  }
  return Value::bottom("no member " + std::string(member) + " on " +
                       std::string(receiver.tag()));
}

TypePtr LibrarySet::type_of(const Value& v) const {
  switch (v.kind()) {
    case Value::Kind::kNumber:
      return types::num();
    case Value::Kind::kString:
      return types::str();
    case Value::Kind::kBottom:
      return Type::error(v.bottom_message());
    default:
      break;
  }
  for (const auto& lib : libs_) {
    if (lib->handles(v)) return lib->type_of(v);
  }
  return Type::error("no type for " + std::string(v.tag()));
}

const ObjectSignature* LibrarySet::object_type(std::string_view name) const {
  for (const auto& lib : libs_) {
    if (auto* sig = lib->object_type(name)) return sig;
  }
  return nullptr;
}

CountingLibrary::CountingLibrary(std::shared_ptr<const TypedLibrary> inner)
    : inner_(std::move(inner)) {}

Value CountingLibrary::eval_member(const Value& receiver,
                                   std::string_view member,
                                   std::span<const Value> args,
                                   const ApplyFn& apply) const {
  {
    std::lock_guard lock(mu_);
    auto it = counts_.find(member);
    if (it == counts_.end()) {
      counts_.emplace(std::string(member), 1);
    } else {
      ++it->second;
    }
  }
  return inner_->eval_member(receiver, member, args, apply);
}

std::map<std::string, std::size_t> CountingLibrary::snapshot() const {
  std::lock_guard lock(mu_);
  return {counts_.begin(), counts_.end()};
}

std::size_t CountingLibrary::total() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, c] : counts_) n += c;
  return n;
}

std::size_t CountingLibrary::total_for(
    std::span<const std::string> members) const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& m : members) {
    auto it = counts_.find(m);
    if (it != counts_.end()) n += it->second;
  }
  return n;
}

void CountingLibrary::reset() {
  std::lock_guard lock(mu_);
  counts_.clear();
}

std::map<std::string, std::size_t> count_delta(
    const std::map<std::string, std::size_t>& before,
    const std::map<std::string, std::size_t>& after) {
  std::map<std::string, std::size_t> out;
  for (const auto& [name, n] : after) {
    auto it = before.find(name);
    std::size_t prev = it == before.end() ? 0 : it->second;
    if (n > prev) out[name] = n - prev;
  }
  return out;
}

}  // namespace dexp

#include <gtest/gtest.h>

#include <iostream>

#include "dexp/refeval.h"
#include "dexp/typecheck.h"
#include "fuzz.h"
#include "props.h"

namespace dexp {
namespace {

std::shared_ptr<const LibrarySet> lib() {
  static auto l = props::bundled(DEXP_TEST_ASSETS);
  return l;
}

TEST(Generator, DeterministicPerSeed) {
  fuzz::Generator a(42), b(42), c(43);
  auto pa = pretty(a.program());
  EXPECT_EQ(pa, pretty(b.program()));
  EXPECT_NE(pa, pretty(c.program()));
}

TEST(Generator, ProgramsAreClosedAndBounded) {
  std::set<std::string> roots;
  for (const auto& [n, v] : lib()->roots()) roots.insert(n);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    fuzz::Generator gen(seed);
    Program p = gen.program();
    ASSERT_GE(p.commands.size(), 1u);
    ASSERT_LE(p.commands.size(), 6u);
    std::set<std::string> bound = roots;
    for (const auto& c : p.commands) {
      EXPECT_LE(member_depth(*c.body), 4u) << pretty(p);
      for (const auto& v : free_variables(*c.body)) {
        EXPECT_TRUE(bound.count(v)) << v << " in\n" << pretty(p);
      }
      if (c.let_name) bound.insert(*c.let_name);
    }
  }
}

TEST(Generator, WellTypedProgramsCheckCleanly) {
  fuzz::Options opts;
  opts.well_typed = true;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    fuzz::Generator gen(seed, opts);
    Program p = fuzz::reparse(gen.program());
    LiveState s;
    s.roots = lib()->roots();
    auto b = bind_prog(p, s.cache, s.symbols, s.roots);
    TypeCache types;
    auto ds = check_program(p, b, *lib(), types);
    EXPECT_TRUE(ds.empty()) << pretty(p) << "\n" << (ds.empty() ? "" : ds[0].message);
    for (const auto& v : evaluate(p, *lib())) {
      EXPECT_FALSE(v.is_bottom()) << pretty(p) << "\n" << v.bottom_message();
    }
  }
}

TEST(Generator, CoversEveryLibrary) {
  std::set<std::string> members;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    fuzz::Generator gen(seed);
    std::string text = pretty(gen.program());
    for (auto m : {"range", "map", "add", "load", "blur", "combine", "groupBy",
                   "filterEq", "sortByDesc"}) {
      if (text.find(std::string(".") + m + "(") != std::string::npos) members.insert(m);
    }
  }
  EXPECT_EQ(members.size(), 9u);
}

TEST(Generator, MostValuesAreNotErrors) {
  std::size_t values = 0, bottoms = 0, images = 0, tables = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    fuzz::Generator gen(seed);
    for (const auto& v : evaluate(gen.program(), *lib())) {
      ++values;
      bottoms += v.is_bottom();
      images += v.kind() == Value::Kind::kImage;
      tables += v.kind() == Value::Kind::kTable || v.kind() == Value::Kind::kForeign;
    }
  }
  std::cout << values << " values, " << bottoms << " errors, " << images
            << " images, " << tables << " tables\n";
  EXPECT_LT(bottoms * 2, values);
  EXPECT_GT(images, values / 20);
  EXPECT_GT(tables, values / 20);
}

TEST(ContextPositions, ReplaceRoundTrips) {
  auto e = parse("math.add(data.sum(), list.range(0, 2).map(fun y -> y).count())")
               .commands[0]
               .body;
  auto ps = fuzz::context_positions(e);
  EXPECT_EQ(ps.size(), 10u);
  for (const auto& path : ps) {
    auto sub = fuzz::at(e, path);
    EXPECT_TRUE(same_structure(*fuzz::replace_at(e, path, sub), *e));
  }
  auto swapped = fuzz::replace_at(e, {1}, make_literal(Value::number(7)));
  EXPECT_EQ(pretty(*swapped), "math.add(7, list.range(0, 2).map(fun y -> y).count)");
}

TEST(TransitiveDependencies, FollowLets) {
  auto p = parse("let a = 1\nlet b = math.add(a, 1)\nlet c = 2\nmath.add(b, c)\nb");
  auto deps = fuzz::transitive_dependencies(p);
  ASSERT_EQ(deps.size(), 5u);
  EXPECT_EQ(deps[1], (std::set<std::string>{"a"}));
  EXPECT_EQ(deps[3], (std::set<std::string>{"a", "b", "c"}));
  EXPECT_EQ(fuzz::let_names(p), (std::set<std::string>{"a", "b", "c"}));
}

TEST(Properties, SmallRunsPass) {
  auto l = lib();
  auto check = [](const props::Outcome& o) { EXPECT_TRUE(o.ok) << o.detail; };
  check(props::preview_correctness(*l, 80, 1));
  check(props::preview_determinacy(*l, 30, 2));
  for (const auto& op : props::edit_operations()) check(props::preview_reuse(l, op, 4, 3));
  check(props::let_elimination(*l, 60, 4));
  check(props::normalization(*l, 60, 5));
  check(props::library_totality(*l, 500, 6));
  EXPECT_EQ(props::edit_operations().size(), 7u);
}

TEST(Properties, DetectBrokenLibraries) {
  // Deliberately nondeterministic library: totality must notice.
  class Flaky final : public TypedLibrary {
   public:
    std::string_view name() const override { return "flaky"; }
    RootList roots() const override { return {{"f", Value::module("f")}}; }
    bool handles(const Value&) const override { return true; }
    Value eval_member(const Value&, std::string_view, std::span<const Value>,
                      const ApplyFn&) const override {
      return Value::number(static_cast<double>(++n_));
    }
    TypePtr type_of(const Value&) const override { return types::num(); }
    const ObjectSignature* object_type(std::string_view) const override {
      return nullptr;
    }

   private:
    mutable int n_ = 0;
  };
  Flaky f;
  EXPECT_FALSE(props::library_totality(f, 50, 1).ok);
}

}  // namespace
}  // namespace dexp

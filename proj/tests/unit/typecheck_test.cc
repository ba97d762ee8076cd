#include <gtest/gtest.h>

#include "dexp/refeval.h"
#include "dexp/typecheck.h"
#include "props.h"

namespace dexp {
namespace {

struct Checked {
  std::shared_ptr<const LibrarySet> lib = props::bundled(DEXP_TEST_ASSETS);
  LiveState state;
  TypeCache types;
  Rebound r;

  explicit Checked(std::string_view text) {
    state.roots = lib->roots();
    r = rebind(state, text);
  }
  std::string type(std::size_t command) {
    return to_string(*typecheck_vertex(r.binding.command_vertices.at(command),
                                       r.binding.graph, *lib, types));
  }
  std::vector<Diagnostic> diagnostics() {
    return check_program(r.program, r.binding, *lib, types);
  }
};

TEST(Types, Printing) {
  EXPECT_EQ(to_string(*types::num()), "num");
  EXPECT_EQ(to_string(*Type::fun(types::num(), Type::object("list"))), "num -> list");
  EXPECT_TRUE(same_type(types::num(), Type::prim("num")));
  EXPECT_FALSE(same_type(types::num(), types::str()));
}

TEST(TypeCheck, CommandTypes) {
  Checked c(
      "let x = list.range(0, 3)\nx.map(fun y -> math.add(y, 1))\nx.sum()\n"
      "image.load(\"shadow.png\").blur(2)\nolympics.groupBy(\"Team\")\n\"s\"");
  EXPECT_EQ(c.type(0), "list");
  EXPECT_EQ(c.type(1), "list");
  EXPECT_EQ(c.type(2), "num");
  EXPECT_EQ(c.type(3), "image");
  EXPECT_EQ(c.type(4), "grouped");
  EXPECT_EQ(c.type(5), "str");
  EXPECT_TRUE(c.diagnostics().empty());
}

TEST(TypeCheck, ParameterTypeFromCallsite) {
  Checked c("list.range(0, 3).map(fun y -> y)");
  auto fun = c.r.binding.graph.args_of(c.r.binding.command_vertices[0])[1];
  ASSERT_TRUE(fun.is_fun());
  EXPECT_EQ(to_string(*typecheck_vertex(fun, c.r.binding.graph, *c.lib, c.types)),
            "num -> num");
  EXPECT_EQ(to_string(*typecheck_vertex(Vertex::var("y"), c.r.binding.graph,
                                        *c.lib, c.types)),
            "num");
}

TEST(TypeCheck, CallsiteInferenceOnCustomObject) {
  auto o = props::callsite_inference();
  EXPECT_TRUE(o.ok) << o.detail;
}

TEST(TypeCheck, ErrorsPointAtTheirSource) {
  std::string text = "let x = list.range(0, 3)\nx.frob()\nmath.add(x, 1)\nx.sum().map(fun y -> y)";
  Checked c(text);
  auto ds = c.diagnostics();
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[0].severity, "error");
  EXPECT_EQ(text.substr(ds[0].span.begin, ds[0].span.length()).find("frob"), 2u);
  EXPECT_LT(ds[0].span.begin, ds[1].span.begin);
  EXPECT_LT(ds[1].span.begin, ds[2].span.begin);
  EXPECT_TRUE(c.type(1).size());
}

TEST(TypeCheck, ErrorsDoNotCascade) {
  Checked c("let x = list.frob()\nx.sum()\nmath.add(x.count(), 1)");
  EXPECT_EQ(c.diagnostics().size(), 1u);
}

TEST(TypeCheck, UnknownIdentifier) {
  Checked c("missing.sum()");
  auto ds = c.diagnostics();
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_NE(ds[0].message.find("missing"), std::string::npos);
}

TEST(TypeCheck, ArityAndArgumentTypes) {
  Checked c("math.add(1)\nmath.add(\"a\", 1)\ndata.map(3)\ndata.map(fun y -> y.count())");
  EXPECT_EQ(c.diagnostics().size(), 4u);
}

TEST(TypeCheck, CacheHitsOnRecheck) {
  Checked c("let x = list.range(0, 3)\nx.map(fun y -> math.add(y, 1))");
  c.diagnostics();
  auto misses = c.types.misses();
  c.diagnostics();
  EXPECT_EQ(c.types.misses(), misses);
  auto r2 = rebind(c.state, "let x = list.range(0, 3)\nx.map(fun y -> math.add(y, 1))\nx.count()");
  check_program(r2.program, r2.binding, *c.lib, c.types);
  EXPECT_EQ(c.types.misses(), misses + 1);
}

TEST(TypeCheck, SharedParameterDistinguishedByCallsite) {
  auto base = props::bundled(DEXP_TEST_ASSETS);
  auto cs = props::callsite_library();
  std::vector<std::shared_ptr<const TypedLibrary>> parts{base, cs};
  LibrarySet both(parts);
  LiveState s;
  s.roots = both.roots();
  auto r = rebind(s, "list.range(0, 3).map(fun y -> y)\no.m(fun y -> y)");
  TypeCache cache;
  EXPECT_TRUE(check_program(r.program, r.binding, both, cache).empty());
  EXPECT_EQ(to_string(*typecheck_vertex(r.binding.command_vertices[0],
                                        r.binding.graph, both, cache)),
            "list");
  EXPECT_EQ(to_string(*typecheck_vertex(r.binding.command_vertices[1],
                                        r.binding.graph, both, cache)),
            "num");
}

TEST(Completion, MembersOfInstanceType) {
  auto lib = props::bundled(DEXP_TEST_ASSETS);
  LiveState s;
  s.roots = lib->roots();
  rebind(s, "let x = list.range(0, 3)");
  std::string text = "let x = list.range(0, 3)\nx.";
  auto items = completions_in_text(text, text.size(), s, *lib);
  std::vector<std::string> names;
  for (const auto& [n, sig] : items) names.push_back(n);
  EXPECT_EQ(names, (std::vector<std::string>{"count", "get", "map", "range", "skip",
                                             "sum", "take"}));
  std::string img = "image.load(\"shadow.png\").";
  auto im = completions_in_text(img, img.size(), s, *lib);
  std::vector<std::string> imn;
  for (const auto& [n, sig] : im) imn.push_back(n);
  EXPECT_EQ(imn, (std::vector<std::string>{"blur", "combine", "greyScale"}));
  EXPECT_TRUE(completions_in_text("1", 1, s, *lib).empty());
}

TEST(TypeAgreement, SmallFuzzedRun) {
  auto lib = props::bundled(DEXP_TEST_ASSETS);
  auto o = props::type_agreement(*lib, 60, 99);
  EXPECT_TRUE(o.ok) << o.detail;
}

}  // namespace
}  // namespace dexp

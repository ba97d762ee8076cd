#include <gtest/gtest.h>

#include "dexp/depgraph.h"
#include "dexp/extlibs/listmath.h"
#include "dexp/syntax.h"
#include "fuzz.h"
#include "props.h"

namespace dexp {
namespace {

LiveState fresh() {
  LiveState s;
  s.roots = ListMathLibrary().roots();
  return s;
}

TEST(Vertex, Identity) {
  EXPECT_EQ(Vertex::val(Value::number(1)), Vertex::val(Value::number(1)));
  EXPECT_NE(Vertex::val(Value::number(1)), Vertex::val(Value::number(2)));
  EXPECT_EQ(Vertex::var("x"), Vertex::var("x"));
  EXPECT_NE(Vertex::var("x"), Vertex::unresolved("x"));
  EXPECT_EQ(Vertex::mem("a", Symbol{1}), Vertex::mem("a", Symbol{1}));
  EXPECT_NE(Vertex::mem("a", Symbol{1}), Vertex::mem("a", Symbol{2}));
  EXPECT_NE(Vertex::mem("a", Symbol{1}), Vertex::fun("a", Symbol{1}));
}

TEST(DepGraph, EdgesAndQueries) {
  DepGraph g;
  auto m = Vertex::mem("add", Symbol{1});
  auto a = Vertex::val(Value::module("math"));
  auto b = Vertex::val(Value::number(1));
  g.add_edge(m, a, EdgeLabel::arg(0));
  g.add_edge(m, b, EdgeLabel::arg(1));
  g.add_edge(m, b, EdgeLabel::arg(1));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.args_of(m), (std::vector<Vertex>{a, b}));
  EXPECT_FALSE(g.body_of(m));
  DepGraph h;
  h.add_edge(m, b, EdgeLabel::arg(1));
  h.add_edge(m, a, EdgeLabel::arg(0));
  EXPECT_TRUE(g.same_as(h));
  h.add_edge(a, b, EdgeLabel::callsite("map", 1));
  EXPECT_FALSE(g.same_as(h));
  EXPECT_TRUE(g.same_as(h.without_callsites()));
}

TEST(Bind, StructureOfCallAndLambda) {
  auto s = fresh();
  auto r = rebind(s, "let x = list.range(0, 3)\nx.map(fun y -> math.add(y, 1))");
  const auto& g = r.binding.graph;
  ASSERT_EQ(r.binding.command_vertices.size(), 2u);
  auto map = r.binding.command_vertices[1];
  ASSERT_TRUE(map.is_mem());
  EXPECT_EQ(map.name(), "map");
  auto args = g.args_of(map);
  ASSERT_EQ(args.size(), 2u);
  EXPECT_EQ(args[0], r.binding.command_vertices[0]);
  ASSERT_TRUE(args[1].is_fun());
  auto body = g.body_of(args[1]);
  ASSERT_TRUE(body);
  EXPECT_EQ(body->name(), "add");
  EXPECT_EQ(g.args_of(*body)[1], Vertex::var("y"));
  EXPECT_EQ(g.args_of(*body)[0], Vertex::val(Value::module("math")));
  auto cs = g.callsites_of(args[1]);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].first, args[0]);
  EXPECT_EQ(cs[0].second, EdgeLabel::callsite("map", 1));
}

TEST(Bind, UnknownIdentifierIsUnresolved) {
  auto s = fresh();
  auto r = rebind(s, "nope");
  EXPECT_EQ(r.binding.command_vertices[0], Vertex::unresolved("nope"));
}

TEST(Bind, RepeatedSubtermsShareVertex) {
  auto s = fresh();
  auto r = rebind(s, "math.add(1, 2)\nmath.add(1, 2)");
  EXPECT_EQ(r.binding.command_vertices[0], r.binding.command_vertices[1]);
}

TEST(Bind, RebindingUnchangedTextReusesEverything) {
  auto s = fresh();
  auto a = rebind(s, "let x = list.range(0, 3)\nx.map(fun y -> math.add(y, 1))");
  auto issued = s.symbols.issued();
  auto b = rebind(s, "let x = list.range(0, 3)\nx.map(fun y -> math.add(y, 1))");
  EXPECT_EQ(a.binding.command_vertices, b.binding.command_vertices);
  EXPECT_EQ(s.symbols.issued(), issued);
  EXPECT_TRUE(a.binding.graph.same_as(b.binding.graph));
}

TEST(Bind, EditKeepsUnaffectedVertices) {
  auto s = fresh();
  auto a = rebind(s, "let x = list.range(0, 3)\nx.count()");
  auto b = rebind(s, "let x = list.range(0, 3)\nlet y = x.map(fun z -> z)\nx.count()");
  EXPECT_EQ(a.binding.command_vertices[0], b.binding.command_vertices[0]);
  EXPECT_EQ(a.binding.command_vertices[1], b.binding.command_vertices[2]);
  auto c = rebind(s, "let x = list.range(0, 4)\nx.count()");
  EXPECT_NE(a.binding.command_vertices[1], c.binding.command_vertices[1]);
}

TEST(Bind, ExprVertexCoversEverySubterm) {
  auto s = fresh();
  auto r = rebind(s, "list.range(0, 3).map(fun y -> math.add(y, 1))");
  std::size_t count = 0;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    ++count;
    EXPECT_TRUE(r.binding.expr_vertex.count(e.get()));
    if (auto* m = e->member()) {
      walk(m->instance);
      for (const auto& a : m->args) walk(a);
    } else if (auto* l = e->lambda()) {
      walk(l->body);
    }
  };
  walk(r.program.commands[0].body);
  EXPECT_EQ(count, 10u);
}

TEST(NodeCache, OnlyGrowsAcrossFuzzedEdits) {
  auto lib = props::bundled(DEXP_TEST_ASSETS);
  LiveState s;
  s.roots = lib->roots();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    NodeCache before = s.cache;
    fuzz::Generator gen(seed);
    auto r = rebind(s, pretty(gen.program()));
    EXPECT_TRUE(s.cache.includes(before));
    for (const auto& v : r.binding.graph.vertices()) {
      if (v.is_mem() || v.is_fun()) {
        auto hit = s.cache.lookup(key_of(v, r.binding.graph));
        ASSERT_TRUE(hit);
        EXPECT_EQ(*hit, v);
      }
    }
  }
}

TEST(NodeCache, InPlaceUpdateMatchesFunctional) {
  auto lib = props::bundled(DEXP_TEST_ASSETS);
  SymbolGenerator sym;
  NodeCache functional, in_place;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    fuzz::Generator gen(seed);
    auto b = bind_prog(gen.program(), functional, sym, lib->roots());
    functional = update_cache(functional, b.graph);
    update_cache_in_place(in_place, b.graph);
    EXPECT_TRUE(functional.includes(in_place));
    EXPECT_TRUE(in_place.includes(functional));
  }
}

TEST(DepGraph, ExportTextIsDeterministic) {
  auto s1 = fresh();
  auto s2 = fresh();
  auto a = rebind(s1, "let x = list.range(0, 3)\nx.map(fun y -> y)");
  auto b = rebind(s2, "let x = list.range(0, 3)\nx.map(fun y -> y)");
  EXPECT_EQ(a.binding.graph.export_text(), b.binding.graph.export_text());
  EXPECT_NE(a.binding.graph.export_text().find("callsite"), std::string::npos);
}

}  // namespace
}  // namespace dexp

// Copyright 2026 The Runahead Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "runahead/error.hpp"
#include "runahead/graph.hpp"
#include "test_util.hpp"

namespace runahead {
namespace {

using testing::diamond;

ErrorCode load_error(std::string_view doc) {
  try {
    load_workflow(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error for " << doc;
  return ErrorCode::kIo;
}

constexpr const char* kDiamondDoc = R"({
  "nodes": [
    {"id": "W1", "objective": "a", "agent": "x", "category": "instruction", "uses_tools": false},
    {"id": "W2", "objective": "b", "agent": "x", "category": "code", "uses_tools": false},
    {"id": "W3", "objective": "c", "agent": "x", "category": "math", "uses_tools": true},
    {"id": "W4", "objective": "d", "agent": "x", "category": "tool", "uses_tools": true}
  ],
  "edges": [["W1", "W2"], ["W1", "W3"], ["W2", "W4"], ["W3", "W4"]]
})";

TEST(Graph, LoadsDiamond) {
  auto g = load_workflow(kDiamondDoc);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(g.node(g.terminal()).id, "W4");
  auto init = g.initials();
  ASSERT_EQ(init.size(), 1u);
  EXPECT_EQ(g.node(init[0]).id, "W1");
  EXPECT_EQ(g.node(2).category, TaskCategory::kMath);
  EXPECT_TRUE(g.node(3).uses_tools);
}

TEST(Graph, SingleNodeIsInitialAndTerminal) {
  auto g = load_workflow(
      R"({"nodes":[{"id":"A","objective":"o","agent":"x","category":"math","uses_tools":false}],"edges":[]})");
  auto p = topo_profile(g);
  EXPECT_TRUE(p[0].initial);
  EXPECT_TRUE(p[0].terminal);
  EXPECT_EQ(p[0].fan_in, 0u);
  EXPECT_EQ(p[0].fan_out, 0u);
  EXPECT_EQ(p[0].role(), NodeRole::kTerminal);
}

TEST(Graph, ValidationErrors) {
  const std::string a = R"({"id":"A","objective":"o","agent":"x","category":"math","uses_tools":false})";
  const std::string b = R"({"id":"B","objective":"o","agent":"x","category":"math","uses_tools":false})";
  const std::string c = R"({"id":"C","objective":"o","agent":"x","category":"math","uses_tools":false})";
  EXPECT_EQ(load_error(R"({"nodes":[)" + a + "," + b + R"(],"edges":[["A","B"],["B","A"]]})"),
            ErrorCode::kCycleDetected);
  EXPECT_EQ(load_error(R"({"nodes":[)" + a + R"(],"edges":[["A","A"]]})"), ErrorCode::kCycleDetected);
  EXPECT_EQ(load_error(R"({"nodes":[)" + a + "," + b + "," + c + R"(],"edges":[["A","B"],["A","C"]]})"),
            ErrorCode::kMultipleTerminals);
  EXPECT_EQ(load_error(R"({"nodes":[)" + a + R"(],"edges":[["A","Z"]]})"), ErrorCode::kDanglingEdge);
  EXPECT_EQ(load_error(R"({"nodes":[)" + a + "," + a + R"(],"edges":[]})"),
            ErrorCode::kMalformedDocument);
  EXPECT_EQ(load_error("not json"), ErrorCode::kMalformedDocument);
  EXPECT_EQ(load_error(R"({"nodes":[{"id":"A","objective":"o","agent":"x","category":"poetry","uses_tools":false}],"edges":[]})"),
            ErrorCode::kMalformedDocument);
  EXPECT_EQ(load_error(R"({"nodes":[{"id":"A","objective":"","agent":"x","category":"math","uses_tools":false}],"edges":[]})"),
            ErrorCode::kMalformedDocument);
  EXPECT_EQ(load_error(R"({"nodes":[],"edges":[]})"), ErrorCode::kMalformedDocument);
}

TEST(Graph, DiamondProfile) {
  auto g = diamond();
  auto p = topo_profile(g);
  EXPECT_EQ(p[g.index_of("W4")].fan_in, 2u);
  EXPECT_EQ(p[g.index_of("W1")].fan_out, 2u);
  EXPECT_EQ(p[g.index_of("W4")].depth, 2u);
}

TEST(Graph, ChainRolesAndDepths) {
  auto g = testing::chain(3);
  auto p = topo_profile(g);
  EXPECT_EQ(p[0].role(), NodeRole::kInitial);
  EXPECT_EQ(p[1].role(), NodeRole::kIntermediate);
  EXPECT_EQ(p[2].role(), NodeRole::kTerminal);
  EXPECT_EQ(p[0].depth, 0u);
  EXPECT_EQ(p[1].depth, 1u);
  EXPECT_EQ(p[2].depth, 2u);
}

TEST(Graph, DepthIsLongestPath) {
  auto g = WorkflowGraph::create({{"A", "o", "x"}, {"B", "o", "x"}, {"C", "o", "x"}},
                                 {{"A", "B"}, {"B", "C"}, {"A", "C"}});
  EXPECT_EQ(topo_profile(g)[g.index_of("C")].depth, 2u);
}

TEST(Graph, ParentsFollowEdgeOrder) {
  auto g = WorkflowGraph::create({{"A", "o", "x"}, {"B", "o", "x"}, {"C", "o", "x"}},
                                 {{"B", "C"}, {"A", "C"}});
  auto ps = g.parents(g.index_of("C"));
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(g.node(ps[0]).id, "B");
  EXPECT_EQ(g.node(ps[1]).id, "A");
}

TEST(Graph, DumpRoundTrips) {
  auto g = load_workflow(kDiamondDoc);
  auto h = load_workflow(dump_workflow(g));
  EXPECT_EQ(dump_workflow(h), dump_workflow(g));
}

// Independent oracle: DFS three-colouring for cycles, sink count for the
// terminal rule.
bool oracle_valid(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::size_t> out(n, 0);
  for (auto [a, b] : edges) {
    if (a == b) return false;
    adj[a].push_back(b);
    ++out[a];
  }
  std::vector<int> color(n, 0);
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    color[v] = 1;
    for (auto w : adj[v]) {
      if (color[w] == 1) return false;
      if (color[w] == 0 && !dfs(w)) return false;
    }
    color[v] = 2;
    return true;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (color[v] == 0 && !dfs(v)) return false;
  }
  std::size_t sinks = 0;
  for (auto o : out) sinks += o == 0 ? 1 : 0;
  return sinks == 1;
}

TEST(GraphProperty, MatchesKahnOracleOnRandomGraphs) {
  std::mt19937_64 rng(11);
  int valid = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = 1 + rng() % 12;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t m = rng() % (2 * n + 1);
    bool dag_only = trial % 2 == 0;
    for (std::size_t e = 0; e < m; ++e) {
      std::size_t a = rng() % n, b = rng() % n;
      if (dag_only && a >= b) continue;
      if (a == b || !seen.insert({a, b}).second) continue;
      pairs.push_back({a, b});
    }
    std::vector<WorkflowNode> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({testing::node_name(i), "o", "x"});
    std::vector<Edge> edges;
    for (auto [a, b] : pairs) edges.push_back({testing::node_name(a), testing::node_name(b)});
    bool expect = oracle_valid(n, pairs);
    bool ok = true;
    try {
      auto g = WorkflowGraph::create(nodes, edges);
      for (const auto& e : g.edges()) {
        EXPECT_LT(g.topo_position(g.index_of(e.parent)), g.topo_position(g.index_of(e.child)));
      }
      auto p = topo_profile(g);
      std::size_t fin = 0, fout = 0, maxd = 0;
      for (const auto& np : p.nodes) {
        fin += np.fan_in;
        fout += np.fan_out;
        maxd = std::max(maxd, np.depth);
        if (np.initial) {
          EXPECT_EQ(np.depth, 0u);
        }
        if (np.terminal) {
          EXPECT_EQ(np.fan_out, 0u);
        }
      }
      EXPECT_EQ(fin, g.edges().size());
      EXPECT_EQ(fout, g.edges().size());
      EXPECT_EQ(p[g.terminal()].depth, maxd);
      ++valid;
    } catch (const Error& e) {
      ok = false;
      EXPECT_TRUE(e.code() == ErrorCode::kCycleDetected ||
                  e.code() == ErrorCode::kMultipleTerminals)
          << e.what();
    }
    EXPECT_EQ(ok, expect) << "trial " << trial;
  }
  EXPECT_GT(valid, 50);
}

TEST(GraphProperty, ReachabilityAndDescendants) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    auto g = testing::random_dag(rng, 2 + rng() % 10);
    for (std::size_t a = 0; a < g.size(); ++a) {
      auto d = g.descendants(a);
      std::size_t count = 0;
      for (std::size_t b = 0; b < g.size(); ++b) count += g.reaches(a, b) ? 1 : 0;
      EXPECT_EQ(d.size(), count);
      for (auto x : d) EXPECT_TRUE(g.reaches(a, x));
      EXPECT_FALSE(g.reaches(a, a));
    }
  }
}

}  // namespace
}  // namespace runahead

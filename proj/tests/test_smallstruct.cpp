#include "dynq/smallstruct/coloring.hpp"
#include "dynq/smallstruct/matching.hpp"
#include "dynq/smallstruct/msf.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynq/common.hpp"
#include "dynq/oracles/span.hpp"

using namespace dynq;
using dynq::oracle::check_coloring;
using dynq::oracle::check_matching_maximal;
using dynq::oracle::check_mis;
using dynq::oracle::kruskal;
using dynq::oracle::WEdge;

namespace {

using Pairs = std::vector<std::pair<int, int>>;

uint64_t block_count(const RoundMeter& meter, const std::string& label) {
  uint64_t total = 0;
  for (const auto& [name, cnt] : meter.block_events) {
    if (name == label) total += cnt;
  }
  return total;
}

std::vector<WEdge> to_oracle(const std::vector<WeightedEdge>& es) {
  std::vector<WEdge> out;
  for (const auto& e : es) out.push_back({e.u, e.v, e.w});
  return out;
}

void expect_matches_kruskal(const MsfMaintainer& m) {
  auto want = kruskal(m.n(), to_oracle(m.edge_list()));
  auto got = to_oracle(m.forest());
  ASSERT_EQ(got.size(), want.size());
  for (size_t i = 0; i < want.size(); ++i) {
    EXPECT_TRUE(got[i] == want[i]) << "forest edge " << i << " differs";
  }
}

}  // namespace

TEST(Msf, TriangleKeepsTheTwoLightEdges) {
  MsfMaintainer m(3);
  RoundMeter meter;
  m.apply({}, {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}}, meter);
  auto forest = m.forest();
  ASSERT_EQ(forest.size(), 2u);
  EXPECT_EQ(forest[0].w, 1);
  EXPECT_EQ(forest[1].w, 2);
  EXPECT_EQ(m.forest_weight(), 3);

  // dropping the lightest edge forces the heavy one back in
  m.apply({{0, 1}}, {}, meter);
  forest = m.forest();
  ASSERT_EQ(forest.size(), 2u);
  EXPECT_EQ(forest[0].w, 2);
  EXPECT_EQ(forest[1].w, 3);
  EXPECT_EQ(m.forest_weight(), 5);
}

TEST(Msf, PositionsFollowTheLexicographicTieBreak) {
  MsfMaintainer m(4);
  RoundMeter meter;
  // a 4-cycle of equal weights sorts by endpoints alone
  m.apply({}, {{2, 3, 5}, {0, 3, 5}, {1, 2, 5}, {0, 1, 5}}, meter);
  EXPECT_EQ(m.position_of(0, 1), 1);
  EXPECT_EQ(m.position_of(0, 3), 2);
  EXPECT_EQ(m.position_of(1, 2), 3);
  EXPECT_EQ(m.position_of(2, 3), 4);

  // the cycle-closing last edge is the one left out
  auto forest = m.forest();
  ASSERT_EQ(forest.size(), 3u);
  EXPECT_TRUE((forest[2] == WeightedEdge{1, 2, 5}));
  expect_matches_kruskal(m);
}

TEST(Msf, WeightReplacementInOneBatch) {
  MsfMaintainer m(4);
  RoundMeter meter;
  m.apply({}, {{0, 1, 7}, {1, 2, 8}}, meter);
  m.apply({{0, 1}}, {{1, 0, 3}}, meter);
  EXPECT_EQ(m.weight_of(0, 1), 3);
  EXPECT_EQ(m.position_of(0, 1), 1);
  EXPECT_EQ(m.edge_count(), 2u);
}

TEST(Msf, RejectsBadBatches) {
  MsfMaintainer m(4);
  RoundMeter meter;
  m.apply({}, {{0, 1, 4}}, meter);

  try {
    m.apply({}, {{1, 0, 9}}, meter);
    FAIL() << "duplicate insert accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::DuplicateEdge);
  }
  try {
    m.apply({}, {{2, 3, 1}, {3, 2, 1}}, meter);
    FAIL() << "batch-internal duplicate accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::DuplicateEdge);
  }
  try {
    m.apply({{1, 2}}, {}, meter);
    FAIL() << "missing delete accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::UnknownEdgeOnDelete);
  }
  try {
    m.apply({{0, 1}, {1, 0}}, {}, meter);
    FAIL() << "double delete accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::UnknownEdgeOnDelete);
  }
  try {
    m.apply({}, {{2, 2, 1}}, meter);
    FAIL() << "self-loop accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::OutOfDomain);
  }

  // failed batches must leave the list untouched
  EXPECT_EQ(m.edge_count(), 1u);
  EXPECT_EQ(m.weight_of(0, 1), 4);
}

TEST(Msf, EmptyBatchCountsOneRound) {
  MsfMaintainer m(4);
  RoundMeter meter;
  m.apply({}, {}, meter);
  EXPECT_EQ(meter.rounds_used, 1u);
  EXPECT_EQ(meter.bound, 1u);
  EXPECT_TRUE(meter.block_events.empty());
}

TEST(Msf, RandomBatchesMatchTheSortingOracle) {
  const int n = 64;
  MsfMaintainer m(n);
  std::map<std::pair<int, int>, int64_t> mirror;
  Rng rng(1315);
  for (int step = 0; step < 100; ++step) {
    Pairs dels;
    std::vector<WeightedEdge> inss;
    uint64_t want_dels = rng.below(4);
    for (uint64_t k = 0; k < want_dels && !mirror.empty(); ++k) {
      auto it = mirror.begin();
      std::advance(it, (long)rng.below(mirror.size()));
      dels.push_back(it->first);
      mirror.erase(it);
    }
    uint64_t want_ins = rng.below(6);
    for (uint64_t k = 0; k < want_ins; ++k) {
      int u = (int)rng.below(n), v = (int)rng.below(n);
      if (u == v) continue;
      auto key = u < v ? std::pair<int, int>{u, v} : std::pair<int, int>{v, u};
      if (mirror.count(key)) continue;
      int64_t w = rng.range(1, 20);
      mirror.emplace(key, w);
      inss.push_back({key.first, key.second, w});
    }
    uint64_t batch = dels.size() + inss.size();

    RoundMeter meter;
    m.apply(dels, inss, meter);
    EXPECT_EQ(meter.rounds_used, 1u);
    if (batch > 0) {
      uint64_t probes = block_count(meter, "offset-count");
      EXPECT_GE(probes, batch);
      EXPECT_LE(probes, batch + batch * batch);
      EXPECT_EQ(block_count(meter, "msf-sweep"), m.edge_count());
    }
    expect_matches_kruskal(m);
  }
  EXPECT_GT(m.edge_count(), 0u);
}

TEST(Matching, GreedyInsertPicksTheLowestPair) {
  MatchingMaintainer t(5);
  RoundMeter meter;
  t.apply({}, {{0, 1}, {1, 2}}, meter);
  Pairs want = {{0, 1}};
  EXPECT_EQ(t.matching(), want);

  // an edge between two matched nodes changes nothing
  t.apply({}, {{3, 4}}, meter);
  t.apply({}, {{1, 3}}, meter);
  want = {{0, 1}, {3, 4}};
  EXPECT_EQ(t.matching(), want);
  EXPECT_TRUE(check_matching_maximal(t.n(), t.edges(), t.matching()));
}

TEST(Matching, DeleteRepairsFromTheNeighbourPool) {
  MatchingMaintainer t(3);
  RoundMeter meter;
  t.apply({}, {{0, 1}, {1, 2}, {0, 2}}, meter);
  Pairs want = {{0, 1}};
  ASSERT_EQ(t.matching(), want);

  t.apply({{0, 1}}, {}, meter);
  want = {{0, 2}};
  EXPECT_EQ(t.matching(), want);
  EXPECT_TRUE(check_matching_maximal(t.n(), t.edges(), t.matching()));
}

TEST(Matching, DeletingUnmatchedEdgesKeepsTheMatching) {
  MatchingMaintainer t(4);
  RoundMeter meter;
  t.apply({}, {{0, 1}, {1, 2}, {2, 3}}, meter);
  Pairs before = t.matching();
  t.apply({{1, 2}}, {}, meter);
  EXPECT_EQ(t.matching(), before);
  EXPECT_EQ(block_count(meter, "small-structure"), 0u);
}

TEST(Matching, OfferCapSurvivesConsumedNeighbours) {
  // One hub node with many unmatched neighbours, where every neighbour the
  // repair looks at first gets matched away to other newly single nodes. A
  // cap of |newly single|+1 offers would exhaust here and leave the hub and
  // its last neighbour both single with an edge between them.
  MatchingMaintainer t(8);
  RoundMeter meter;
  t.apply({}, {{0, 6}, {1, 2}}, meter);
  Pairs want = {{0, 6}, {1, 2}};
  ASSERT_EQ(t.matching(), want);

  t.apply({}, {{1, 6}, {2, 6}, {3, 6}, {4, 6}, {5, 6}, {6, 7}, {1, 3}, {2, 4}, {0, 5}}, meter);
  ASSERT_EQ(t.matching(), want);

  t.apply({{0, 6}, {1, 2}}, {}, meter);
  EXPECT_EQ(t.partner_of(6), 7);
  want = {{0, 5}, {1, 3}, {2, 4}, {6, 7}};
  EXPECT_EQ(t.matching(), want);
  EXPECT_TRUE(check_matching_maximal(t.n(), t.edges(), t.matching()));
}

TEST(Matching, StarOfPathsUnderRepeatedMatchingTeardown) {
  const int paths = 21;
  const int n = 1 + 3 * paths;
  MatchingMaintainer t(n);
  RoundMeter meter;
  Pairs ins;
  for (int i = 0; i < paths; ++i) {
    int a = 1 + 3 * i, b = a + 1, c = a + 2;
    ins.push_back({0, a});
    ins.push_back({a, b});
    ins.push_back({b, c});
  }
  t.apply({}, ins, meter);
  std::string why;
  ASSERT_TRUE(check_matching_maximal(n, t.edges(), t.matching(), &why)) << why;

  // tear the whole matching out, then put the edges back, ten times over
  for (int round = 0; round < 10; ++round) {
    Pairs gone = t.matching();
    ASSERT_FALSE(gone.empty());
    t.apply(gone, {}, meter);
    ASSERT_TRUE(check_matching_maximal(n, t.edges(), t.matching(), &why)) << why;
    t.apply({}, gone, meter);
    ASSERT_TRUE(check_matching_maximal(n, t.edges(), t.matching(), &why)) << why;
  }
}

TEST(Matching, RandomScriptsStayMaximal) {
  const int n = 40;
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    MatchingMaintainer t(n);
    std::set<std::pair<int, int>> mirror;
    Rng rng(seed * 7211);
    for (int step = 0; step < 30; ++step) {
      Pairs dels, inss;
      uint64_t want_dels = rng.below(4);
      for (uint64_t k = 0; k < want_dels && !mirror.empty(); ++k) {
        auto it = mirror.begin();
        std::advance(it, (long)rng.below(mirror.size()));
        dels.push_back(*it);
        mirror.erase(it);
      }
      uint64_t want_ins = rng.below(5);
      for (uint64_t k = 0; k < want_ins; ++k) {
        int u = (int)rng.below(n), v = (int)rng.below(n);
        if (u == v) continue;
        auto key = u < v ? std::pair<int, int>{u, v} : std::pair<int, int>{v, u};
        if (mirror.count(key)) continue;
        mirror.insert(key);
        inss.push_back(key);
      }
      RoundMeter meter;
      t.apply(dels, inss, meter);
      EXPECT_EQ(meter.rounds_used, 1u);
      std::string why;
      ASSERT_TRUE(check_matching_maximal(n, t.edges(), t.matching(), &why))
          << "seed " << seed << " step " << step << ": " << why;
    }
  }
}

TEST(Mis, TriangleTakesTheLowestClass) {
  Pairs edges = {{0, 1}, {1, 2}, {0, 2}};
  auto res = mis_from_coloring(3, edges, {{0}, {1}, {2}});
  std::vector<int> want = {0};
  EXPECT_EQ(res.nodes, want);
  EXPECT_EQ(res.iterations, 1);
}

TEST(Mis, EdgelessGraphKeepsEveryNode) {
  auto res = mis_from_coloring(5, {}, {{0, 2, 4}, {1, 3}});
  std::vector<int> want = {0, 1, 2, 3, 4};
  EXPECT_EQ(res.nodes, want);
  EXPECT_EQ(res.iterations, 2);
}

TEST(Mis, RejectsBrokenPartitions) {
  Pairs edges = {{0, 1}};
  try {
    mis_from_coloring(2, edges, {{0, 1}});
    FAIL() << "monochromatic edge accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::NotAProperColoring);
  }
  try {
    mis_from_coloring(3, edges, {{0}, {1}});
    FAIL() << "missing node accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::NotAProperColoring);
  }
  try {
    mis_from_coloring(2, edges, {{0}, {1, 0}});
    FAIL() << "doubly placed node accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::NotAProperColoring);
  }
}

TEST(Mis, RandomGreedyColoringsYieldMaximalSets) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed * 3331);
    const int n = 40;
    Pairs edges;
    std::vector<int> deg((size_t)n, 0);
    std::set<std::pair<int, int>> seen;
    for (int tries = 0; tries < 120; ++tries) {
      int u = (int)rng.below(n), v = (int)rng.below(n);
      if (u == v || deg[(size_t)u] >= 4 || deg[(size_t)v] >= 4) continue;
      auto key = u < v ? std::pair<int, int>{u, v} : std::pair<int, int>{v, u};
      if (!seen.insert(key).second) continue;
      edges.push_back(key);
      deg[(size_t)u] += 1;
      deg[(size_t)v] += 1;
    }

    // first-fit coloring, then classes by color
    std::vector<std::vector<int>> adj((size_t)n);
    for (auto [u, v] : edges) {
      adj[(size_t)u].push_back(v);
      adj[(size_t)v].push_back(u);
    }
    std::vector<int> col((size_t)n, 0);
    int k = 0;
    for (int v = 0; v < n; ++v) {
      std::set<int> used;
      for (int w : adj[(size_t)v]) {
        if (col[(size_t)w] > 0) used.insert(col[(size_t)w]);
      }
      int c = 1;
      while (used.count(c)) ++c;
      col[(size_t)v] = c;
      k = std::max(k, c);
    }
    std::vector<std::vector<int>> classes((size_t)k);
    for (int v = 0; v < n; ++v) classes[(size_t)(col[(size_t)v] - 1)].push_back(v);

    auto res = mis_from_coloring(n, edges, classes);
    EXPECT_LE(res.iterations, k);
    std::vector<bool> in_set((size_t)n, false);
    for (int v : res.nodes) in_set[(size_t)v] = true;
    std::string why;
    ASSERT_TRUE(check_mis(n, edges, in_set, &why)) << "seed " << seed << ": " << why;
  }
}

TEST(Coloring, TriangleGetsThreeProperColors) {
  ColoringMaintainer c(6, 2);
  RoundMeter meter;
  c.apply({}, {{0, 1}, {1, 2}, {0, 2}}, meter);
  EXPECT_TRUE(check_coloring(c.n(), c.edges(), c.coloring(), 3));
  EXPECT_EQ(block_count(meter, "fresh-coloring"), 3u);
  EXPECT_LE(block_count(meter, "mis-extraction"), 3u);
  EXPECT_EQ(meter.rounds_used, 1u);
}

TEST(Coloring, EmptyBatchKeepsTheColoring) {
  ColoringMaintainer c(5, 2);
  RoundMeter meter;
  c.apply({}, {{0, 1}, {1, 2}}, meter);
  std::vector<int> before = c.coloring();
  c.apply({}, {}, meter);
  EXPECT_EQ(c.coloring(), before);
  EXPECT_EQ(meter.rounds_used, 1u);
  EXPECT_TRUE(meter.block_events.empty());
}

TEST(Coloring, RejectsBadBatches) {
  ColoringMaintainer c(5, 2);
  RoundMeter meter;
  c.apply({}, {{0, 1}, {0, 2}}, meter);
  std::vector<int> before = c.coloring();

  try {
    c.apply({}, {{0, 3}}, meter);
    FAIL() << "degree overflow accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::DegreeBoundViolated);
  }
  try {
    c.apply({{1, 2}}, {}, meter);
    FAIL() << "missing delete accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::NotPresentOnDelete);
  }
  try {
    c.apply({}, {{1, 0}}, meter);
    FAIL() << "duplicate insert accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::AlreadyPresentOnInsert);
  }
  try {
    c.apply({}, {{3, 3}}, meter);
    FAIL() << "self-loop accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Err::OutOfDomain);
  }

  EXPECT_EQ(c.coloring(), before);
  EXPECT_EQ(c.edges().size(), 2u);

  // a batch that swaps an edge out may hit the bound again legally
  c.apply({{0, 2}}, {{2, 3}}, meter);
  EXPECT_TRUE(check_coloring(c.n(), c.edges(), c.coloring(), 3));
}

TEST(Coloring, RandomDegreeBoundedScriptsStayProper) {
  const int n = 48, delta = 4;
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    ColoringMaintainer c(n, delta);
    std::set<std::pair<int, int>> mirror;
    std::vector<int> deg((size_t)n, 0);
    Rng rng(seed * 9173);
    for (int step = 0; step < 25; ++step) {
      Pairs dels, inss;
      uint64_t want_dels = rng.below(3);
      for (uint64_t k = 0; k < want_dels && !mirror.empty(); ++k) {
        auto it = mirror.begin();
        std::advance(it, (long)rng.below(mirror.size()));
        dels.push_back(*it);
        deg[(size_t)it->first] -= 1;
        deg[(size_t)it->second] -= 1;
        mirror.erase(it);
      }
      uint64_t want_ins = rng.below(4);
      for (uint64_t k = 0; k < want_ins; ++k) {
        int u = (int)rng.below(n), v = (int)rng.below(n);
        if (u == v || deg[(size_t)u] >= delta || deg[(size_t)v] >= delta) continue;
        auto key = u < v ? std::pair<int, int>{u, v} : std::pair<int, int>{v, u};
        if (mirror.count(key)) continue;
        mirror.insert(key);
        deg[(size_t)u] += 1;
        deg[(size_t)v] += 1;
        inss.push_back(key);
      }
      RoundMeter meter;
      c.apply(dels, inss, meter);
      std::string why;
      ASSERT_TRUE(check_coloring(n, c.edges(), c.coloring(), delta + 1, &why))
          << "seed " << seed << " step " << step << ": " << why;
      EXPECT_LE(block_count(meter, "mis-extraction"), (uint64_t)(delta + 1));
    }
  }
}

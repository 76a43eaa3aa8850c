// Acceptance gate: seven desk-scale checks, one printed line each. Every
// check replays randomized workloads against the maintainers and compares
// each step with an independent oracle. Exit status is the number of failed
// criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dynq/cfl/cfl.hpp"
#include "dynq/cfl/grammar.hpp"
#include "dynq/cli/bench.hpp"
#include "dynq/cli/engine.hpp"
#include "dynq/cli/gen.hpp"
#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"
#include "dynq/dist/distance.hpp"
#include "dynq/oracles/gapped.hpp"
#include "dynq/oracles/graph.hpp"
#include "dynq/oracles/lang.hpp"
#include "dynq/oracles/span.hpp"
#include "dynq/oracles/split.hpp"
#include "dynq/oracles/tree.hpp"
#include "dynq/reach/reach.hpp"
#include "dynq/smallstruct/coloring.hpp"
#include "dynq/smallstruct/matching.hpp"
#include "dynq/smallstruct/msf.hpp"
#include "dynq/tree/treeiso.hpp"

using namespace dynq;

namespace {

using Pairs = std::vector<std::pair<int, int>>;
using Verdict = std::optional<std::string>;  // failure message; empty means pass

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string at(const char* what, int script, int step) {
  return std::string(what) + " (script " + std::to_string(script) + ", step " +
         std::to_string(step) + ")";
}

// ---------------------------------------------------------------- batches

// Valid-by-construction batch against a set of present pairs: deletions are
// drawn from the set, insertions from its complement, never both for the
// same pair.
struct PairBatch {
  Pairs del, ins;
};

template <typename Sampler>
PairBatch random_pair_batch(Rng& rng, std::set<std::pair<int, int>>& present, int m,
                            Sampler&& sample_candidate) {
  PairBatch b;
  std::set<std::pair<int, int>> touched;
  for (int j = 0; j < m; ++j) {
    bool deleting = !present.empty() && rng.chance(0.4);
    if (deleting) {
      auto it = present.begin();
      std::advance(it, (long)rng.below(present.size()));
      if (touched.count(*it)) continue;
      touched.insert(*it);
      b.del.push_back(*it);
      present.erase(it);
    } else {
      for (int tries = 0; tries < 64; ++tries) {
        std::pair<int, int> e = sample_candidate();
        if (e.first < 0 || present.count(e) || touched.count(e)) continue;
        touched.insert(e);
        b.ins.push_back(e);
        present.insert(e);
        break;
      }
    }
  }
  return b;
}

// ------------------------------------------------------------ criterion 1

Verdict criterion_reach(double* out_secs) {
  Rng rng(0xacc1);
  double t0 = now_s();
  for (int script = 0; script < 300; ++script) {
    int n = rng.range(4, 64);
    int steps = rng.range(5, 50);
    int cap = ceil_log2_succ((uint64_t)n - 1);  // ceil(log2 n) for n >= 2
    int batch_cap = cap * cap * cap;
    ReachMaintainer m(n);
    std::set<std::pair<int, int>> present;
    auto sample = [&]() -> std::pair<int, int> {
      int u = (int)rng.below((uint64_t)n), v = (int)rng.below((uint64_t)n);
      if (u == v) return {-1, -1};
      return {u, v};
    };
    for (int step = 0; step < steps; ++step) {
      int want = rng.range(1, std::min(batch_cap, 10));
      PairBatch b = random_pair_batch(rng, present, want, sample);
      if (b.del.empty() && b.ins.empty()) continue;
      RoundMeter meter;
      m.apply(b.del, b.ins, meter);

      oracle::EdgeList g;
      g.n = n;
      g.directed = true;
      g.edges = m.arcs();
      auto truth = oracle::dfs_reach_all(g);
      for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
          if (m.reach_query(u, v) != truth[(size_t)u].get((size_t)v))
            return at("reach mismatch", script, step);
        }
      }
      bool audit = n <= 24 || step == 0 || step == steps / 2 || step == steps - 1;
      if (audit) {
        for (size_t i = 0; i < m.prime_count(); ++i) {
          if (!m.prime_active(i)) continue;
          auto direct = mat_inverse(m.current_m(m.prime(i)));
          if (!direct.has_value()) return at("active prime with singular matrix", script, step);
          if (!(m.prime_minv(i) == direct->inv) || m.prime_det(i) != direct->det)
            return at("stale inverse", script, step);
        }
      }
    }
  }
  *out_secs = now_s() - t0;
  if (*out_secs >= 60.0) return "runtime budget exceeded: " + std::to_string(*out_secs) + "s";
  return std::nullopt;
}

// ------------------------------------------------------------ criterion 2

Verdict one_distance_family(Rng& rng, bool dag, int scripts) {
  for (int script = 0; script < scripts; ++script) {
    int n = rng.range(4, 128);
    int steps = rng.range(4, 14);
    std::vector<int> pos((size_t)n);
    for (int i = 0; i < n; ++i) pos[(size_t)i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(pos[(size_t)i], pos[(size_t)rng.below((uint64_t)i + 1)]);
    DistanceMaintainer m(n, dag ? DistKind::Dag : DistKind::Undirected);
    std::set<std::pair<int, int>> present;
    auto sample = [&]() -> std::pair<int, int> {
      int u = (int)rng.below((uint64_t)n), v = (int)rng.below((uint64_t)n);
      if (u == v) return {-1, -1};
      if (dag) {
        if (pos[(size_t)u] > pos[(size_t)v]) std::swap(u, v);
      } else if (u > v) {
        std::swap(u, v);
      }
      return {u, v};
    };
    for (int step = 0; step < steps; ++step) {
      PairBatch b = random_pair_batch(rng, present, rng.range(1, 12), sample);
      if (b.del.empty() && b.ins.empty()) continue;
      RoundMeter meter;
      m.apply(b.del, b.ins, meter);
      // deletions and insertions run as separate fixpoints, each within the
      // logarithmic bound for its own share of the batch
      uint64_t allowed = (b.del.empty() ? 0 : (uint64_t)ceil_log2_succ(b.del.size())) +
                         (b.ins.empty() ? 0 : (uint64_t)ceil_log2_succ(b.ins.size()));
      if (meter.rounds_used > allowed || meter.bound != allowed)
        return at(dag ? "dag rounds over bound" : "rounds over bound", script, step);

      oracle::EdgeList g;
      g.n = n;
      g.directed = dag;
      g.edges = m.edges();
      auto truth = oracle::bfs_all_pairs(g);
      for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
          if (m.dist(u, v) != truth[(size_t)u][(size_t)v])
            return at(dag ? "dag distance mismatch" : "distance mismatch", script, step);
        }
      }
    }
  }
  return std::nullopt;
}

// A fact is safe under a deletion when no old shortest path between the pair
// used the deleted edge; certify that safe facts really survive, with the
// path set enumerated exhaustively.
Verdict criterion_distances(double*) {
  Rng rng(0xacc2);
  if (auto v = one_distance_family(rng, false, 300)) return v;
  if (auto v = one_distance_family(rng, true, 300)) return v;

  for (int inst = 0; inst < 1000; ++inst) {
    int n = rng.range(3, 14);
    bool directed = rng.chance(0.5);
    oracle::EdgeList g;
    g.n = n;
    g.directed = directed;
    for (int u = 0; u < n; ++u) {
      for (int v = directed ? 0 : u + 1; v < n; ++v) {
        if (u != v && rng.chance(0.35)) g.edges.push_back({u, v});
      }
    }
    if (g.edges.empty()) continue;
    auto e = g.edges[rng.below(g.edges.size())];
    int s = (int)rng.below((uint64_t)n), t = (int)rng.below((uint64_t)n);

    auto old_dist = oracle::bfs_all_pairs(g);
    auto paths = oracle::enumerate_shortest_paths(g, s, t);
    bool uses = false;
    for (const auto& p : paths) {
      for (size_t i = 0; i + 1 < p.size(); ++i) {
        bool hit = (p[i] == e.first && p[i + 1] == e.second) ||
                   (!directed && p[i] == e.second && p[i + 1] == e.first);
        if (hit) uses = true;
      }
    }
    if (uses != oracle::edge_on_some_shortest_path(old_dist, s, t, e, directed))
      return "path-enumeration and edge-witness oracles disagree (instance " +
             std::to_string(inst) + ")";
    if (uses) continue;  // fact not safe, nothing to certify

    oracle::EdgeList g2 = g;
    g2.edges.erase(std::find(g2.edges.begin(), g2.edges.end(), e));
    auto new_dist = oracle::bfs_all_pairs(g2);
    if (new_dist[(size_t)s][(size_t)t] != old_dist[(size_t)s][(size_t)t])
      return "safe distance did not survive the deletion (instance " + std::to_string(inst) + ")";
  }
  return std::nullopt;
}

// ------------------------------------------------------------ criterion 3

const char* kGrammars[5] = {
    // balanced brackets over l/r
    "S -> L R\nS -> S S\nL -> l\nR -> r\nR -> S R'\nR' -> r\n",
    // regular: one or more a then one or more b
    "S -> A S\nS -> A B\nA -> a\nB -> b\n",
    // odd-length palindromes over a/b
    "S -> a\nS -> b\nS -> A X\nS -> B Y\nX -> S A\nY -> S B\nA -> a\nB -> b\n",
    // equally many a and b
    "S -> A B\nS -> B A\nS -> S S\nS -> A X\nS -> B Y\nX -> S B\nY -> S A\nA -> a\nB -> b\n",
    // a^k b^k
    "S -> A B\nS -> A X\nX -> S B\nA -> a\nB -> b\n",
};

Verdict criterion_cfl(double*) {
  Rng rng(0xacc3);
  for (int gi = 0; gi < 5; ++gi) {
    Grammar g = Grammar::parse(kGrammars[gi]);
    auto alpha = g.alphabet();
    for (int script = 0; script < 20; ++script) {
      int n = rng.range(2, 24);
      std::string w;
      for (int i = 0; i < n; ++i) w += alpha[rng.below(alpha.size())];
      CflMaintainer m(g, w);
      int steps = rng.range(3, 10);
      for (int step = 0; step < steps; ++step) {
        std::set<int> positions;
        int mb = rng.range(1, std::min(n, 8));
        while ((int)positions.size() < mb) positions.insert(rng.range(1, n));
        std::vector<std::pair<int, char>> changes;
        for (int pos : positions) changes.push_back({pos, alpha[rng.below(alpha.size())]});
        RoundMeter meter;
        m.apply_set(changes, meter);
        if (meter.rounds_used > (uint64_t)log_three_halves_bound((uint64_t)mb))
          return at("rounds over bound", gi * 20 + script, step);
        if (!(m.rel() == oracle::gapped_closure(g, m.word())))
          return at("relation mismatch", gi * 20 + script, step);
        oracle::CykTable cyk(g, m.word());
        if (m.member() != cyk.derives(g.start(), 1, n))
          return at("membership mismatch", gi * 20 + script, step);
      }
    }
  }

  for (int inst = 0; inst < 1000; ++inst) {
    int n = rng.range(1, 200);
    oracle::RootedTree t;
    t.children.resize((size_t)n);
    std::vector<int> arity((size_t)n, 0);
    for (int v = 1; v < n; ++v) {
      for (;;) {
        int p = (int)rng.below((uint64_t)v);
        if (arity[(size_t)p] < 2) {
          t.children[(size_t)p].push_back(v);
          arity[(size_t)p] += 1;
          break;
        }
      }
    }
    std::vector<bool> red((size_t)n, false);
    for (int v = 0; v < n; ++v) red[(size_t)v] = rng.chance(0.3);
    red[rng.below((uint64_t)n)] = true;

    int v = oracle::split_binary_tree(t, red);
    // recount from scratch on both sides of the returned node
    int64_t total = 0, inside = 0;
    for (int u = 0; u < n; ++u) total += red[(size_t)u] ? 1 : 0;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      inside += red[(size_t)u] ? 1 : 0;
      for (int c : t.children[(size_t)u]) stack.push_back(c);
    }
    int64_t cap = (2 * total + 2) / 3;
    if (inside > cap || total - inside > cap)
      return "binary split node out of balance (instance " + std::to_string(inst) + ")";
  }
  return std::nullopt;
}

// ------------------------------------------------------------ criterion 4

struct CtxRef {
  int x, r, h;
  uint64_t mask;
  std::string code;
};

std::vector<CtxRef> all_contexts(const oracle::ForestView& f) {
  std::vector<CtxRef> out;
  for (int x = 0; x < f.n; ++x) {
    for (int r = 0; r < f.n; ++r) {
      for (int h = 0; h < f.n; ++h) {
        if (!oracle::on_path(f, x, r, h)) continue;
        CtxRef c;
        c.x = x;
        c.r = r;
        c.h = h;
        c.mask = 0;
        if (h == r) {
          c.mask = 1ull << r;
        } else {
          for (int v : oracle::subtree_nodes(f, x, r)) c.mask |= 1ull << v;
          int up = oracle::neighbor_toward(f, h, r);
          for (int v : oracle::subtree_nodes(f, up, h)) c.mask &= ~(1ull << v);
          c.mask |= 1ull << h;
        }
        c.code = oracle::context_code(f, x, r, h);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

Verdict forest_full_check(const TreeIsoMaintainer& t, int script, int step) {
  oracle::ForestView f(t.n());
  for (int v = 0; v < t.n(); ++v) {
    if (t.parent_of(v) >= 0) f.add_edge(t.parent_of(v), v);
  }
  std::vector<CtxRef> cs = all_contexts(f);
  for (size_t i = 0; i < cs.size(); ++i) {
    for (size_t j = i + 1; j < cs.size(); ++j) {
      bool want = (cs[i].mask & cs[j].mask) == 0 && cs[i].code == cs[j].code;
      if (t.ciso_view(cs[i].x, cs[i].r, cs[i].h, cs[j].x, cs[j].r, cs[j].h) != want)
        return at("context relation mismatch", script, step);
    }
  }

  struct Anchored {
    int x, r;
    uint64_t mask;
    std::string code;
  };
  std::vector<Anchored> subs;
  for (int x = 0; x < f.n; ++x) {
    auto dx = oracle::tree_dist_from(f, x);
    for (int r = 0; r < f.n; ++r) {
      if (dx[(size_t)r] < 0) continue;
      Anchored a;
      a.x = x;
      a.r = r;
      a.mask = 0;
      for (int v : oracle::subtree_nodes(f, x, r)) a.mask |= 1ull << v;
      a.code = oracle::ahu_code(f, x, r);
      subs.push_back(std::move(a));
    }
  }
  for (size_t i = 0; i < subs.size(); ++i) {
    for (size_t j = i + 1; j < subs.size(); ++j) {
      if (subs[i].mask & subs[j].mask) continue;
      bool want = subs[i].code == subs[j].code;
      if (t.t_iso(subs[i].x, subs[i].r, subs[j].x, subs[j].r) != want)
        return at("subtree relation mismatch", script, step);
    }
  }
  for (const Anchored& a : subs) {
    for (int y = 0; y < f.n; ++y) {
      if (!((a.mask >> y) & 1u) || y == a.r) continue;
      int q = oracle::neighbor_toward(f, y, a.x == y ? a.r : a.x);
      int block = oracle::neighbor_toward(f, q, a.x);
      int want = 0;
      std::string mine = oracle::ahu_code(f, q, y);
      for (int s : f.adj[(size_t)q]) {
        if (s == block || s == y) continue;
        if (oracle::ahu_code(f, q, s) == mine) want += 1;
      }
      if (t.iso_sibling_count(a.x, a.r, y) != want)
        return at("sibling count mismatch", script, step);
    }
  }
  return std::nullopt;
}

Verdict criterion_treeiso(double*) {
  Rng rng(0xacc4);
  for (int script = 0; script < 200; ++script) {
    bool big = script % 14 == 13;
    int n = big ? rng.range(20, 28) : rng.range(4, 16);
    int steps = big ? 4 : 8;
    TreeIsoMaintainer t(n);
    std::vector<int> parent((size_t)n, -1);
    auto root_of = [&](int v) {
      while (parent[(size_t)v] >= 0) v = parent[(size_t)v];
      return v;
    };
    for (int step = 0; step < steps; ++step) {
      Pairs del, ins;
      std::set<int> attached_now;  // never delete an edge inserted in this batch
      int mb = rng.range(1, 6);
      for (int j = 0; j < mb; ++j) {
        if (rng.chance(0.4)) {
          std::vector<int> kids;
          for (int v = 0; v < n; ++v)
            if (parent[(size_t)v] >= 0 && !attached_now.count(v)) kids.push_back(v);
          if (kids.empty()) continue;
          int c = kids[rng.below(kids.size())];
          del.push_back({parent[(size_t)c], c});
          parent[(size_t)c] = -1;
        } else {
          for (int tries = 0; tries < 32; ++tries) {
            int c = (int)rng.below((uint64_t)n), p = (int)rng.below((uint64_t)n);
            if (c == p || parent[(size_t)c] >= 0 || root_of(p) == c) continue;
            ins.push_back({p, c});
            parent[(size_t)c] = p;
            attached_now.insert(c);
            break;
          }
        }
      }
      if (del.empty() && ins.empty()) continue;
      RoundMeter meter;
      t.apply(del, ins, meter);
      if (meter.rounds_used > meter.bound) return at("rounds over bound", script, step);
      size_t touched = 2 * (del.size() + ins.size());
      if (meter.bound > (uint64_t)log_three_halves_bound((uint64_t)touched))
        return at("declared bound too large", script, step);
      if (auto v = forest_full_check(t, script, step)) return v;
    }
  }

  for (int inst = 0; inst < 1000; ++inst) {
    int n = rng.range(1, 60);
    oracle::RootedTree t;
    t.children.resize((size_t)n);
    for (int v = 1; v < n; ++v) t.children[rng.below((uint64_t)v)].push_back(v);
    std::vector<int> pebbles((size_t)n, 0);
    int64_t total = 0;
    for (int v = 0; v < n; ++v) {
      pebbles[(size_t)v] = (int)rng.below(3);
      total += pebbles[(size_t)v];
    }
    if (total < 3) {
      // top up distinct nodes so the precondition holds
      for (int v = 0; v < n && total < 3; ++v) {
        if (pebbles[(size_t)v] == 0) {
          pebbles[(size_t)v] = 1;
          total += 1;
        }
      }
      if (total < 3) continue;  // tree too small to carry three pebbles
    }

    auto sp = oracle::split_unbounded_tree(t, pebbles);
    std::vector<int64_t> inside_of((size_t)n, 0);
    // recount subtree loads bottom-up without reusing the helper under test
    std::vector<int> order, stack{0};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      order.push_back(u);
      for (int c : t.children[(size_t)u]) stack.push_back(c);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      inside_of[(size_t)*it] = pebbles[(size_t)*it];
      for (int c : t.children[(size_t)*it]) inside_of[(size_t)*it] += inside_of[(size_t)c];
    }
    int64_t inside = inside_of[(size_t)sp.node];
    int64_t outside = total - inside;
    if (sp.which == 1) {
      if (3 * inside > 2 * total || 3 * outside > 2 * total)
        return "case-1 split out of balance (instance " + std::to_string(inst) + ")";
    } else if (sp.which == 2) {
      if (3 * outside > total)
        return "case-2 complement too heavy (instance " + std::to_string(inst) + ")";
      for (int c : t.children[(size_t)sp.node]) {
        if (3 * inside_of[(size_t)c] > total)
          return "case-2 child too heavy (instance " + std::to_string(inst) + ")";
      }
    } else {
      return "split reported an unknown case";
    }
  }
  return std::nullopt;
}

// ------------------------------------------------------------ criterion 5

Verdict matching_script(MatchingMaintainer& m, const std::vector<PairBatch>& batches, int script) {
  std::set<std::pair<int, int>> present;
  int step = 0;
  for (const PairBatch& b : batches) {
    RoundMeter meter;
    m.apply(b.del, b.ins, meter);
    for (auto e : b.del) present.erase(e);
    for (auto e : b.ins) present.insert(e);
    std::string why;
    Pairs edges(present.begin(), present.end());
    if (!oracle::check_matching_maximal(m.n(), edges, m.matching(), &why))
      return at(("matching: " + why).c_str(), script, step);
    step += 1;
  }
  return std::nullopt;
}

std::vector<PairBatch> adversarial_matching(int variant, int& n_out) {
  std::vector<PairBatch> out;
  auto path_graph = [&](int n) {
    PairBatch b;
    for (int v = 0; v + 1 < n; ++v) b.ins.push_back({v, v + 1});
    return b;
  };
  switch (variant % 7) {
    case 0: {  // offer-consumption hub: repairs must not exhaust the pool
      int k = 2 + variant / 7;  // spoke count grows with the variant index
      int hub = 3 * k;          // a_i = i, b_i = k+i, c_i = 2k+i
      n_out = 3 * k + 2;
      PairBatch build;
      for (int i = 0; i < k; ++i) {
        build.ins.push_back({i, k + i});        // matched spokes
        build.ins.push_back({i, hub});          // offers into the hub
        build.ins.push_back({2 * k + i, hub});  // already-single hub neighbours
      }
      build.ins.push_back({hub, hub + 1});
      out.push_back(build);
      PairBatch tear;
      for (int i = 0; i < k; ++i) tear.del.push_back({i, k + i});
      out.push_back(tear);
      break;
    }
    case 1: {  // complete bipartite teardown
      int k = 4 + variant / 7;
      n_out = 2 * k;
      PairBatch build;
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) build.ins.push_back({u, k + v});
      }
      out.push_back(build);
      PairBatch tear;
      for (int u = 0; u < k; ++u) tear.del.push_back({u, k + u});
      out.push_back(tear);
      break;
    }
    case 2: {  // long path, delete every other edge
      int n = 16 + 8 * (variant / 7);
      n_out = n;
      out.push_back(path_graph(n));
      PairBatch tear;
      for (int v = 0; v + 1 < n; v += 4) tear.del.push_back({v, v + 1});
      out.push_back(tear);
      break;
    }
    case 3: {  // clique, delete a full matching at once
      int k = 6 + 2 * (variant / 7);
      n_out = k;
      PairBatch build;
      for (int u = 0; u < k; ++u) {
        for (int v = u + 1; v < k; ++v) build.ins.push_back({u, v});
      }
      out.push_back(build);
      PairBatch tear;
      for (int u = 0; u + 1 < k; u += 2) tear.del.push_back({u, u + 1});
      out.push_back(tear);
      break;
    }
    case 4: {  // crown: bipartite with the diagonal missing
      int k = 4 + variant / 7;
      n_out = 2 * k;
      PairBatch build;
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) {
          if (u != v) build.ins.push_back({u, k + v});
        }
      }
      out.push_back(build);
      PairBatch tear;
      for (int u = 0; u + 1 < k; ++u) tear.del.push_back({u, k + u + 1});
      out.push_back(tear);
      break;
    }
    case 5: {  // star of paths: teardown around a shared center
      int arms = 5 + variant / 7;
      n_out = 1 + 3 * arms;
      PairBatch build;
      for (int a = 0; a < arms; ++a) {
        int base = 1 + 3 * a;
        build.ins.push_back({0, base});
        build.ins.push_back({base, base + 1});
        build.ins.push_back({base + 1, base + 2});
      }
      out.push_back(build);
      PairBatch tear;
      for (int a = 0; a < arms; ++a) tear.del.push_back({1 + 3 * a, 2 + 3 * a});
      out.push_back(tear);
      PairBatch back;
      for (int a = 0; a < arms; ++a) back.ins.push_back({1 + 3 * a, 2 + 3 * a});
      out.push_back(back);
      break;
    }
    default: {  // full teardown and rebuild of a fixed gadget
      int n = 12 + 4 * (variant / 7);
      n_out = n;
      PairBatch build = path_graph(n);
      for (int v = 0; v + 3 < n; v += 3) build.ins.push_back({v, v + 3});
      out.push_back(build);
      PairBatch tear;
      tear.del = build.ins;
      out.push_back(tear);
      out.push_back(build);
      break;
    }
  }
  return out;
}

Verdict criterion_smallstruct(double*) {
  Rng rng(0xacc5);

  // spanning forests against a fresh sort-and-sweep after every step
  for (int script = 0; script < 300; ++script) {
    int n = rng.range(2, 64);
    int steps = rng.range(3, 20);
    MsfMaintainer m(n);
    std::set<std::pair<int, int>> present;
    auto sample = [&]() -> std::pair<int, int> {
      int u = (int)rng.below((uint64_t)n), v = (int)rng.below((uint64_t)n);
      if (u == v) return {-1, -1};
      return {std::min(u, v), std::max(u, v)};
    };
    for (int step = 0; step < steps; ++step) {
      PairBatch b = random_pair_batch(rng, present, rng.range(1, 10), sample);
      std::vector<WeightedEdge> ins;
      for (auto e : b.ins) ins.push_back({e.first, e.second, (int64_t)rng.range(1, 1000)});
      if (b.del.empty() && ins.empty()) continue;
      RoundMeter meter;
      m.apply(b.del, ins, meter);
      if (meter.rounds_used != 1) return at("spanning forest rounds", script, step);

      std::vector<oracle::WEdge> all;
      for (const auto& e : m.edge_list()) all.push_back({e.u, e.v, e.w});
      auto want = oracle::kruskal(n, all);
      auto got = m.forest();
      bool same = want.size() == got.size();
      for (size_t i = 0; same && i < got.size(); ++i) {
        same = got[i].u == want[i].u && got[i].v == want[i].v && got[i].w == want[i].w;
      }
      if (!same) return at("forest mismatch", script, step);
    }
  }

  // matchings: random scripts
  for (int script = 0; script < 300; ++script) {
    int n = rng.range(2, 40);
    int steps = rng.range(3, 15);
    MatchingMaintainer m(n);
    std::set<std::pair<int, int>> present;
    auto sample = [&]() -> std::pair<int, int> {
      int u = (int)rng.below((uint64_t)n), v = (int)rng.below((uint64_t)n);
      if (u == v) return {-1, -1};
      return {std::min(u, v), std::max(u, v)};
    };
    std::vector<PairBatch> batches;
    for (int step = 0; step < steps; ++step)
      batches.push_back(random_pair_batch(rng, present, rng.range(1, 8), sample));
    if (auto v = matching_script(m, batches, script)) return v;
  }

  // matchings: adversarial teardown patterns
  for (int variant = 0; variant < 20; ++variant) {
    int n = 0;
    auto batches = adversarial_matching(variant, n);
    MatchingMaintainer m(n);
    if (auto v = matching_script(m, batches, 300 + variant)) return v;
  }

  // colorings stay proper inside the fixed palette; the extraction loop gets
  // at most delta+1 sweeps
  for (int script = 0; script < 300; ++script) {
    int n = rng.range(2, 48);
    int delta = rng.range(1, 6);
    int steps = rng.range(3, 12);
    ColoringMaintainer m(n, delta);
    std::set<std::pair<int, int>> present;
    std::vector<int> deg((size_t)n, 0);
    for (int step = 0; step < steps; ++step) {
      // degrees are tracked while the batch is assembled, so two inserts
      // never push the same node over the bound together
      PairBatch b;
      std::set<std::pair<int, int>> touched;
      int mb = rng.range(1, 8);
      for (int j = 0; j < mb; ++j) {
        if (!present.empty() && rng.chance(0.4)) {
          auto it = present.begin();
          std::advance(it, (long)rng.below(present.size()));
          if (touched.count(*it)) continue;
          touched.insert(*it);
          b.del.push_back(*it);
          deg[(size_t)it->first] -= 1;
          deg[(size_t)it->second] -= 1;
          present.erase(it);
        } else {
          for (int tries = 0; tries < 64; ++tries) {
            int u = (int)rng.below((uint64_t)n), v = (int)rng.below((uint64_t)n);
            if (u == v || deg[(size_t)u] >= delta || deg[(size_t)v] >= delta) continue;
            std::pair<int, int> e{std::min(u, v), std::max(u, v)};
            if (present.count(e) || touched.count(e)) continue;
            touched.insert(e);
            b.ins.push_back(e);
            deg[(size_t)u] += 1;
            deg[(size_t)v] += 1;
            present.insert(e);
            break;
          }
        }
      }
      if (b.del.empty() && b.ins.empty()) continue;
      RoundMeter meter;
      m.apply(b.del, b.ins, meter);
      for (const auto& [label, count] : meter.block_events) {
        if (label == "mis-extraction" && count > (uint64_t)delta + 1)
          return at("extraction loop too long", script, step);
      }
      std::string why;
      if (!oracle::check_coloring(n, m.edges(), m.coloring(), delta + 1, &why))
        return at(("coloring: " + why).c_str(), script, step);
    }
  }

  // the set-extraction subroutine alone: never more sweeps than classes
  for (int inst = 0; inst < 300; ++inst) {
    int n = rng.range(1, 40);
    Pairs edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.chance(0.2)) edges.push_back({u, v});
      }
    }
    std::vector<std::vector<int>> adj((size_t)n);
    for (auto [u, v] : edges) {
      adj[(size_t)u].push_back(v);
      adj[(size_t)v].push_back(u);
    }
    int k = 1;
    std::vector<int> col((size_t)n, 0);
    for (int v = 0; v < n; ++v) {
      std::set<int> used;
      for (int w : adj[(size_t)v]) {
        if (w < v) used.insert(col[(size_t)w]);
      }
      int c = 1;
      while (used.count(c)) c += 1;
      col[(size_t)v] = c;
      k = std::max(k, c);
    }
    std::vector<std::vector<int>> classes((size_t)k);
    for (int v = 0; v < n; ++v) classes[(size_t)col[(size_t)v] - 1].push_back(v);
    MisResult r = mis_from_coloring(n, edges, classes);
    if (r.iterations > k) return "set extraction used more sweeps than classes";
    std::vector<bool> in_set((size_t)n, false);
    for (int v : r.nodes) in_set[(size_t)v] = true;
    std::string why;
    if (!oracle::check_mis(n, edges, in_set, &why)) return "extracted set not maximal: " + why;
  }
  return std::nullopt;
}

// ------------------------------------------------------------ criterion 6

Verdict criterion_determinism(double*) {
  std::vector<std::pair<ChangeScript, EngineOptions>> runs;
  for (uint64_t seed : {3u, 17u}) {
    for (StructKind kind : {StructKind::Digraph, StructKind::Dag, StructKind::Ugraph,
                            StructKind::Forest, StructKind::Wgraph}) {
      GenSpec spec;
      spec.kind = kind;
      spec.n = 14;
      spec.steps = 18;
      spec.seed = seed;
      runs.push_back({parse_script(gen_script(spec)), EngineOptions{}});
    }
    GenSpec spec;
    spec.kind = StructKind::Ugraph;
    spec.n = 14;
    spec.delta = 3;
    spec.steps = 18;
    spec.seed = seed;
    runs.push_back({parse_script(gen_script(spec)), EngineOptions{}});
    GenSpec wspec;
    wspec.kind = StructKind::Word;
    wspec.n = 12;
    wspec.steps = 12;
    wspec.seed = seed;
    wspec.grammar_path = "inline.cnf";
    wspec.grammar_text = kGrammars[0];
    EngineOptions wopt;
    wopt.grammar_text = kGrammars[0];
    runs.push_back({parse_script(gen_script(wspec)), wopt});
  }
  for (size_t i = 0; i < runs.size(); ++i) {
    Engine a(runs[i].first, runs[i].second);
    Engine b(runs[i].first, runs[i].second);
    if (render_report(a.run(), false) != render_report(b.run(), false))
      return "replay diverged on generated script " + std::to_string(i);
  }
  return std::nullopt;
}

// ------------------------------------------------------------ criterion 7

Verdict criterion_scaling(double*) {
  ChangeScript sc = parse_script(gen_bench_dist());
  auto rows = bench_script(sc, EngineOptions{}, 2);
  if (rows.size() != 10) return "expected 10 doubling steps";
  size_t m = 1;
  for (const BenchRow& r : rows) {
    if (r.m != m) return "batch sizes are not doubling";
    if (r.rounds != (uint64_t)ceil_log2_succ((uint64_t)m))
      return "step with m=" + std::to_string(m) + " took " + std::to_string(r.rounds) +
             " rounds";
    m <<= 1;
  }
  return std::nullopt;
}

// ----------------------------------------------------------------- driver

struct Criterion {
  const char* label;
  Verdict (*fn)(double*);
};

}  // namespace

int main() {
  const Criterion table[] = {
      {"directed reachability vs full search, inverse audit", criterion_reach},
      {"distances vs breadth-first search, safe-fact certifier", criterion_distances},
      {"grammar relations vs closure oracle, split certifier", criterion_cfl},
      {"tree isomorphism vs canonical codes, split certifier", criterion_treeiso},
      {"spanning forest, matching, coloring invariants", criterion_smallstruct},
      {"byte-stable replay reports", criterion_determinism},
      {"round scaling on doubling batches", criterion_scaling},
  };
  int failures = 0;
  for (size_t i = 0; i < sizeof(table) / sizeof(table[0]); ++i) {
    double secs = 0.0;
    double t0 = now_s();
    Verdict v;
    try {
      v = table[i].fn(&secs);
    } catch (const Error& e) {
      v = std::string("unexpected error: ") + e.what();
    }
    if (secs == 0.0) secs = now_s() - t0;
    if (v) {
      failures += 1;
      std::printf("criterion %zu: FAIL  %s: %s\n", i + 1, table[i].label, v->c_str());
    } else {
      std::printf("criterion %zu: PASS  %s (%.1fs)\n", i + 1, table[i].label, secs);
    }
    std::fflush(stdout);
  }
  return failures;
}

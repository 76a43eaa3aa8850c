#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynq/cfl/grammar.hpp"
#include "dynq/common.hpp"
#include "dynq/core/script.hpp"

namespace dynq {

// Everything the script generator needs. The same settings and seed always
// produce the same bytes, so generated scripts can serve as regression
// fixtures.
struct GenSpec {
  StructKind kind = StructKind::Digraph;
  int n = 16;
  int steps = 20;
  int batch = 0;             // per-line tuple cap; 0 picks the script default
  int delta = -1;            // degree bound; >= 0 turns a ugraph into a coloring run
  uint64_t seed = 1;
  std::string grammar_path;  // word scripts: path recorded in the header
  std::string grammar_text;  // word scripts: parsed here for the alphabet
  bool queries = true;
};

namespace gendetail {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  int below(int k) { return (int)(eng_() % (uint64_t)k); }
  bool coin(int pct) { return below(100) < pct; }

 private:
  std::mt19937_64 eng_;
};

inline std::pair<int, int> ord(int u, int v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

template <typename Set>
inline auto pick(Rng& rng, const Set& s) {
  auto it = s.begin();
  std::advance(it, rng.below((int)s.size()));
  return *it;
}

// Model-side subtree of r in the tree anchored at x: the nodes whose path to
// x goes through r. Mirrors the query-side definition so generated tiso
// queries are valid by construction.
inline uint64_t model_subtree(const std::vector<std::vector<int>>& adj, int x, int r) {
  if (x == r) {
    uint64_t m = 0;
    std::vector<int> stack{x};
    m |= 1ull << x;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[(size_t)u]) {
        if (!((m >> v) & 1u)) {
          m |= 1ull << v;
          stack.push_back(v);
        }
      }
    }
    return m;
  }
  // drop the neighbour of r that lies toward x, keep the rest
  std::vector<int> par((size_t)adj.size(), -2);
  std::vector<int> stack{r};
  par[(size_t)r] = -1;
  int toward_x = -1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[(size_t)u]) {
      if (par[(size_t)v] == -2) {
        par[(size_t)v] = u;
        stack.push_back(v);
      }
    }
  }
  int w = x;
  while (par[(size_t)w] != r) w = par[(size_t)w];
  toward_x = w;
  uint64_t m = 1ull << r;
  stack.assign(1, r);
  std::vector<char> seen((size_t)adj.size(), 0);
  seen[(size_t)r] = 1;
  seen[(size_t)toward_x] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[(size_t)u]) {
      if (!seen[(size_t)v]) {
        seen[(size_t)v] = 1;
        m |= 1ull << v;
        stack.push_back(v);
      }
    }
  }
  return m;
}

}  // namespace gendetail

// Emits one deterministic change script for the requested structure kind.
// Every line is valid at the moment it executes: inserts avoid present
// tuples, deletes pick present ones, degree bounds and forest shape are
// respected while the batch is being assembled.
inline std::string gen_script(const GenSpec& spec) {
  using gendetail::ord;
  using gendetail::pick;
  using gendetail::Rng;

  if (spec.n < 1) fail(Err::OutOfDomain, "n must be positive");
  if (spec.steps < 1) fail(Err::OutOfDomain, "steps must be positive");
  const uint64_t bound =
      spec.batch > 0 ? (uint64_t)spec.batch : default_batch_bound(spec.n);
  Rng rng(spec.seed);
  std::ostringstream out;

  out << "init n=" << spec.n << " kind=" << kind_name(spec.kind);
  if (spec.kind == StructKind::Word) {
    if (spec.grammar_path.empty() || spec.grammar_text.empty())
      fail(Err::MissingHeader, "word generation needs a grammar");
    out << " grammar=" << spec.grammar_path;
  }
  if (spec.kind == StructKind::Ugraph && spec.delta >= 0) out << " delta=" << spec.delta;
  out << " bound=" << bound << "\n";

  const int n = spec.n;
  const bool directed = spec.kind == StructKind::Digraph || spec.kind == StructKind::Dag;

  // model state shared by the graph kinds
  std::set<std::pair<int, int>> present;
  std::vector<int> topo((size_t)n);      // dag: position of each node in a fixed order
  std::vector<int> degree((size_t)n, 0); // delta-bounded ugraph
  std::vector<int> parent((size_t)n, -1);
  std::string word;
  std::vector<char> alphabet;

  if (spec.kind == StructKind::Dag) {
    for (int i = 0; i < n; ++i) topo[(size_t)i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(topo[(size_t)i], topo[(size_t)rng.below(i + 1)]);
  }
  if (spec.kind == StructKind::Word) {
    Grammar g = Grammar::parse(spec.grammar_text);
    alphabet = g.alphabet();
    word.assign((size_t)n, alphabet.front());
  }

  auto sample_absent = [&](int tries) -> std::pair<int, int> {
    while (tries-- > 0) {
      int u = rng.below(n);
      int v = rng.below(n);
      if (u == v) continue;
      std::pair<int, int> e = directed ? std::pair{u, v} : ord(u, v);
      if (spec.kind == StructKind::Dag) {
        // orient along the fixed order so the graph stays acyclic
        if (topo[(size_t)e.first] > topo[(size_t)e.second]) std::swap(e.first, e.second);
      }
      if (present.count(e)) continue;
      if (spec.delta >= 0 &&
          (degree[(size_t)e.first] >= spec.delta || degree[(size_t)e.second] >= spec.delta))
        continue;
      return e;
    }
    return {-1, -1};
  };

  // forest helpers
  std::vector<std::vector<int>> fadj((size_t)n);
  auto root_of = [&](int v) {
    while (parent[(size_t)v] >= 0) v = parent[(size_t)v];
    return v;
  };

  auto emit_query = [&]() {
    switch (spec.kind) {
      case StructKind::Digraph:
        out << "query reach " << rng.below(n) << " " << rng.below(n) << "\n";
        return;
      case StructKind::Dag:
        out << "query dist " << rng.below(n) << " " << rng.below(n) << "\n";
        return;
      case StructKind::Ugraph:
        if (spec.delta >= 0) {
          out << "query coloring\n";
        } else if (rng.coin(50)) {
          out << "query dist " << rng.below(n) << " " << rng.below(n) << "\n";
        } else {
          out << "query matching\n";
        }
        return;
      case StructKind::Wgraph:
        out << "query msf\n";
        return;
      case StructKind::Word:
        out << "query member\n";
        return;
      case StructKind::Forest: {
        for (int tries = 0; tries < 32; ++tries) {
          int x = rng.below(n);
          int r = rng.below(n);
          if (root_of(x) != root_of(r)) continue;
          uint64_t ma = gendetail::model_subtree(fadj, x, r);
          int xs = rng.below(n);
          int rs = rng.below(n);
          if (root_of(xs) != root_of(rs)) continue;
          uint64_t mb = gendetail::model_subtree(fadj, xs, rs);
          if (ma & mb) continue;
          out << "query tiso " << x << " " << r << " " << xs << " " << rs << "\n";
          return;
        }
        return;  // no disjoint pair found this time; skip the query
      }
    }
  };

  for (int step = 0; step < spec.steps; ++step) {
    int want = 1 + rng.below((int)std::min<uint64_t>(bound, 1'000'000));

    if (spec.kind == StructKind::Word) {
      std::set<int> positions;  // 1-based, as the word maintainer expects
      while ((int)positions.size() < std::min(want, n)) positions.insert(1 + rng.below(n));
      out << "set";
      for (int pos : positions) {
        char c = alphabet[(size_t)rng.below((int)alphabet.size())];
        word[(size_t)(pos - 1)] = c;
        out << " (" << pos << "," << c << ")";
      }
      out << "\n";
      if (spec.queries && rng.coin(60)) emit_query();
      continue;
    }

    if (spec.kind == StructKind::Forest) {
      auto detach_some = [&](int k) {
        std::vector<std::pair<int, int>> ops;
        for (int j = 0; j < k; ++j) {
          std::vector<int> children;
          for (int v = 0; v < n; ++v)
            if (parent[(size_t)v] >= 0) children.push_back(v);
          if (children.empty()) break;
          int c = children[(size_t)rng.below((int)children.size())];
          int p = parent[(size_t)c];
          ops.push_back({p, c});
          parent[(size_t)c] = -1;
          fadj[(size_t)p].erase(std::find(fadj[(size_t)p].begin(), fadj[(size_t)p].end(), c));
          fadj[(size_t)c].erase(std::find(fadj[(size_t)c].begin(), fadj[(size_t)c].end(), p));
        }
        return ops;
      };
      auto attach_some = [&](int k) {
        std::vector<std::pair<int, int>> ops;
        for (int j = 0; j < k; ++j) {
          bool placed = false;
          for (int tries = 0; tries < 64 && !placed; ++tries) {
            int c = rng.below(n);
            int p = rng.below(n);
            if (c == p || parent[(size_t)c] >= 0) continue;
            if (root_of(p) == c) continue;  // would close a cycle
            ops.push_back({p, c});
            parent[(size_t)c] = p;
            fadj[(size_t)p].push_back(c);
            fadj[(size_t)c].push_back(p);
            placed = true;
          }
          if (!placed) break;
        }
        return ops;
      };
      bool deleting = rng.coin(40);
      // a tree spanning every node has no legal attachment, and an edgeless
      // forest nothing to detach, so fall back to the other operation
      std::vector<std::pair<int, int>> ops = deleting ? detach_some(want) : attach_some(want);
      if (ops.empty()) {
        deleting = !deleting;
        ops = deleting ? detach_some(want) : attach_some(want);
      }
      if (ops.empty()) fail(Err::InfeasibleConstraint, "no forest change is possible");
      out << (deleting ? "del E" : "ins E");
      for (auto [p, c] : ops) out << " (" << p << "," << c << ")";
      out << "\n";
      if (spec.queries && rng.coin(60)) emit_query();
      continue;
    }

    // plain edge kinds: digraph, dag, ugraph, delta-ugraph, wgraph
    bool deleting = !present.empty() && rng.coin(40);
    std::vector<std::pair<int, int>> picked;
    if (deleting) {
      std::set<std::pair<int, int>> chosen;
      int take = std::min<int>(want, (int)present.size());
      while ((int)chosen.size() < take) chosen.insert(pick(rng, present));
      for (auto e : chosen) {
        picked.push_back(e);
        present.erase(e);
        if (spec.delta >= 0) {
          degree[(size_t)e.first] -= 1;
          degree[(size_t)e.second] -= 1;
        }
      }
    } else {
      for (int j = 0; j < want; ++j) {
        auto e = sample_absent(64);
        if (e.first < 0) break;
        picked.push_back(e);
        present.insert(e);
        if (spec.delta >= 0) {
          degree[(size_t)e.first] += 1;
          degree[(size_t)e.second] += 1;
        }
      }
      if (picked.empty()) {
        if (present.empty())
          fail(Err::InfeasibleConstraint, "no tuple can be inserted or deleted");
        deleting = true;
        auto e = pick(rng, present);
        picked.push_back(e);
        present.erase(e);
        if (spec.delta >= 0) {
          degree[(size_t)e.first] -= 1;
          degree[(size_t)e.second] -= 1;
        }
      }
    }
    out << (deleting ? "del E" : "ins E");
    for (auto e : picked) {
      out << " (" << e.first << "," << e.second;
      if (spec.kind == StructKind::Wgraph && !deleting) out << "," << 1 + rng.below(1000);
      out << ")";
    }
    out << "\n";
    if (spec.queries && rng.coin(60)) emit_query();
  }
  return out.str();
}

// Benchmark fixture for the distance engine: every step inserts a fresh path
// on untouched nodes, so the fixpoint loop needs one round per doubling of
// the batch size and nothing carries over between steps.
inline std::string gen_bench_dist() {
  std::ostringstream out;
  out << "init n=4096 kind=ugraph bound=512\n";
  int next = 0;
  for (int m = 1; m <= 512; m <<= 1) {
    out << "ins E";
    for (int i = 0; i < m; ++i) out << " (" << next + i << "," << next + i + 1 << ")";
    out << "\n";
    next += m + 1;
  }
  return out.str();
}

}  // namespace dynq

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "dynq/common.hpp"

namespace dynq::oracle {

struct WEdge {
  int u, v;
  int64_t w;
  // global tie-break: weight, then endpoints; keys are distinct for distinct
  // edges, which makes the minimum spanning forest unique
  bool operator<(const WEdge& o) const {
    if (w != o.w) return w < o.w;
    if (u != o.u) return u < o.u;
    return v < o.v;
  }
  bool operator==(const WEdge& o) const { return u == o.u && v == o.v && w == o.w; }
};

class Dsu {
 public:
  explicit Dsu(int n) : p_(n) { std::iota(p_.begin(), p_.end(), 0); }
  int find(int x) {
    while (p_[(size_t)x] != x) {
      p_[(size_t)x] = p_[(size_t)p_[(size_t)x]];
      x = p_[(size_t)x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p_[(size_t)a] = b;
    return true;
  }

 private:
  std::vector<int> p_;
};

inline std::vector<WEdge> kruskal(int n, std::vector<WEdge> edges) {
  std::sort(edges.begin(), edges.end());
  Dsu dsu(n);
  std::vector<WEdge> out;
  for (const auto& e : edges) {
    if (dsu.unite(e.u, e.v)) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Prim grown per component with the same tie-break; agrees with kruskal
// because the tie-broken keys are distinct
inline std::vector<WEdge> prim(int n, const std::vector<WEdge>& edges) {
  std::vector<std::vector<WEdge>> inc((size_t)n);
  for (const auto& e : edges) {
    inc[(size_t)e.u].push_back(e);
    inc[(size_t)e.v].push_back(e);
  }
  std::vector<bool> in_tree((size_t)n, false);
  std::vector<WEdge> out;
  for (int s = 0; s < n; ++s) {
    if (in_tree[(size_t)s]) continue;
    in_tree[(size_t)s] = true;
    std::set<WEdge> frontier(inc[(size_t)s].begin(), inc[(size_t)s].end());
    while (!frontier.empty()) {
      auto it = frontier.begin();
      WEdge e = *it;
      frontier.erase(it);
      int fresh = -1;
      if (!in_tree[(size_t)e.u]) fresh = e.u;
      if (!in_tree[(size_t)e.v]) fresh = e.v;
      if (fresh < 0) continue;
      out.push_back(e);
      in_tree[(size_t)fresh] = true;
      for (const auto& f : inc[(size_t)fresh]) {
        if (!in_tree[(size_t)f.u] || !in_tree[(size_t)f.v]) frontier.insert(f);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// maximal matching check: edges exist, are node-disjoint, and no graph edge
// joins two unmatched nodes
inline bool check_matching_maximal(int n, const std::vector<std::pair<int, int>>& graph_edges,
                                   const std::vector<std::pair<int, int>>& matching,
                                   std::string* why = nullptr) {
  auto norm = [](std::pair<int, int> e) {
    return e.first < e.second ? e : std::pair<int, int>{e.second, e.first};
  };
  std::set<std::pair<int, int>> g;
  for (auto e : graph_edges) g.insert(norm(e));
  std::vector<bool> matched((size_t)n, false);
  for (auto e : matching) {
    auto ne = norm(e);
    if (!g.count(ne)) {
      if (why) *why = "matching edge not in graph";
      return false;
    }
    if (matched[(size_t)ne.first] || matched[(size_t)ne.second]) {
      if (why) *why = "node matched twice";
      return false;
    }
    matched[(size_t)ne.first] = matched[(size_t)ne.second] = true;
  }
  for (auto e : g) {
    if (!matched[(size_t)e.first] && !matched[(size_t)e.second]) {
      if (why) *why = "augmentable edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
      return false;
    }
  }
  return true;
}

// colors must be proper and drawn from {1..palette}
inline bool check_coloring(int n, const std::vector<std::pair<int, int>>& edges,
                           const std::vector<int>& col, int palette, std::string* why = nullptr) {
  if ((int)col.size() != n) {
    if (why) *why = "wrong color vector size";
    return false;
  }
  for (int u = 0; u < n; ++u) {
    if (col[(size_t)u] < 1 || col[(size_t)u] > palette) {
      if (why) *why = "color of node " + std::to_string(u) + " outside palette";
      return false;
    }
  }
  for (auto [u, v] : edges) {
    if (u != v && col[(size_t)u] == col[(size_t)v]) {
      if (why) *why = "edge (" + std::to_string(u) + "," + std::to_string(v) + ") monochromatic";
      return false;
    }
  }
  return true;
}

// independent set that no vertex can extend
inline bool check_mis(int n, const std::vector<std::pair<int, int>>& edges,
                      const std::vector<bool>& in_set, std::string* why = nullptr) {
  std::vector<std::vector<int>> adj((size_t)n);
  for (auto [u, v] : edges) {
    adj[(size_t)u].push_back(v);
    adj[(size_t)v].push_back(u);
  }
  for (auto [u, v] : edges) {
    if (in_set[(size_t)u] && in_set[(size_t)v]) {
      if (why) *why = "edge inside set";
      return false;
    }
  }
  for (int u = 0; u < n; ++u) {
    if (in_set[(size_t)u]) continue;
    bool blocked = false;
    for (int v : adj[(size_t)u]) {
      if (in_set[(size_t)v]) {
        blocked = true;
        break;
      }
    }
    if (!blocked) {
      if (why) *why = "node " + std::to_string(u) + " could join";
      return false;
    }
  }
  return true;
}

}  // namespace dynq::oracle

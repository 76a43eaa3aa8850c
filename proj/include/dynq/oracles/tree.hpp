#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dynq/common.hpp"

namespace dynq::oracle {

// Undirected forest with explicit adjacency. Rootings are chosen per call:
// subtree_x(r) is the subtree of r once r's tree is re-rooted at x.
struct ForestView {
  int n = 0;
  std::vector<std::vector<int>> adj;

  explicit ForestView(int nodes = 0) : n(nodes), adj((size_t)nodes) {}

  void add_edge(int a, int b) {
    adj[(size_t)a].push_back(b);
    adj[(size_t)b].push_back(a);
  }
};

// BFS distances from s; -1 off-tree
inline std::vector<int> tree_dist_from(const ForestView& f, int s) {
  std::vector<int> d((size_t)f.n, -1);
  std::vector<int> q{s};
  d[(size_t)s] = 0;
  for (size_t i = 0; i < q.size(); ++i) {
    int u = q[i];
    for (int v : f.adj[(size_t)u]) {
      if (d[(size_t)v] < 0) {
        d[(size_t)v] = d[(size_t)u] + 1;
        q.push_back(v);
      }
    }
  }
  return d;
}

inline bool on_path(const ForestView& f, int x, int mid, int y) {
  auto dx = tree_dist_from(f, x);
  auto dm = tree_dist_from(f, mid);
  return dx[(size_t)y] >= 0 && dx[(size_t)mid] >= 0 &&
         dx[(size_t)mid] + dm[(size_t)y] == dx[(size_t)y];
}

// neighbor of r on the path toward x, or -1 when r == x or disconnected
inline int neighbor_toward(const ForestView& f, int r, int x) {
  if (r == x) return -1;
  auto dx = tree_dist_from(f, x);
  if (dx[(size_t)r] < 0) return -1;
  for (int v : f.adj[(size_t)r]) {
    if (dx[(size_t)v] == dx[(size_t)r] - 1) return v;
  }
  return -1;
}

// nodes y with r on path(x,y); empty when x cannot see r
inline std::vector<int> subtree_nodes(const ForestView& f, int x, int r) {
  std::vector<int> out;
  if (x != r) {
    auto dx = tree_dist_from(f, x);
    if (dx[(size_t)r] < 0) return out;
  }
  int block = neighbor_toward(f, r, x);
  std::vector<int> stack{r};
  std::vector<bool> seen((size_t)f.n, false);
  seen[(size_t)r] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (int v : f.adj[(size_t)u]) {
      if (v == block && u == r) continue;
      if (!seen[(size_t)v]) {
        seen[(size_t)v] = true;
        stack.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Canonical code of subtree_x(r): children codes sorted and wrapped. Equal
// codes characterize rooted isomorphism.
inline std::string ahu_code(const ForestView& f, int x, int r) {
  int block = neighbor_toward(f, r, x);
  auto rec = [&](auto&& self, int u, int par) -> std::string {
    std::vector<std::string> kids;
    for (int v : f.adj[(size_t)u]) {
      if (v != par) kids.push_back(self(self, v, u));
    }
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (auto& k : kids) s += k;
    s += ")";
    return s;
  };
  return rec(rec, r, block);
}

// Canonical code of the context: subtree_x(r) with h's children cut off and
// h itself marked. Root-and-hole preserving isomorphism is code equality.
inline std::string context_code(const ForestView& f, int x, int r, int h) {
  if (!on_path(f, x, r, h)) fail(Err::InvalidContext, "hole not under root");
  int block = neighbor_toward(f, r, x);
  auto rec = [&](auto&& self, int u, int par) -> std::string {
    if (u == h) return "[]";
    std::vector<std::string> kids;
    for (int v : f.adj[(size_t)u]) {
      if (v != par) kids.push_back(self(self, v, u));
    }
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (auto& k : kids) s += k;
    s += ")";
    return s;
  };
  return rec(rec, r, block);
}

// Exhaustive rooted-isomorphism check by recursive child matching. Kept
// independent of the code machinery so the two can vouch for each other on
// small instances.
inline bool iso_by_matching(const ForestView& f1, int r1, int p1, const ForestView& f2, int r2,
                            int p2, int h1 = -1, int h2 = -1) {
  bool hole1 = r1 == h1, hole2 = r2 == h2;
  if (hole1 != hole2) return false;
  if (hole1) return true;  // holes match regardless of pruned children
  std::vector<int> k1, k2;
  for (int v : f1.adj[(size_t)r1])
    if (v != p1) k1.push_back(v);
  for (int v : f2.adj[(size_t)r2])
    if (v != p2) k2.push_back(v);
  if (k1.size() != k2.size()) return false;
  std::vector<bool> used(k2.size(), false);
  auto match = [&](auto&& self, size_t i) -> bool {
    if (i == k1.size()) return true;
    for (size_t j = 0; j < k2.size(); ++j) {
      if (used[j]) continue;
      if (iso_by_matching(f1, k1[i], r1, f2, k2[j], r2, h1, h2)) {
        used[j] = true;
        if (self(self, i + 1)) return true;
        used[j] = false;
      }
    }
    return false;
  };
  return match(match, 0);
}

inline bool subtree_iso_exhaustive(const ForestView& f1, int x1, int r1, const ForestView& f2,
                                   int x2, int r2) {
  return iso_by_matching(f1, r1, neighbor_toward(f1, r1, x1), f2, r2,
                         neighbor_toward(f2, r2, x2));
}

inline bool context_iso_exhaustive(const ForestView& f1, int x1, int r1, int h1,
                                   const ForestView& f2, int x2, int r2, int h2) {
  if (!on_path(f1, x1, r1, h1) || !on_path(f2, x2, r2, h2))
    fail(Err::InvalidContext, "hole not under root");
  return iso_by_matching(f1, r1, neighbor_toward(f1, r1, x1), f2, r2,
                         neighbor_toward(f2, r2, x2), h1, h2);
}

}  // namespace dynq::oracle

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dynq/common.hpp"

namespace dynq::oracle {

// Rooted tree as children lists (node 0 is the root unless stated otherwise).
struct RootedTree {
  std::vector<std::vector<int>> children;
  int root = 0;
  int size() const { return (int)children.size(); }
};

inline std::vector<int64_t> subtree_weights(const RootedTree& t, const std::vector<int64_t>& w) {
  std::vector<int64_t> acc = w;
  // children lists are acyclic, so a reverse DFS order accumulates bottom-up
  std::vector<int> order, stack{t.root};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (int c : t.children[(size_t)u]) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int c : t.children[(size_t)*it]) acc[(size_t)*it] += acc[(size_t)c];
  }
  return acc;
}

// Split node for a binary tree with red nodes: returns v with both the
// subtree of v and its complement holding at most ceil(2/3 * total) red
// nodes. Found by walking from the root toward the redder child.
inline int split_binary_tree(const RootedTree& t, const std::vector<bool>& red) {
  std::vector<int64_t> w(red.size());
  for (size_t i = 0; i < red.size(); ++i) w[i] = red[i] ? 1 : 0;
  auto in = subtree_weights(t, w);
  int64_t total = in[(size_t)t.root];
  if (total < 1) fail(Err::PreconditionViolated, "no red nodes");
  int64_t cap = (2 * total + 2) / 3;  // ceil(2/3 * total)
  int v = t.root;
  while (true) {
    if (in[(size_t)v] <= cap && total - in[(size_t)v] <= cap) return v;
    int best = -1;
    for (int c : t.children[(size_t)v]) {
      if (best < 0 || in[(size_t)c] > in[(size_t)best]) best = c;
    }
    if (best < 0) fail(Err::PreconditionViolated, "descended past a leaf");
    v = best;
  }
}

// Split node for unbounded-degree trees under a pebble weighting. Case 1:
// subtree and complement both hold at most 2/3 of the pebbles. Case 2: the
// complement holds at most 1/3 and so does every child subtree. Exact
// fractions, no rounding.
struct UnboundedSplit {
  int node;
  int which;  // 1 or 2
};

inline UnboundedSplit split_unbounded_tree(const RootedTree& t, const std::vector<int>& pebbles) {
  std::vector<int64_t> w(pebbles.begin(), pebbles.end());
  auto in = subtree_weights(t, w);
  int64_t total = in[(size_t)t.root];
  if (total <= 2) {
    bool two_spread = total == 2;
    for (int p : pebbles) {
      if (p > 1) two_spread = false;
    }
    if (!two_spread) fail(Err::PreconditionViolated, "needs >2 pebbles, or =2 spread out");
  }
  int v = t.root;
  while (true) {
    int64_t inside = in[(size_t)v], outside = total - inside;
    if (3 * inside <= 2 * total && 3 * outside <= 2 * total) return {v, 1};
    if (3 * outside <= total) {
      bool kids_ok = true;
      for (int c : t.children[(size_t)v]) {
        if (3 * in[(size_t)c] > total) {
          kids_ok = false;
          break;
        }
      }
      if (kids_ok) return {v, 2};
    }
    int best = -1;
    for (int c : t.children[(size_t)v]) {
      if (best < 0 || in[(size_t)c] > in[(size_t)best]) best = c;
    }
    if (best < 0) fail(Err::PreconditionViolated, "descended past a leaf");
    v = best;
  }
}

}  // namespace dynq::oracle

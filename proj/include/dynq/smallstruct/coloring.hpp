#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"

namespace dynq {

struct MisResult {
  std::vector<int> nodes;
  int iterations = 0;
};

// Maximal independent set extracted from a proper coloring partition: take
// the lowest-index class that still has undecided members, move them all
// into the set, knock out their closed neighbourhoods, repeat. Each pick
// drains its class for good, so the loop runs at most once per class. The
// optional `alive` mask restricts the graph to a subset of nodes; classes
// must then partition exactly the alive nodes.
inline MisResult mis_from_coloring(int n, const std::vector<std::pair<int, int>>& edges,
                                   const std::vector<std::vector<int>>& classes,
                                   const std::vector<char>* alive = nullptr) {
  auto is_alive = [&](int v) { return alive == nullptr || (*alive)[(size_t)v] != 0; };

  std::vector<int> home((size_t)n, -1);
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    for (int v : classes[ci]) {
      if (v < 0 || v >= n) fail(Err::OutOfDomain, "class member " + std::to_string(v));
      if (!is_alive(v)) fail(Err::NotAProperColoring, "class contains an excluded node");
      if (home[(size_t)v] >= 0) fail(Err::NotAProperColoring, "node in two classes");
      home[(size_t)v] = (int)ci;
    }
  }
  std::vector<std::vector<int>> adj((size_t)n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) fail(Err::OutOfDomain, "edge endpoint out of range");
    if (!is_alive(u) || !is_alive(v)) continue;
    if (home[(size_t)u] < 0 || home[(size_t)v] < 0)
      fail(Err::NotAProperColoring, "node missing from every class");
    if (home[(size_t)u] == home[(size_t)v])
      fail(Err::NotAProperColoring, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                        ") inside one class");
    adj[(size_t)u].push_back(v);
    adj[(size_t)v].push_back(u);
  }
  for (int v = 0; v < n; ++v) {
    if (is_alive(v) && home[(size_t)v] < 0)
      fail(Err::NotAProperColoring, "node " + std::to_string(v) + " missing from every class");
  }

  MisResult out;
  std::vector<char> decided((size_t)n, 0);
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    std::vector<int> live;
    for (int v : classes[ci]) {
      if (!decided[(size_t)v]) live.push_back(v);
    }
    if (live.empty()) continue;
    out.iterations += 1;
    if (out.iterations > (int)classes.size())
      fail(Err::Internal, "class sweep exceeded the class count");
    for (int v : live) {
      out.nodes.push_back(v);
      decided[(size_t)v] = 1;
      for (int w : adj[(size_t)v]) decided[(size_t)w] = 1;
    }
  }
  std::sort(out.nodes.begin(), out.nodes.end());
  return out;
}

// Proper coloring with delta+1 colors under batch updates, for graphs whose
// degree never exceeds delta (violating batches are rejected whole). A batch
// first gives the touched nodes fresh colors above the working palette, by
// first-fit on the touched subgraph; old and fresh palettes are disjoint, so
// the combined coloring is proper. The combined classes then feed repeated
// set extraction: each extracted set gets the next final color, and a node
// can be skipped at most once per neighbour, so delta+1 sweeps always
// suffice. Sweep count and touched-node count are reported as blocks.
class ColoringMaintainer {
 public:
  ColoringMaintainer(int n, int delta)
      : n_(n), delta_(delta), adj_((size_t)n), col_((size_t)n, 1) {
    if (n < 1) fail(Err::OutOfDomain, "need at least one node");
    if (delta < 0) fail(Err::OutOfDomain, "negative degree bound");
  }

  int n() const { return n_; }
  int delta() const { return delta_; }

  bool has_edge(int u, int v) const {
    check_pair(u, v);
    return adj_[(size_t)u].count(v) != 0;
  }
  int color_of(int v) const {
    check_node(v);
    return col_[(size_t)v];
  }
  const std::vector<int>& coloring() const { return col_; }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u) {
      for (int v : adj_[(size_t)u]) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  void apply(const std::vector<std::pair<int, int>>& del_edges,
             const std::vector<std::pair<int, int>>& ins_edges, RoundMeter& meter) {
    std::vector<std::set<int>> next = adj_;
    for (auto [u, v] : del_edges) {
      check_pair(u, v);
      if (!next[(size_t)u].count(v))
        fail(Err::NotPresentOnDelete, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                          ") not present");
      next[(size_t)u].erase(v);
      next[(size_t)v].erase(u);
    }
    for (auto [u, v] : ins_edges) {
      check_pair(u, v);
      if (next[(size_t)u].count(v))
        fail(Err::AlreadyPresentOnInsert, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                              ") already present");
      next[(size_t)u].insert(v);
      next[(size_t)v].insert(u);
    }
    for (int v = 0; v < n_; ++v) {
      if ((int)next[(size_t)v].size() > delta_)
        fail(Err::DegreeBoundViolated, "node " + std::to_string(v) + " would have degree " +
                                           std::to_string(next[(size_t)v].size()));
    }

    meter.reset(1);
    meter.rounds_used = 1;
    std::set<int> touched;
    for (auto [u, v] : del_edges) {
      touched.insert(u);
      touched.insert(v);
    }
    for (auto [u, v] : ins_edges) {
      touched.insert(u);
      touched.insert(v);
    }
    adj_ = std::move(next);
    if (touched.empty()) return;

    // fresh first-fit colors for the touched nodes, palette starting past
    // every final color; first-fit against touched neighbours only, since
    // untouched neighbours live in the old palette
    std::vector<int> composed = col_;
    for (int a : touched) {
      std::set<int> used;
      for (int w : adj_[(size_t)a]) {
        if (touched.count(w) && composed[(size_t)w] > delta_ + 1) used.insert(composed[(size_t)w]);
      }
      int c = delta_ + 2;
      while (used.count(c)) ++c;
      composed[(size_t)a] = c;
    }

    // combined classes, one per possible composed color
    int k = 2 * delta_ + 2;
    std::vector<std::pair<int, int>> edge_list = edges();
    std::vector<char> alive((size_t)n_, 1);
    std::vector<int> final_col((size_t)n_, 0);
    int sweeps = 0;
    int remaining = n_;
    while (remaining > 0) {
      sweeps += 1;
      if (sweeps > delta_ + 1) fail(Err::Internal, "set extraction exceeded delta+1 sweeps");
      std::vector<std::vector<int>> classes((size_t)k);
      for (int v = 0; v < n_; ++v) {
        if (alive[(size_t)v]) classes[(size_t)(composed[(size_t)v] - 1)].push_back(v);
      }
      MisResult mis = mis_from_coloring(n_, edge_list, classes, &alive);
      for (int v : mis.nodes) {
        final_col[(size_t)v] = sweeps;
        alive[(size_t)v] = 0;
      }
      remaining -= (int)mis.nodes.size();
    }
    col_ = std::move(final_col);
    assert_proper();

    meter.block("fresh-coloring", touched.size());
    meter.block("mis-extraction", (uint64_t)sweeps);
  }

 private:
  void check_node(int v) const {
    if (v < 0 || v >= n_)
      fail(Err::OutOfDomain, "node " + std::to_string(v) + " outside [0," + std::to_string(n_) + ")");
  }
  void check_pair(int u, int v) const {
    check_node(u);
    check_node(v);
    if (u == v) fail(Err::OutOfDomain, "self-loop at node " + std::to_string(u));
  }

  void assert_proper() const {
    for (int v = 0; v < n_; ++v) {
      if (col_[(size_t)v] < 1 || col_[(size_t)v] > delta_ + 1)
        fail(Err::Internal, "color of node " + std::to_string(v) + " outside the palette");
      for (int w : adj_[(size_t)v]) {
        if (col_[(size_t)v] == col_[(size_t)w])
          fail(Err::Internal, "edge (" + std::to_string(v) + "," + std::to_string(w) +
                                  ") ended monochromatic");
      }
    }
  }

  int n_;
  int delta_;
  std::vector<std::set<int>> adj_;
  std::vector<int> col_;
};

}  // namespace dynq

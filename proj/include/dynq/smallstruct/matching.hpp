#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"

namespace dynq {

// Maximal matching under batch updates. Inserts are settled by a greedy
// matching on the unmatched endpoints of the new edges. Deletes that hit
// matching edges are repaired locally: each newly unmatched node offers its
// first few unmatched neighbours in node order, and a greedy matching on the
// offered subgraph restores maximality. Both solves are reported as
// "small-structure" blocks sized by the subgraph they ran on, and maximality
// is re-checked after every batch.
class MatchingMaintainer {
 public:
  explicit MatchingMaintainer(int n) : n_(n), adj_((size_t)n), partner_((size_t)n, -1) {
    if (n < 1) fail(Err::OutOfDomain, "need at least one node");
  }

  int n() const { return n_; }
  bool has_edge(int u, int v) const {
    check_pair(u, v);
    return adj_[(size_t)u].count(v) != 0;
  }
  int partner_of(int v) const {
    check_node(v);
    return partner_[(size_t)v];
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u) {
      for (int v : adj_[(size_t)u]) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  std::vector<std::pair<int, int>> matching() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u) {
      if (partner_[(size_t)u] > u) out.push_back({u, partner_[(size_t)u]});
    }
    return out;
  }

  // Deletions are settled before insertions. Edges absent on delete and
  // present on insert are tolerated as no-ops; the matching is repaired
  // either way and re-verified.
  void apply(const std::vector<std::pair<int, int>>& del_edges,
             const std::vector<std::pair<int, int>>& ins_edges, RoundMeter& meter) {
    meter.reset(1);
    meter.rounds_used = 1;
    if (!del_edges.empty()) delete_phase(del_edges, meter);
    if (!ins_edges.empty()) insert_phase(ins_edges, meter);
    assert_maximal();
  }

  void delete_edges(const std::vector<std::pair<int, int>>& del_edges, RoundMeter& meter) {
    apply(del_edges, {}, meter);
  }
  void insert_edges(const std::vector<std::pair<int, int>>& ins_edges, RoundMeter& meter) {
    apply({}, ins_edges, meter);
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

  void delete_phase(const std::vector<std::pair<int, int>>& del_edges, RoundMeter& meter) {
    std::set<int> newly_single;
    for (auto [u, v] : del_edges) {
      check_pair(u, v);
      if (!adj_[(size_t)u].count(v)) continue;
      adj_[(size_t)u].erase(v);
      adj_[(size_t)v].erase(u);
      if (partner_[(size_t)u] == v) {
        partner_[(size_t)u] = -1;
        partner_[(size_t)v] = -1;
        newly_single.insert(u);
        newly_single.insert(v);
      }
    }
    if (newly_single.empty()) return;

    // Offer cap: a node the repair leaves single has every offered
    // neighbour consumed by repair edges. Two nodes that were already
    // unmatched before the batch are never adjacent, so every repair edge
    // has an endpoint among the newly single nodes, and at most
    // 2(|newly_single|-1) offers can be consumed while the node itself
    // stays out. Offering one more than that keeps one neighbour free,
    // which the greedy pass below would have taken.
    size_t cap = 2 * newly_single.size() - 1;
    std::set<int> pool = newly_single;
    for (int v : newly_single) {
      size_t offered = 0;
      for (int w : adj_[(size_t)v]) {
        if (partner_[(size_t)w] >= 0) continue;
        pool.insert(w);
        if (++offered == cap) break;
      }
    }
    greedy_match(pool);
    meter.block("small-structure", pool.size());
  }

  void insert_phase(const std::vector<std::pair<int, int>>& ins_edges, RoundMeter& meter) {
    std::set<int> fresh_single;
    for (auto [u, v] : ins_edges) {
      check_pair(u, v);
      adj_[(size_t)u].insert(v);
      adj_[(size_t)v].insert(u);
      if (partner_[(size_t)u] < 0) fresh_single.insert(u);
      if (partner_[(size_t)v] < 0) fresh_single.insert(v);
    }
    if (fresh_single.empty()) return;
    greedy_match(fresh_single);
    meter.block("small-structure", fresh_single.size());
  }

  // greedy maximal matching of the subgraph induced on `pool`, nodes
  // ascending, each matched to its smallest unmatched poolmate
  void greedy_match(const std::set<int>& pool) {
    for (int u : pool) {
      if (partner_[(size_t)u] >= 0) continue;
      for (int w : adj_[(size_t)u]) {
        if (partner_[(size_t)w] >= 0 || !pool.count(w)) continue;
        partner_[(size_t)u] = w;
        partner_[(size_t)w] = u;
        break;
      }
    }
  }

  void assert_maximal() const {
    for (int u = 0; u < n_; ++u) {
      int p = partner_[(size_t)u];
      if (p >= 0 && partner_[(size_t)p] != u) fail(Err::Internal, "partner table asymmetric");
      if (p >= 0 && !adj_[(size_t)u].count(p)) fail(Err::Internal, "matched pair lost its edge");
      if (p >= 0) continue;
      for (int w : adj_[(size_t)u]) {
        if (partner_[(size_t)w] < 0)
          fail(Err::Internal, "matching not maximal at edge (" + std::to_string(u) + "," +
                                  std::to_string(w) + ")");
      }
    }
  }

  int n_;
  std::vector<std::set<int>> adj_;
  std::vector<int> partner_;
};

}  // namespace dynq

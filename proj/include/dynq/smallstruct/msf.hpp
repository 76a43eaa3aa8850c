#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"

namespace dynq {

// Weighted undirected edge with endpoints normalized u < v. The (w, u, v)
// key is distinct for distinct edges, so sorting by it is a total order and
// the minimum spanning forest below is unique.
struct WeightedEdge {
  int u = 0, v = 0;
  int64_t w = 0;

  bool operator<(const WeightedEdge& o) const {
    if (w != o.w) return w < o.w;
    if (u != o.u) return u < o.u;
    return v < o.v;
  }
  bool operator==(const WeightedEdge& o) const = default;
};

// Minimum spanning forest under batch updates. The maintained object is the
// edge list L kept sorted by (w, u, v), positions 1..|E|; an edge belongs to
// the forest exactly when its endpoints are in different components of the
// graph formed by the edges before it in L. A batch shifts positions by
// offsets determined inside the changed set: each changed edge costs one
// position probe into L, and order comparisons stay within the batch. The
// probe count is reported as the "offset-count" block; the per-batch sweep
// that re-derives the forest markers is the "msf-sweep" block.
class MsfMaintainer {
 public:
  explicit MsfMaintainer(int n) : n_(n) {
    if (n < 1) fail(Err::OutOfDomain, "need at least one node");
  }

  int n() const { return n_; }
  size_t edge_count() const { return list_.size(); }

  bool has_edge(int u, int v) const { return by_ends_.count(norm_checked(u, v)) != 0; }

  int64_t weight_of(int u, int v) const {
    auto it = by_ends_.find(norm_checked(u, v));
    if (it == by_ends_.end()) fail(Err::UnknownEdgeOnDelete, edge_name(u, v) + " not present");
    return it->second;
  }

  // 1-based position of the edge in the sorted list
  int position_of(int u, int v) const {
    WeightedEdge e = stored(u, v);
    auto it = std::lower_bound(list_.begin(), list_.end(), e);
    return (int)(it - list_.begin()) + 1;
  }

  const std::vector<WeightedEdge>& edge_list() const { return list_; }

  std::vector<WeightedEdge> forest() const {
    std::vector<WeightedEdge> out;
    for (size_t i = 0; i < list_.size(); ++i) {
      if (in_forest_[i]) out.push_back(list_[i]);
    }
    return out;
  }

  int64_t forest_weight() const {
    int64_t total = 0;
    for (size_t i = 0; i < list_.size(); ++i) {
      if (in_forest_[i]) total += list_[i].w;
    }
    return total;
  }

  // Deletes are keyed by endpoints (the stored weight is looked up); inserts
  // carry their weight. Deletes validate against the current edge set and
  // inserts against the post-delete set, so one batch may replace an edge's
  // weight by deleting and reinserting it.
  void apply(const std::vector<std::pair<int, int>>& del_edges,
             const std::vector<WeightedEdge>& ins_edges, RoundMeter& meter) {
    std::map<std::pair<int, int>, int64_t> ends = by_ends_;
    std::vector<WeightedEdge> dels;
    dels.reserve(del_edges.size());
    for (auto [a, b] : del_edges) {
      auto key = norm_checked(a, b);
      auto it = ends.find(key);
      if (it == ends.end()) fail(Err::UnknownEdgeOnDelete, edge_name(a, b) + " not present");
      dels.push_back({key.first, key.second, it->second});
      ends.erase(it);
    }
    std::vector<WeightedEdge> inss;
    inss.reserve(ins_edges.size());
    for (const auto& e : ins_edges) {
      auto key = norm_checked(e.u, e.v);
      if (ends.count(key)) fail(Err::DuplicateEdge, edge_name(e.u, e.v) + " already present");
      ends.emplace(key, e.w);
      inss.push_back({key.first, key.second, e.w});
    }

    meter.reset(1);
    meter.rounds_used = 1;
    uint64_t m = dels.size() + inss.size();
    if (m == 0) return;

    // locate every changed edge in the sorted list, one probe each; the
    // relative order of the changes themselves is settled by sorting the
    // batch, which compares only changed tuples
    std::sort(dels.begin(), dels.end());
    std::sort(inss.begin(), inss.end());
    uint64_t probes = 0;

    std::vector<char> gone(list_.size(), 0);
    for (const auto& e : dels) {
      auto it = std::lower_bound(list_.begin(), list_.end(), e);
      ++probes;
      gone[(size_t)(it - list_.begin())] = 1;
    }
    std::vector<WeightedEdge> next;
    next.reserve(list_.size() - dels.size() + inss.size());
    for (size_t i = 0; i < list_.size(); ++i) {
      if (!gone[i]) next.push_back(list_[i]);
    }
    for (const auto& e : inss) {
      auto it = std::lower_bound(next.begin(), next.end(), e);
      ++probes;
      next.insert(it, e);
    }
    meter.block("offset-count", m + probes);

    list_ = std::move(next);
    by_ends_ = std::move(ends);
    resweep();
    meter.block("msf-sweep", list_.size());
  }

 private:
  // plain union-find for the forest sweep
  struct Dsu {
    std::vector<int> up;
    explicit Dsu(int n) : up((size_t)n) { std::iota(up.begin(), up.end(), 0); }
    int find(int x) {
      while (up[(size_t)x] != x) {
        up[(size_t)x] = up[(size_t)up[(size_t)x]];
        x = up[(size_t)x];
      }
      return x;
    }
    bool unite(int a, int b) {
      a = find(a);
      b = find(b);
      if (a == b) return false;
      up[(size_t)a] = b;
      return true;
    }
  };

  static std::string edge_name(int u, int v) {
    return "edge (" + std::to_string(u) + "," + std::to_string(v) + ")";
  }

  std::pair<int, int> norm_checked(int u, int v) const {
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
      fail(Err::OutOfDomain, edge_name(u, v) + " outside [0," + std::to_string(n_) + ")");
    if (u == v) fail(Err::OutOfDomain, "self-loop at node " + std::to_string(u));
    return u < v ? std::pair<int, int>{u, v} : std::pair<int, int>{v, u};
  }

  WeightedEdge stored(int u, int v) const {
    auto key = norm_checked(u, v);
    auto it = by_ends_.find(key);
    if (it == by_ends_.end()) fail(Err::UnknownEdgeOnDelete, edge_name(u, v) + " not present");
    return {key.first, key.second, it->second};
  }

  // an edge is in the forest exactly when it joins two components of the
  // prefix before it; one ascending union-find pass decides every marker
  void resweep() {
    in_forest_.assign(list_.size(), 0);
    Dsu dsu(n_);
    for (size_t i = 0; i < list_.size(); ++i) {
      if (dsu.unite(list_[i].u, list_[i].v)) in_forest_[i] = 1;
    }
  }

  int n_;
  std::vector<WeightedEdge> list_;
  std::vector<char> in_forest_;
  std::map<std::pair<int, int>, int64_t> by_ends_;
};

}  // namespace dynq

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "dynq/common.hpp"

namespace dynq::oracle {

// Reference graph answers. Everything here recomputes from scratch on the
// plain edge list; nothing peeks at maintainer state.

constexpr int kUnreachable = -1;

struct EdgeList {
  int n = 0;
  bool directed = false;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      if (!directed) adj[v].push_back(u);
    }
    return adj;
  }
};

// hop distances from every source; kUnreachable where no path exists
inline std::vector<std::vector<int>> bfs_all_pairs(const EdgeList& g) {
  auto adj = g.adjacency();
  std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, kUnreachable));
  for (int s = 0; s < g.n; ++s) {
    auto& row = d[s];
    row[s] = 0;
    std::deque<int> q{s};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v : adj[u]) {
        if (row[v] == kUnreachable) {
          row[v] = row[u] + 1;
          q.push_back(v);
        }
      }
    }
  }
  return d;
}

// same table via a different algorithm; used to cross-check bfs_all_pairs
inline std::vector<std::vector<int>> floyd_warshall(const EdgeList& g) {
  const int64_t inf = INT64_MAX / 4;
  std::vector<std::vector<int64_t>> d(g.n, std::vector<int64_t>(g.n, inf));
  for (int i = 0; i < g.n; ++i) d[i][i] = 0;
  for (auto [u, v] : g.edges) {
    d[u][v] = std::min<int64_t>(d[u][v], 1);
    if (!g.directed) d[v][u] = std::min<int64_t>(d[v][u], 1);
  }
  for (int k = 0; k < g.n; ++k)
    for (int i = 0; i < g.n; ++i) {
      if (d[i][k] >= inf) continue;
      for (int j = 0; j < g.n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  std::vector<std::vector<int>> out(g.n, std::vector<int>(g.n, kUnreachable));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (d[i][j] < inf) out[i][j] = (int)d[i][j];
  return out;
}

// reachability closure by DFS from every source (reach(s,s) always holds)
inline std::vector<Bits> dfs_reach_all(const EdgeList& g) {
  auto adj = g.adjacency();
  std::vector<Bits> reach(g.n, Bits((size_t)g.n));
  std::vector<int> stack;
  for (int s = 0; s < g.n; ++s) {
    stack.assign(1, s);
    reach[s].set((size_t)s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (reach[s].set_new((size_t)v)) stack.push_back(v);
      }
    }
  }
  return reach;
}

// Every shortest u->v path, as node sequences. Caller keeps n small; the
// count can grow exponentially, so `cap` aborts enumeration (returns empty)
// rather than blowing up.
inline std::vector<std::vector<int>> enumerate_shortest_paths(const EdgeList& g, int u, int v,
                                                              size_t cap = 200000) {
  auto dist = bfs_all_pairs(g);
  std::vector<std::vector<int>> paths;
  if (dist[u][v] == kUnreachable) return paths;
  auto adj = g.adjacency();
  std::vector<int> cur{u};
  // DFS over the shortest-path DAG: step u->w is tight iff d(u,v) = 1 + d(w,v)
  auto rec = [&](auto&& self, int x) -> bool {
    if (x == v) {
      paths.push_back(cur);
      return paths.size() <= cap;
    }
    for (int w : adj[x]) {
      if (dist[x][v] == 1 + dist[w][v]) {
        cur.push_back(w);
        if (!self(self, w)) return false;
        cur.pop_back();
      }
    }
    return true;
  };
  if (!rec(rec, u)) return {};
  return paths;
}

// Does some shortest u->v path run through edge e? Decided by the exact
// distance identity rather than enumeration, so it stays cheap.
inline bool edge_on_some_shortest_path(const std::vector<std::vector<int>>& dist, int u, int v,
                                       std::pair<int, int> e, bool directed) {
  if (dist[u][v] == kUnreachable) return false;
  auto [a, b] = e;
  auto tight = [&](int x, int y) {
    return dist[u][x] != kUnreachable && dist[y][v] != kUnreachable &&
           dist[u][x] + 1 + dist[y][v] == dist[u][v];
  };
  if (tight(a, b)) return true;
  if (!directed && tight(b, a)) return true;
  return false;
}

}  // namespace dynq::oracle

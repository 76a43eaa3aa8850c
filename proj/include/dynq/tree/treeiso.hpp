#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"
#include "dynq/dist/distance.hpp"

namespace dynq {

namespace treedetail {

// Nodes fit in 6 bits (domain capped at 64), so a context key packs into 18
// bits and a pair of them into one uint64.
inline uint32_t key18(int a, int b, int c) {
  return ((uint32_t)a << 12) | ((uint32_t)b << 6) | (uint32_t)c;
}

inline uint32_t key12(int a, int b) { return ((uint32_t)a << 6) | (uint32_t)b; }

inline uint64_t pair_key(uint32_t a, uint32_t b) {
  if (a > b) std::swap(a, b);
  return ((uint64_t)a << 18) | b;
}

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace treedetail

// Batch-dynamic rooted-subtree isomorphism over a forest. Edges are oriented
// parent->child for bookkeeping; queries re-anchor the trees at arbitrary
// nodes. The maintained relations are
//   - a sparse set of isomorphic disjoint context pairs among contexts that
//     contain a node touched by the last batch,
//   - per-parent counts of isomorphic sibling subtrees,
//   - all-pairs hop distances (delegated to DistanceMaintainer),
// plus canonical code tables of the previous step, which answer queries about
// pairs the batch did not touch. A context (x, r, h) is the subtree of r in
// the tree anchored at x, with everything strictly below the hole node h
// removed; isomorphism must preserve both root and hole.
class TreeIsoMaintainer {
 public:
  explicit TreeIsoMaintainer(int n)
      : n_(n), parent_((size_t)std::max(n, 0), -1), adj_((size_t)std::max(n, 0), 0),
        dist_(std::max(n, 0), DistKind::Undirected) {
    if (n < 1 || n > 64) fail(Err::OutOfDomain, "node count must be in [1, 64]");
    refresh_epoch();
  }

  int n() const { return n_; }
  int parent_of(int v) const {
    check_node(v);
    return parent_[(size_t)v];
  }
  bool has_edge(int u, int v) const {
    check_node(u);
    check_node(v);
    return (adj_[(size_t)u] >> v) & 1u;
  }
  int64_t dist(int u, int v) const { return dist_.dist(u, v); }

  // Applies one batch of (parent, child) edge changes. Deletions must match
  // the stored orientation. The resulting edge set must again be a forest
  // with at most one parent per node. Distances are updated first, then the
  // context-pair relation is rebuilt for touched contexts: a first-order
  // base pass settles pairs with at most one touched node per side, and
  // combine rounds settle the rest by splitting at guessed node pairs.
  void apply(const std::vector<std::pair<int, int>>& del_edges,
             const std::vector<std::pair<int, int>>& ins_edges, RoundMeter& meter) {
    std::vector<int> tent_parent = parent_;
    std::vector<uint64_t> tent_adj = adj_;
    for (auto& [p, c] : del_edges) {
      check_node(p);
      check_node(c);
      if (p == c) fail(Err::OutOfDomain, "self loop");
      if (tent_parent[(size_t)c] != p)
        fail(Err::NotPresentOnDelete,
             "no edge " + std::to_string(p) + "->" + std::to_string(c));
      tent_parent[(size_t)c] = -1;
      tent_adj[(size_t)p] &= ~(1ull << c);
      tent_adj[(size_t)c] &= ~(1ull << p);
    }
    for (auto& [p, c] : ins_edges) {
      check_node(p);
      check_node(c);
      if (p == c) fail(Err::OutOfDomain, "self loop");
      if ((tent_adj[(size_t)p] >> c) & 1u)
        fail(Err::AlreadyPresentOnInsert,
             "edge " + std::to_string(p) + "-" + std::to_string(c) + " present");
      if (tent_parent[(size_t)c] != -1)
        fail(Err::NotAForest, "node " + std::to_string(c) + " would have two parents");
      tent_parent[(size_t)c] = p;
      tent_adj[(size_t)p] |= 1ull << c;
      tent_adj[(size_t)c] |= 1ull << p;
    }
    assert_acyclic(tent_parent);

    std::vector<std::pair<int, int>> del_und(del_edges), ins_und(ins_edges);
    RoundMeter dist_meter;
    dist_.apply(del_und, ins_und, dist_meter);
    parent_ = std::move(tent_parent);
    adj_ = std::move(tent_adj);

    affected_ = 0;
    for (auto& [p, c] : del_edges) affected_ |= (1ull << p) | (1ull << c);
    for (auto& [p, c] : ins_edges) affected_ |= (1ull << p) | (1ull << c);
    int m = popcount(affected_);

    meter.reset(log_three_halves_bound((uint64_t)m));
    meter.block("dist-rounds", dist_meter.rounds_used);

    build_candidates();
    RoundState st;
    st.ciso = base_case();
    st.sibs = compute_sibs(st.ciso);
    meter.block("base-case");
    st = run_rounds(std::move(st), meter.bound, meter,
                    [&](const RoundState& prev) { return combine(prev); });

    ciso_.clear();
    ciso_.insert(st.ciso.begin(), st.ciso.end());
    sibs_ = std::move(st.sibs);
    refresh_epoch();
    base_memo_.clear();
    ctxs_.clear();
    base_cands_.clear();
    round_cands_.clear();
  }

  // Membership view of the context-pair relation: invalid or overlapping
  // pairs are never members; pairs containing a node touched by the last
  // batch are answered by the maintained sparse set, untouched pairs by the
  // canonical code tables.
  bool ciso_view(int x, int r, int h, int xs, int rs, int hs) const {
    validate_context(x, r, h);
    validate_context(xs, rs, hs);
    CtxLite a = make_ctx(anchor_dir(x, r), r, h);
    CtxLite b = make_ctx(anchor_dir(xs, rs), rs, hs);
    if (a.mask & b.mask) return false;
    if (a.aff + b.aff > 0) return ciso_.count(treedetail::pair_key(a.key, b.key)) > 0;
    return ctx_class_.at(a.key) == ctx_class_.at(b.key);
  }

  // Rooted-subtree isomorphism of subtree_x(r) and subtree_xs(rs). Singleton
  // subtrees are isomorphic outright; larger ones are isomorphic exactly
  // when some pair of leaf-holed contexts is in the context relation.
  bool t_iso(int x, int r, int xs, int rs) const {
    validate_anchored(x, r);
    validate_anchored(xs, rs);
    uint64_t ma = subtree_mask(anchor_dir(x, r), r);
    uint64_t mb = subtree_mask(anchor_dir(xs, rs), rs);
    if (ma & mb) fail(Err::NotDisjoint, "subtrees share nodes");
    if (popcount(ma) != popcount(mb)) return false;
    if (popcount(ma) == 1) return true;
    std::vector<int> la = leaves_of(anchor_dir(x, r), r, ma);
    std::vector<int> lb = leaves_of(anchor_dir(xs, rs), rs, mb);
    for (int u : la) {
      for (int v : lb) {
        if (dist_at(r, u) != dist_at(rs, v)) continue;
        if (ciso_view(x, r, u, xs, rs, v)) return true;
      }
    }
    return false;
  }

  // Number of siblings of y inside subtree_x(r) whose subtrees are
  // isomorphic to y's own (y itself not counted).
  int iso_sibling_count(int x, int r, int y) const {
    validate_anchored(x, r);
    check_node(y);
    uint64_t m = subtree_mask(anchor_dir(x, r), r);
    if (!((m >> y) & 1u)) fail(Err::InvalidContext, "node outside the subtree");
    if (y == r) return 0;
    int q = toward(y, x == y ? r : x);
    int updir = (q == x) ? q : toward(q, x);
    return sibs_.at(treedetail::key18(updir, q, y));
  }

  // Touched-node count of a context pair for an explicit change set, holes
  // excluded. Exposed so tests can pin the counting rule.
  int count_affected(int x, int r, int h, int xs, int rs, int hs,
                     const std::vector<std::pair<int, int>>& delta) const {
    validate_context(x, r, h);
    validate_context(xs, rs, hs);
    uint64_t touched = 0;
    for (auto& [u, v] : delta) {
      check_node(u);
      check_node(v);
      touched |= (1ull << u) | (1ull << v);
    }
    CtxLite a = make_ctx(anchor_dir(x, r), r, h);
    CtxLite b = make_ctx(anchor_dir(xs, rs), rs, hs);
    return popcount(a.nonhole & touched) + popcount(b.nonhole & touched);
  }

  bool valid_context(int x, int r, int h) const {
    if (x < 0 || x >= n_ || r < 0 || r >= n_ || h < 0 || h >= n_) return false;
    uint16_t xr = dist_at(x, r), rh = dist_at(r, h), xh = dist_at(x, h);
    if (xr == DistTable::kInf || rh == DistTable::kInf) return false;
    return (uint32_t)xr + rh == xh;
  }

 private:
  struct CtxLite {
    uint32_t key = 0;
    int ad = 0, r = 0, h = 0;
    uint64_t mask = 0;     // context nodes, hole included
    uint64_t nonhole = 0;  // context nodes, hole excluded
    int aff = 0;           // touched non-hole nodes
  };

  struct CtxFull {
    CtxLite c;
    uint64_t sig = 0;
    int size = 0;
  };

  struct CandPair {
    int i = 0, j = 0;
    uint64_t key = 0;
  };

  struct RoundState {
    std::set<uint64_t> ciso;
    std::map<uint32_t, int> sibs;
    bool operator==(const RoundState& o) const = default;
  };

  static int popcount(uint64_t m) { return __builtin_popcountll(m); }

  void check_node(int v) const {
    if (v < 0 || v >= n_) fail(Err::OutOfDomain, "node " + std::to_string(v));
  }

  void assert_acyclic(const std::vector<int>& par) const {
    std::vector<int> dsu((size_t)n_);
    for (int i = 0; i < n_; ++i) dsu[(size_t)i] = i;
    auto find = [&](int v) {
      while (dsu[(size_t)v] != v) v = dsu[(size_t)v] = dsu[(size_t)dsu[(size_t)v]];
      return v;
    };
    for (int c = 0; c < n_; ++c) {
      int p = par[(size_t)c];
      if (p < 0) continue;
      int a = find(p), b = find(c);
      if (a == b) fail(Err::NotAForest, "cycle through node " + std::to_string(c));
      dsu[(size_t)a] = b;
    }
  }

  uint16_t dist_at(int u, int v) const { return dist_.table().at(u, v); }

  bool connected(int u, int v) const { return dist_at(u, v) != DistTable::kInf; }

  bool onp(int a, int mid, int b) const {
    uint16_t am = dist_at(a, mid), mb = dist_at(mid, b), ab = dist_at(a, b);
    if (am == DistTable::kInf || mb == DistTable::kInf) return false;
    return (uint32_t)am + mb == ab;
  }

  // Neighbor of u on the path toward t; u must differ from t and see it.
  int toward(int u, int t) const {
    uint64_t nb = adj_[(size_t)u];
    uint16_t du = dist_at(u, t);
    while (nb) {
      int v = __builtin_ctzll(nb);
      nb &= nb - 1;
      if (dist_at(v, t) + 1 == du) return v;
    }
    fail(Err::Internal, "no neighbor toward target");
  }

  // Anchor direction of subtree_x(r): the neighbor of r toward x, or r
  // itself when the whole tree hangs from r.
  int anchor_dir(int x, int r) const { return x == r ? r : toward(r, x); }

  uint64_t subtree_mask(int ad, int r) const {
    uint64_t m = 0;
    uint16_t inf = DistTable::kInf;
    for (int v = 0; v < n_; ++v) {
      uint16_t vr = dist_at(v, r);
      if (vr == inf) continue;
      if (ad == r || dist_at(v, ad) == vr + 1) m |= 1ull << v;
    }
    return m;
  }

  uint64_t ctx_mask_of(int ad, int r, int h) const {
    uint64_t sub = subtree_mask(ad, r);
    if (h == r) return 1ull << r;
    uint64_t below = subtree_mask(toward(h, r), h);
    return (sub & ~below) | (1ull << h);
  }

  CtxLite make_ctx(int ad, int r, int h) const {
    CtxLite c;
    c.ad = ad;
    c.r = r;
    c.h = h;
    c.key = treedetail::key18(ad, r, h);
    c.mask = ctx_mask_of(ad, r, h);
    c.nonhole = c.mask & ~(1ull << h);
    c.aff = popcount(c.nonhole & affected_);
    return c;
  }

  void validate_anchored(int x, int r) const {
    check_node(x);
    check_node(r);
    if (!connected(x, r)) fail(Err::InvalidContext, "anchor cannot see root");
  }

  void validate_context(int x, int r, int h) const {
    check_node(x);
    check_node(h);
    validate_anchored(x, r);
    if (!valid_context(x, r, h)) fail(Err::InvalidContext, "hole not under root");
  }

  // Parent of v inside the context (the blocked direction for r).
  int ctx_parent(const CtxLite& c, int v) const {
    if (v == c.r) return c.ad == c.r ? -1 : c.ad;
    return toward(v, c.r);
  }

  std::vector<int> ctx_kids(const CtxLite& c, int v) const {
    std::vector<int> out;
    int par = ctx_parent(c, v);
    uint64_t nb = adj_[(size_t)v] & c.mask;
    if (par >= 0) nb &= ~(1ull << par);
    while (nb) {
      out.push_back(__builtin_ctzll(nb));
      nb &= nb - 1;
    }
    return out;
  }

  // Subtree of v restricted to the context (still contains the hole when v
  // sits on the root-hole spine).
  uint64_t ctx_submask(const CtxLite& c, int v) const {
    if (v == c.r) return c.mask;
    return subtree_mask(toward(v, c.r), v) & c.mask;
  }

  std::vector<int> leaves_of(int ad, int r, uint64_t mask) const {
    std::vector<int> out;
    uint64_t m = mask;
    while (m) {
      int v = __builtin_ctzll(m);
      m &= m - 1;
      uint64_t kids = adj_[(size_t)v] & mask;
      if (v == r) {
        if (ad != r) kids &= ~(1ull << ad);
      } else {
        kids &= ~(1ull << toward(v, r));
      }
      if (kids == 0) out.push_back(v);
    }
    return out;
  }

  // ---- epoch code tables -------------------------------------------------

  // Rebuilds the interned canonical codes of every subtree and context of
  // the current forest. Child code lists are sorted and interned to small
  // integers; the hole carries the reserved id 0, so equal ids mean
  // isomorphic (root- and hole-preserving for contexts).
  void refresh_epoch() {
    ctx_class_.clear();
    sub_class_.clear();
    std::map<std::vector<int>, int> dict;
    int next_id = 1;
    auto intern = [&](std::vector<int> kids) {
      std::sort(kids.begin(), kids.end());
      auto it = dict.find(kids);
      if (it != dict.end()) return it->second;
      dict.emplace(std::move(kids), next_id);
      return next_id++;
    };

    for (int r = 0; r < n_; ++r) {
      std::vector<int> anchors{r};
      uint64_t nb = adj_[(size_t)r];
      while (nb) {
        anchors.push_back(__builtin_ctzll(nb));
        nb &= nb - 1;
      }
      for (int ad : anchors) {
        uint64_t piece = subtree_mask(ad, r);
        // post-order over the piece
        std::vector<int> order, stack{r};
        std::vector<int> par((size_t)n_, -1);
        if (ad != r) par[(size_t)r] = ad;
        while (!stack.empty()) {
          int u = stack.back();
          stack.pop_back();
          order.push_back(u);
          uint64_t kids = adj_[(size_t)u] & piece;
          if (par[(size_t)u] >= 0) kids &= ~(1ull << par[(size_t)u]);
          while (kids) {
            int v = __builtin_ctzll(kids);
            kids &= kids - 1;
            par[(size_t)v] = u;
            stack.push_back(v);
          }
        }
        std::vector<int> code((size_t)n_, 0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
          int u = *it;
          std::vector<int> kid_codes;
          uint64_t kids = adj_[(size_t)u] & piece;
          if (par[(size_t)u] >= 0) kids &= ~(1ull << par[(size_t)u]);
          while (kids) {
            int v = __builtin_ctzll(kids);
            kids &= kids - 1;
            kid_codes.push_back(code[(size_t)v]);
          }
          code[(size_t)u] = intern(std::move(kid_codes));
        }
        sub_class_[treedetail::key12(ad, r)] = code[(size_t)r];

        uint64_t holes = piece;
        while (holes) {
          int h = __builtin_ctzll(holes);
          holes &= holes - 1;
          int cid = 0;  // reserved hole id
          int v = h;
          while (v != r) {
            int p = par[(size_t)v];
            std::vector<int> kid_codes{cid};
            uint64_t kids = adj_[(size_t)p] & piece;
            if (par[(size_t)p] >= 0) kids &= ~(1ull << par[(size_t)p]);
            kids &= ~(1ull << v);
            while (kids) {
              int w = __builtin_ctzll(kids);
              kids &= kids - 1;
              kid_codes.push_back(code[(size_t)w]);
            }
            cid = intern(std::move(kid_codes));
            v = p;
          }
          ctx_class_[treedetail::key18(ad, r, h)] = cid;
        }
      }
    }
  }

  int old_ctx_class(uint32_t key) const {
    auto it = ctx_class_.find(key);
    if (it == ctx_class_.end()) fail(Err::Internal, "untouched context missing a code");
    return it->second;
  }

  int old_sub_class(int ad, int r) const {
    auto it = sub_class_.find(treedetail::key12(ad, r));
    if (it == sub_class_.end()) fail(Err::Internal, "untouched subtree missing a code");
    return it->second;
  }

  // ---- candidate enumeration ----------------------------------------------

  // An isomorphism-invariant fingerprint used only to skip pairs that cannot
  // possibly match; colliding fingerprints just cost a failed split search.
  uint64_t ctx_sig(const CtxLite& c) const {
    uint64_t acc = 0;
    uint64_t m = c.mask;
    while (m) {
      int v = __builtin_ctzll(m);
      m &= m - 1;
      int depth = dist_at(c.r, v);
      int kidc = (int)ctx_kids(c, v).size();
      int hole = v == c.h ? 1 : 0;
      acc += treedetail::mix64(((uint64_t)depth << 20) | ((uint64_t)kidc << 4) | (uint64_t)hole);
    }
    return treedetail::mix64(acc ^ ((uint64_t)popcount(c.mask) << 32) ^
                             (uint64_t)dist_at(c.r, c.h));
  }

  void build_candidates() {
    ctxs_.clear();
    base_cands_.clear();
    round_cands_.clear();
    for (int r = 0; r < n_; ++r) {
      std::vector<int> anchors{r};
      uint64_t nb = adj_[(size_t)r];
      while (nb) {
        anchors.push_back(__builtin_ctzll(nb));
        nb &= nb - 1;
      }
      for (int ad : anchors) {
        uint64_t piece = subtree_mask(ad, r);
        uint64_t holes = piece;
        while (holes) {
          int h = __builtin_ctzll(holes);
          holes &= holes - 1;
          CtxFull f;
          f.c = make_ctx(ad, r, h);
          f.size = popcount(f.c.mask);
          f.sig = ctx_sig(f.c);
          ctxs_.push_back(std::move(f));
        }
      }
    }
    std::unordered_map<uint64_t, std::vector<int>> buckets;
    for (int i = 0; i < (int)ctxs_.size(); ++i) buckets[ctxs_[(size_t)i].sig].push_back(i);
    for (auto& [sig, list] : buckets) {
      for (size_t a = 0; a < list.size(); ++a) {
        for (size_t b = a + 1; b < list.size(); ++b) {
          const CtxFull& ca = ctxs_[(size_t)list[a]];
          const CtxFull& cb = ctxs_[(size_t)list[b]];
          if (ca.c.mask & cb.c.mask) continue;
          if (ca.c.aff + cb.c.aff == 0) continue;
          CandPair p;
          p.i = list[a];
          p.j = list[b];
          p.key = treedetail::pair_key(ca.c.key, cb.c.key);
          if (ca.c.aff <= 1 && cb.c.aff <= 1)
            base_cands_.push_back(p);
          else
            round_cands_.push_back(p);
        }
      }
    }
  }

  // ---- base pass: at most one touched node per side -----------------------

  std::set<uint64_t> base_case() {
    std::set<uint64_t> out;
    for (const CandPair& p : base_cands_) {
      if (base_pair(ctxs_[(size_t)p.i].c, ctxs_[(size_t)p.j].c)) out.insert(p.key);
    }
    return out;
  }

  // Decides one pair with at most one touched node per side by splitting at
  // the touched node and a guessed image; every piece the split produces has
  // strictly fewer touched nodes, so lookups bottom out in code-table
  // comparisons after at most two levels.
  bool base_pair(const CtxLite& a0, const CtxLite& b0) {
    const CtxLite& A = a0.aff >= 1 ? a0 : b0;
    const CtxLite& B = a0.aff >= 1 ? b0 : a0;
    if (popcount(A.mask) != popcount(B.mask)) return false;
    if (dist_at(A.r, A.h) != dist_at(B.r, B.h)) return false;
    uint64_t am = A.nonhole & affected_;
    int a = __builtin_ctzll(am);
    bool a_on_spine = onp(A.r, a, A.h);
    int depth_a = dist_at(A.r, a);
    uint64_t cand = B.nonhole;
    while (cand) {
      int as = __builtin_ctzll(cand);
      cand &= cand - 1;
      if (dist_at(B.r, as) != depth_a) continue;
      if (onp(B.r, as, B.h) != a_on_spine) continue;
      bool ok = a_on_spine ? base_onspine(A, a, B, as) : base_offspine(A, a, B, as);
      if (ok) return true;
    }
    return false;
  }

  bool base_onspine(const CtxLite& A, int a, const CtxLite& B, int as) {
    int y = toward(a, A.h), ys = toward(as, B.h);
    if (!base_lookup(A.ad, A.r, a, B.ad, B.r, as)) return false;
    if (!base_lookup(a, y, A.h, as, ys, B.h)) return false;
    std::vector<int> za = ctx_kids(A, a), zb = ctx_kids(B, as);
    za.erase(std::remove(za.begin(), za.end(), y), za.end());
    zb.erase(std::remove(zb.begin(), zb.end(), ys), zb.end());
    return base_forests(a, za, as, zb);
  }

  bool base_offspine(const CtxLite& A, int a, const CtxLite& B, int as) {
    int z = lca3(A.r, a, A.h), zs = lca3(B.r, as, B.h);
    if (dist_at(A.r, z) != dist_at(B.r, zs)) return false;
    int y1 = toward(z, A.h), y2 = toward(z, a);
    int y1s = toward(zs, B.h), y2s = toward(zs, as);
    if (!base_lookup(A.ad, A.r, z, B.ad, B.r, zs)) return false;
    if (!base_lookup(z, y1, A.h, zs, y1s, B.h)) return false;
    if (!base_lookup(z, y2, a, zs, y2s, as)) return false;
    std::vector<int> za = ctx_kids(A, z), zb = ctx_kids(B, zs);
    za.erase(std::remove(za.begin(), za.end(), y1), za.end());
    za.erase(std::remove(za.begin(), za.end(), y2), za.end());
    zb.erase(std::remove(zb.begin(), zb.end(), y1s), zb.end());
    zb.erase(std::remove(zb.begin(), zb.end(), y2s), zb.end());
    if (!base_forests(z, za, zs, zb)) return false;
    return base_forests(a, ctx_kids(A, a), as, ctx_kids(B, as));
  }

  // Meeting point of the r-a and r-b root paths.
  int lca3(int r, int a, int b) const {
    uint32_t target = ((uint32_t)dist_at(r, a) + dist_at(r, b) - dist_at(a, b)) / 2;
    for (int v = 0; v < n_; ++v) {
      if (!connected(v, r) || dist_at(r, v) != target) continue;
      if (onp(r, v, a) && onp(r, v, b)) return v;
    }
    fail(Err::Internal, "paths without a meeting point");
  }

  // Context-pair fact source for the base pass: untouched pairs compare old
  // codes, pairs with one touched node recurse (memoized).
  bool base_lookup(int ad, int r, int h, int ads, int rs, int hs) {
    CtxLite a = make_ctx(ad, r, h);
    CtxLite b = make_ctx(ads, rs, hs);
    // Hole-only contexts are pairwise isomorphic and may sit on brand-new
    // anchors, so settle them before consulting the old code tables.
    if (a.nonhole == 0 || b.nonhole == 0) return a.nonhole == 0 && b.nonhole == 0;
    if (a.aff + b.aff == 0) return old_ctx_class(a.key) == old_ctx_class(b.key);
    uint64_t pk = treedetail::pair_key(a.key, b.key);
    auto it = base_memo_.find(pk);
    if (it != base_memo_.end()) return it->second != 0;
    base_memo_[pk] = 0;  // settled below; pieces shrink so no cycle is possible
    bool ok = base_pair(a, b);
    base_memo_[pk] = ok ? 1 : 0;
    return ok;
  }

  bool tiso_base(int q, int u, int qs, int us) {
    uint64_t mu = subtree_mask(q, u), mus = subtree_mask(qs, us);
    if (popcount(mu) != popcount(mus)) return false;
    if (popcount(mu) == 1) return true;
    bool cu = (mu & affected_) == 0, cus = (mus & affected_) == 0;
    if (cu && cus) return old_sub_class(q, u) == old_sub_class(qs, us);
    std::vector<int> la = leaves_of(q, u, mu), lb = leaves_of(qs, us, mus);
    for (int l1 : la) {
      for (int l2 : lb) {
        if (dist_at(u, l1) != dist_at(us, l2)) continue;
        if (base_lookup(q, u, l1, qs, us, l2)) return true;
      }
    }
    return false;
  }

  // Multiset comparison of child subtrees during the base pass. At most one
  // child per side can contain a touched node here; untouched children
  // compare by code class directly.
  bool base_forests(int q, std::vector<int> kids, int qs, std::vector<int> kids_s) {
    if (kids.size() != kids_s.size()) return false;
    std::vector<int> clean_a, clean_b, dirty_a, dirty_b;
    for (int u : kids) {
      if (subtree_mask(q, u) & affected_)
        dirty_a.push_back(u);
      else
        clean_a.push_back(old_sub_class(q, u));
    }
    for (int u : kids_s) {
      if (subtree_mask(qs, u) & affected_)
        dirty_b.push_back(u);
      else
        clean_b.push_back(old_sub_class(qs, u));
    }
    if (dirty_a.size() > 1 || dirty_b.size() > 1)
      fail(Err::Internal, "base pass saw two touched children on one side");
    if (dirty_a.size() == 1 && dirty_b.size() == 1) {
      if (!tiso_base(q, dirty_a[0], qs, dirty_b[0])) return false;
      std::sort(clean_a.begin(), clean_a.end());
      std::sort(clean_b.begin(), clean_b.end());
      return clean_a == clean_b;
    }
    if (dirty_a.size() != dirty_b.size()) {
      // one touched child must match an untouched one on the other side
      bool dirty_on_a = dirty_a.size() == 1;
      int d = dirty_on_a ? dirty_a[0] : dirty_b[0];
      std::vector<int>& clean_other = dirty_on_a ? clean_b : clean_a;
      std::vector<int>& clean_own = dirty_on_a ? clean_a : clean_b;
      std::vector<int>& other_kids = dirty_on_a ? kids_s : kids;
      int qd = dirty_on_a ? q : qs, qo = dirty_on_a ? qs : q;
      std::set<int> tried;
      for (int u : other_kids) {
        uint64_t m = subtree_mask(qo, u);
        if (m & affected_) continue;
        int cls = old_sub_class(qo, u);
        if (!tried.insert(cls).second) continue;
        if (!tiso_base(qd, d, qo, u)) continue;
        std::vector<int> rest = clean_other;
        rest.erase(std::find(rest.begin(), rest.end(), cls));
        std::vector<int> own = clean_own;
        std::sort(rest.begin(), rest.end());
        std::sort(own.begin(), own.end());
        if (rest == own) return true;
      }
      return false;
    }
    std::sort(clean_a.begin(), clean_a.end());
    std::sort(clean_b.begin(), clean_b.end());
    return clean_a == clean_b;
  }

  // ---- combine rounds ------------------------------------------------------

  RoundState combine(const RoundState& prev) {
    RoundState next = prev;
    std::unordered_map<uint64_t, int8_t> tiso_memo;
    for (const CandPair& p : round_cands_) {
      if (prev.ciso.count(p.key)) continue;
      if (round_pair(ctxs_[(size_t)p.i].c, ctxs_[(size_t)p.j].c, prev, tiso_memo))
        next.ciso.insert(p.key);
    }
    next.sibs = compute_sibs(next.ciso);
    return next;
  }

  // Tries to certify one pair from the previous round's facts by guessing a
  // split node on each side. A guess is usable only if the touched nodes
  // spread across the cut within the balance limits; that guarantees every
  // sub-lookup concerns a pair the previous round already settled.
  bool round_pair(const CtxLite& A, const CtxLite& B, const RoundState& prev,
                  std::unordered_map<uint64_t, int8_t>& memo) {
    if (popcount(A.mask) != popcount(B.mask)) return false;
    if (dist_at(A.r, A.h) != dist_at(B.r, B.h)) return false;
    int total = A.aff + B.aff;
    uint64_t za = A.nonhole;
    while (za) {
      int z = __builtin_ctzll(za);
      za &= za - 1;
      uint64_t sa = ctx_submask(A, z);
      int az = popcount(sa & affected_ & ~(1ull << A.h));
      bool spine = onp(A.r, z, A.h);
      int depth = dist_at(A.r, z);
      int size_a = popcount(sa);
      uint64_t zbm = B.nonhole;
      while (zbm) {
        int zs = __builtin_ctzll(zbm);
        zbm &= zbm - 1;
        if (dist_at(B.r, zs) != depth) continue;
        if (onp(B.r, zs, B.h) != spine) continue;
        uint64_t sb = ctx_submask(B, zs);
        if (popcount(sb) != size_a) continue;
        int bz = popcount(sb & affected_ & ~(1ull << B.h));
        int inside = az + bz;
        bool cond1 = 3 * inside <= 2 * total && 3 * (total - inside) <= 2 * total;
        bool cond2 = 3 * (total - inside) <= total && kids_within(A, z, total) &&
                     kids_within(B, zs, total);
        if (!cond1 && !cond2) continue;
        if (cond1 && (spine ? case_1a(A, z, B, zs, prev)
                            : case_1b(A, z, B, zs, prev, memo)))
          return true;
        if (cond2 && (spine ? case_2a(A, z, B, zs, prev, memo)
                            : case_2b(A, z, B, zs, prev, memo)))
          return true;
      }
    }
    return false;
  }

  bool kids_within(const CtxLite& C, int z, int total) const {
    for (int u : ctx_kids(C, z)) {
      uint64_t m = ctx_submask(C, u);
      if (3 * popcount(m & affected_ & ~(1ull << C.h)) > total) return false;
    }
    return true;
  }

  bool case_1a(const CtxLite& A, int z, const CtxLite& B, int zs, const RoundState& prev) {
    if (!prev_lookup(A.ad, A.r, z, B.ad, B.r, zs, prev)) return false;
    int ad2 = ctx_parent(A, z), ad2s = ctx_parent(B, zs);
    if (ad2 < 0) ad2 = z;
    if (ad2s < 0) ad2s = zs;
    return prev_lookup(ad2, z, A.h, ad2s, zs, B.h, prev);
  }

  bool case_1b(const CtxLite& A, int z, const CtxLite& B, int zs, const RoundState& prev,
               std::unordered_map<uint64_t, int8_t>& memo) {
    int v = lca3(A.r, z, A.h), vs = lca3(B.r, zs, B.h);
    if (dist_at(A.r, v) != dist_at(B.r, vs)) return false;
    int y1 = toward(v, A.h), y2 = toward(v, z);
    int y1s = toward(vs, B.h), y2s = toward(vs, zs);
    if (!prev_lookup(A.ad, A.r, v, B.ad, B.r, vs, prev)) return false;
    if (!prev_lookup(v, y1, A.h, vs, y1s, B.h, prev)) return false;
    if (!prev_lookup(v, y2, z, vs, y2s, zs, prev)) return false;
    int pz = ctx_parent(A, z), pzs = ctx_parent(B, zs);
    if (!tiso_prev(pz, z, pzs, zs, prev, memo)) return false;
    std::vector<int> ka = ctx_kids(A, v), kb = ctx_kids(B, vs);
    ka.erase(std::remove(ka.begin(), ka.end(), y1), ka.end());
    ka.erase(std::remove(ka.begin(), ka.end(), y2), ka.end());
    kb.erase(std::remove(kb.begin(), kb.end(), y1s), kb.end());
    kb.erase(std::remove(kb.begin(), kb.end(), y2s), kb.end());
    return forests_prev(A, v, ka, {y1, y2}, B, vs, kb, {y1s, y2s}, prev, memo);
  }

  bool case_2a(const CtxLite& A, int z, const CtxLite& B, int zs, const RoundState& prev,
               std::unordered_map<uint64_t, int8_t>& memo) {
    if (!prev_lookup(A.ad, A.r, z, B.ad, B.r, zs, prev)) return false;
    if (z == A.h || zs == B.h) return false;
    int y = toward(z, A.h), ys = toward(zs, B.h);
    if (!prev_lookup(z, y, A.h, zs, ys, B.h, prev)) return false;
    std::vector<int> ka = ctx_kids(A, z), kb = ctx_kids(B, zs);
    ka.erase(std::remove(ka.begin(), ka.end(), y), ka.end());
    kb.erase(std::remove(kb.begin(), kb.end(), ys), kb.end());
    return forests_prev(A, z, ka, {y}, B, zs, kb, {ys}, prev, memo);
  }

  bool case_2b(const CtxLite& A, int z, const CtxLite& B, int zs, const RoundState& prev,
               std::unordered_map<uint64_t, int8_t>& memo) {
    int v = lca3(A.r, z, A.h), vs = lca3(B.r, zs, B.h);
    if (dist_at(A.r, v) != dist_at(B.r, vs)) return false;
    int y1 = toward(v, A.h), y2 = toward(v, z);
    int y1s = toward(vs, B.h), y2s = toward(vs, zs);
    if (!prev_lookup(A.ad, A.r, v, B.ad, B.r, vs, prev)) return false;
    if (!prev_lookup(v, y1, A.h, vs, y1s, B.h, prev)) return false;
    if (!prev_lookup(v, y2, z, vs, y2s, zs, prev)) return false;
    std::vector<int> ka = ctx_kids(A, v), kb = ctx_kids(B, vs);
    ka.erase(std::remove(ka.begin(), ka.end(), y1), ka.end());
    ka.erase(std::remove(ka.begin(), ka.end(), y2), ka.end());
    kb.erase(std::remove(kb.begin(), kb.end(), y1s), kb.end());
    kb.erase(std::remove(kb.begin(), kb.end(), y2s), kb.end());
    if (!forests_prev(A, v, ka, {y1, y2}, B, vs, kb, {y1s, y2s}, prev, memo)) return false;
    return forests_prev(A, z, ctx_kids(A, z), {}, B, zs, ctx_kids(B, zs), {}, prev, memo);
  }

  // Context-pair fact source for the rounds: untouched pairs compare old
  // codes, touched ones must already be in the previous round's relation.
  bool prev_lookup(int ad, int r, int h, int ads, int rs, int hs,
                   const RoundState& prev) const {
    CtxLite a = make_ctx(ad, r, h);
    CtxLite b = make_ctx(ads, rs, hs);
    if (a.nonhole == 0 || b.nonhole == 0) return a.nonhole == 0 && b.nonhole == 0;
    if (a.aff + b.aff == 0) return old_ctx_class(a.key) == old_ctx_class(b.key);
    return prev.ciso.count(treedetail::pair_key(a.key, b.key)) > 0;
  }

  bool tiso_prev(int q, int u, int qs, int us, const RoundState& prev,
                 std::unordered_map<uint64_t, int8_t>& memo) const {
    uint64_t mk = ((uint64_t)treedetail::key12(q, u) << 12) | treedetail::key12(qs, us);
    auto it = memo.find(mk);
    if (it != memo.end()) return it->second != 0;
    bool r = tiso_prev_raw(q, u, qs, us, prev);
    memo[mk] = r ? 1 : 0;
    return r;
  }

  bool tiso_prev_raw(int q, int u, int qs, int us, const RoundState& prev) const {
    uint64_t mu = subtree_mask(q, u), mus = subtree_mask(qs, us);
    if (mu & mus) return false;
    if (popcount(mu) != popcount(mus)) return false;
    if (popcount(mu) == 1) return true;
    if ((mu & affected_) == 0 && (mus & affected_) == 0)
      return old_sub_class(q, u) == old_sub_class(qs, us);
    std::vector<int> la = leaves_of(q, u, mu), lb = leaves_of(qs, us, mus);
    for (int l1 : la) {
      for (int l2 : lb) {
        if (dist_at(u, l1) != dist_at(us, l2)) continue;
        if (prev_lookup(q, u, l1, qs, us, l2, prev)) return true;
      }
    }
    return false;
  }

  // Child-forest comparison against the previous round: for every child a
  // partner with an isomorphic subtree and the same isomorphic-sibling count
  // must exist, where counts ignore the excluded path children (at most two
  // per side), and symmetrically.
  bool forests_prev(const CtxLite& A, int q, const std::vector<int>& ka,
                    std::vector<int> ya, const CtxLite& B, int qs,
                    const std::vector<int>& kb, std::vector<int> yb,
                    const RoundState& prev,
                    std::unordered_map<uint64_t, int8_t>& memo) const {
    if (ka.size() != kb.size()) return false;
    int upq = ctx_parent(A, q);
    if (upq < 0) upq = q;
    int upqs = ctx_parent(B, qs);
    if (upqs < 0) upqs = qs;
    auto count_of = [&](int anchor, int up, int u, const std::vector<int>& excl) {
      int m = prev.sibs.at(treedetail::key18(up, anchor, u));
      for (int y : excl) {
        if (tiso_prev(anchor, u, anchor, y, prev, memo)) m -= 1;
      }
      return m;
    };
    auto half = [&](const std::vector<int>& from, int qf, int upf,
                    const std::vector<int>& yf, const std::vector<int>& to, int qt,
                    int upt, const std::vector<int>& yt) {
      for (int u : from) {
        int cu = count_of(qf, upf, u, yf);
        bool found = false;
        for (int ut : to) {
          if (!tiso_prev(qf, u, qt, ut, prev, memo)) continue;
          if (count_of(qt, upt, ut, yt) != cu) continue;
          found = true;
          break;
        }
        if (!found) return false;
      }
      return true;
    };
    return half(ka, q, upq, ya, kb, qs, upqs, yb) &&
           half(kb, qs, upqs, yb, ka, q, upq, ya);
  }

  // ---- isomorphic-sibling counts ------------------------------------------

  // Recounts every (up-direction, parent, child) entry. Children with
  // untouched subtrees are classed by old codes; a touched child borrows the
  // untouched count of an isomorphic untouched sibling (the representative
  // itself included, since it is a sibling of the touched child) and adds
  // certified touched siblings on top.
  std::map<uint32_t, int> compute_sibs(const std::set<uint64_t>& ciso) const {
    RoundState view;
    view.ciso = ciso;
    std::unordered_map<uint64_t, int8_t> memo;
    std::map<uint32_t, int> out;
    for (int q = 0; q < n_; ++q) {
      std::vector<int> ups{q};
      uint64_t nb = adj_[(size_t)q];
      while (nb) {
        ups.push_back(__builtin_ctzll(nb));
        nb &= nb - 1;
      }
      for (int up : ups) {
        std::vector<int> kids;
        uint64_t kb = adj_[(size_t)q];
        if (up != q) kb &= ~(1ull << up);
        while (kb) {
          kids.push_back(__builtin_ctzll(kb));
          kb &= kb - 1;
        }
        std::map<int, int> clean_count;
        std::vector<int> clean_cls((size_t)kids.size(), -1);
        std::vector<bool> dirty((size_t)kids.size(), false);
        for (size_t i = 0; i < kids.size(); ++i) {
          if (subtree_mask(q, kids[i]) & affected_) {
            dirty[i] = true;
          } else {
            clean_cls[i] = old_sub_class(q, kids[i]);
            clean_count[clean_cls[i]] += 1;
          }
        }
        for (size_t i = 0; i < kids.size(); ++i) {
          int y = kids[i];
          int m1 = 0;
          if (!dirty[i]) {
            m1 = clean_count[clean_cls[i]] - 1;
          } else {
            std::set<int> tried;
            for (size_t j = 0; j < kids.size(); ++j) {
              if (dirty[j] || !tried.insert(clean_cls[j]).second) continue;
              if (tiso_prev(q, y, q, kids[j], view, memo)) {
                m1 = clean_count[clean_cls[j]];
                break;
              }
            }
          }
          int m2 = 0;
          for (size_t j = 0; j < kids.size(); ++j) {
            if (j == i || !dirty[j]) continue;
            if (tiso_prev(q, y, q, kids[j], view, memo)) m2 += 1;
          }
          out[treedetail::key18(up, q, y)] = m1 + m2;
        }
      }
    }
    return out;
  }

  int n_;
  std::vector<int> parent_;
  std::vector<uint64_t> adj_;
  DistanceMaintainer dist_;
  uint64_t affected_ = 0;

  std::unordered_set<uint64_t> ciso_;
  std::map<uint32_t, int> sibs_;
  std::unordered_map<uint32_t, int> ctx_class_;
  std::unordered_map<uint32_t, int> sub_class_;

  // per-apply scratch
  std::vector<CtxFull> ctxs_;
  std::vector<CandPair> base_cands_;
  std::vector<CandPair> round_cands_;
  std::unordered_map<uint64_t, int8_t> base_memo_;
};

}  // namespace dynq

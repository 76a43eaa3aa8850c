#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"
#include "dynq/reach/modmat.hpp"

namespace dynq {

// Directed reachability is read off the adjugate of M = (n+1)I - A: the
// (s,t) entry is a nonnegative integer that counts weighted walks, so it is
// nonzero exactly when t is reachable from s. We never hold that integer,
// only its residues under a fixed basis of word-sized primes; as long as the
// active primes jointly carry more bits than the entry can occupy, a zero in
// every residue is a real zero.

// Bits needed to dominate any adjugate entry of M, via Hadamard's bound on
// an (n-1)x(n-1) minor with rows of norm at most (2n+1)*sqrt(n).
inline uint64_t adjugate_bits_bound(int n) {
  long double bits = (long double)n *
                     (std::log2((long double)(2 * n + 1)) + 0.5L * std::log2((long double)n));
  return (uint64_t)std::ceil(bits);
}

// Smallest `count` primes above `floor_excl`, by trial division. The basis
// primes sit just above 2^20, so divisor candidates stop near 2^11.
inline std::vector<uint32_t> first_primes_above(uint32_t floor_excl, int count) {
  std::vector<uint32_t> out;
  for (uint64_t cand = (uint64_t)floor_excl + 1; (int)out.size() < count; ++cand) {
    if (cand % 2 == 0 && cand != 2) continue;
    bool prime = cand >= 2;
    for (uint64_t d = 3; d * d <= cand; d += 2) {
      if (cand % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back((uint32_t)cand);
  }
  return out;
}

// Prime basis sized so that even after half the primes go bad there is
// still enough bit mass to certify zeroes.
inline std::vector<uint32_t> reach_prime_basis(int /*n*/, uint64_t bits_bound) {
  std::vector<uint32_t> probe = first_primes_above(1u << 20, 1);
  long double per_prime = std::log2((long double)probe[0]);
  int need = (int)std::ceil((long double)bits_bound / per_prime);
  return first_primes_above(1u << 20, 2 * need);
}

// Net change of M for one batch, factored as U * V with U a column selector
// of the touched rows. V has one row per touched source, entries in {-1,0,1}
// (insert of arc (u,v) lowers M[u][v], delete raises it).
struct LowRankFactor {
  std::vector<int> sources;               // distinct touched rows, ascending
  std::vector<std::vector<int8_t>> vrow;  // one length-n row per source

  static LowRankFactor build(int n, const std::map<std::pair<int, int>, int>& delta_m) {
    LowRankFactor f;
    std::set<int> srcs;
    for (const auto& [arc, d] : delta_m) {
      if (d != 0) srcs.insert(arc.first);
    }
    f.sources.assign(srcs.begin(), srcs.end());
    f.vrow.assign(f.sources.size(), std::vector<int8_t>((size_t)n, 0));
    for (const auto& [arc, d] : delta_m) {
      if (d == 0) continue;
      size_t i = (size_t)(std::lower_bound(f.sources.begin(), f.sources.end(), arc.first) -
                          f.sources.begin());
      f.vrow[i][(size_t)arc.second] = (int8_t)d;
    }
    return f;
  }

  ModMat u_times_v(int n, uint32_t p) const {
    ModMat m(n, n, p);
    for (size_t i = 0; i < sources.size(); ++i) {
      for (int c = 0; c < n; ++c) {
        int8_t v = vrow[i][(size_t)c];
        if (v) m.at(sources[i], c) = v > 0 ? 1 % p : p - 1;
      }
    }
    return m;
  }
};

struct SmwResult {
  ModMat minv;
  uint32_t det = 0;
};

// One Sherman-Morrison-Woodbury step: given the inverse and determinant of M
// mod p, produce those of M + U*V. The k x k capacitance S = I + V Minv U
// decides everything; a singular S means the updated matrix is singular mod
// this prime and the caller has to retire it.
inline std::optional<SmwResult> smw_update(const ModMat& minv, uint32_t det,
                                           const LowRankFactor& f) {
  const uint32_t p = minv.p;
  const int n = minv.rows;
  const int k = (int)f.sources.size();
  if (k == 0) return SmwResult{minv, det};

  // VM = V * Minv, exploiting that V rows are sparse +-1 vectors
  ModMat vm(k, n, p);
  for (int i = 0; i < k; ++i) {
    for (int t = 0; t < n; ++t) {
      int8_t v = f.vrow[(size_t)i][(size_t)t];
      if (!v) continue;
      for (int c = 0; c < n; ++c) {
        uint32_t cur = vm.at(i, c);
        uint32_t add = minv.at(t, c);
        vm.at(i, c) = v > 0 ? (uint32_t)((cur + add) % p) : (uint32_t)((cur + p - add) % p);
      }
    }
  }
  // MU = Minv * U is just the touched columns of Minv
  ModMat mu(n, k, p);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < k; ++j) mu.at(r, j) = minv.at(r, f.sources[j]);
  }
  // S = I_k + V Minv U = I_k + VM restricted to the touched columns
  ModMat s(k, k, p);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      uint32_t v = vm.at(i, f.sources[j]);
      s.at(i, j) = (uint32_t)((v + (i == j ? 1u : 0u)) % p);
    }
  }
  uint32_t ds = det_small(s);
  if (ds == 0) return std::nullopt;
  auto sinv = mat_inverse(s);
  if (!sinv) fail(Err::Internal, "det_small nonzero but inversion failed");

  ModMat w = mat_mul(mu, sinv->inv);  // n x k
  ModMat corr = mat_mul(w, vm);       // n x n
  SmwResult out;
  out.minv = minv;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      out.minv.at(r, c) = (uint32_t)((out.minv.at(r, c) + p - corr.at(r, c)) % p);
    }
  }
  out.det = (uint32_t)((uint64_t)det * ds % p);
  return out;
}

// Batch-dynamic directed reachability. Each batch becomes one low-rank
// update applied independently per prime; primes whose matrix turns singular
// go dormant and are rebuilt from scratch only when the active bit mass
// would otherwise drop below the soundness bound.
class ReachMaintainer {
 public:
  explicit ReachMaintainer(int n)
      : ReachMaintainer(n, reach_prime_basis(n, adjugate_bits_bound(n)), adjugate_bits_bound(n)) {}

  // test hook: explicit basis and bound
  ReachMaintainer(int n, std::vector<uint32_t> primes, uint64_t bits_bound)
      : n_(n), bits_bound_(bits_bound), primes_(std::move(primes)) {
    if (n_ < 1) fail(Err::OutOfDomain, "need at least one node");
    states_.reserve(primes_.size());
    for (uint32_t p : primes_) {
      PrimeState st;
      st.log2p = (double)std::log2((long double)p);
      uint32_t diag = (uint32_t)((uint64_t)(n_ + 1) % p);
      if (diag == 0) {
        st.active = false;  // can only happen with injected tiny primes
      } else {
        uint32_t dinv = mod_inverse(diag, p);
        st.minv = ModMat(n_, n_, p);
        uint64_t det = 1;
        for (int i = 0; i < n_; ++i) {
          st.minv.at(i, i) = dinv;
          det = det * diag % p;
        }
        st.det = (uint32_t)det;
        st.active = true;
      }
      states_.push_back(std::move(st));
    }
    ensure_bits(nullptr);
  }

  int n() const { return n_; }
  uint64_t bits_bound() const { return bits_bound_; }
  size_t prime_count() const { return primes_.size(); }
  uint32_t prime(size_t i) const { return primes_[i]; }
  bool prime_active(size_t i) const { return states_[i].active; }
  const ModMat& prime_minv(size_t i) const { return states_[i].minv; }
  uint32_t prime_det(size_t i) const { return states_[i].det; }

  size_t active_count() const {
    size_t c = 0;
    for (const auto& st : states_) c += st.active ? 1 : 0;
    return c;
  }
  double active_bits() const {
    double b = 0;
    for (const auto& st : states_) {
      if (st.active) b += st.log2p;
    }
    return b;
  }

  bool has_arc(int u, int v) const { return arcs_.count(key(u, v)) != 0; }
  std::vector<std::pair<int, int>> arcs() const {
    std::vector<std::pair<int, int>> out;
    for (uint64_t k : arcs_) out.push_back({(int)(k >> 32), (int)(k & 0xffffffffu)});
    return out;
  }

  // current M mod p, rebuilt from the arc set (test support)
  ModMat current_m(uint32_t p) const {
    ModMat m(n_, n_, p);
    uint32_t diag = (uint32_t)((uint64_t)(n_ + 1) % p);
    for (int i = 0; i < n_; ++i) m.at(i, i) = diag;
    for (uint64_t k : arcs_) {
      int u = (int)(k >> 32), v = (int)(k & 0xffffffffu);
      m.at(u, v) = (uint32_t)((m.at(u, v) + p - 1 % p) % p);
    }
    return m;
  }

  void apply(const std::vector<std::pair<int, int>>& del_arcs,
             const std::vector<std::pair<int, int>>& ins_arcs, RoundMeter& meter) {
    meter.reset(1);
    meter.rounds_used = 1;  // one synchronous update, however wide the batch

    // net entry changes; a delete and insert of the same arc cancels
    std::map<std::pair<int, int>, int> delta;
    std::set<uint64_t> tentative = arcs_;
    for (auto [u, v] : del_arcs) {
      check_node(u);
      check_node(v);
      if (!tentative.erase(key(u, v))) {
        fail(Err::NotPresentOnDelete, "(" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
      delta[{u, v}] += 1;  // A loses the arc, M gains one
    }
    for (auto [u, v] : ins_arcs) {
      check_node(u);
      check_node(v);
      if (!tentative.insert(key(u, v)).second) {
        fail(Err::AlreadyPresentOnInsert, "(" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
      delta[{u, v}] -= 1;
    }
    arcs_ = std::move(tentative);

    LowRankFactor f = LowRankFactor::build(n_, delta);
    for (size_t i = 0; i < states_.size(); ++i) {
      PrimeState& st = states_[i];
      if (!st.active) continue;
      meter.block("det-small");
      auto next = smw_update(st.minv, st.det, f);
      if (!next) {
        st.active = false;
        st.minv = ModMat();
        continue;
      }
      st.minv = std::move(next->minv);
      st.det = next->det;
    }
    ensure_bits(&meter);
  }

  bool reach_query(int s, int t) const {
    check_node(s);
    check_node(t);
    if (s == t) return true;
    for (const auto& st : states_) {
      if (!st.active) continue;
      uint32_t adj = (uint32_t)((uint64_t)st.det * st.minv.at(s, t) % st.minv.p);
      if (adj != 0) return true;
    }
    return false;
  }

 private:
  struct PrimeState {
    bool active = false;
    ModMat minv;
    uint32_t det = 0;
    double log2p = 0;
  };

  static uint64_t key(int u, int v) { return ((uint64_t)(uint32_t)u << 32) | (uint32_t)v; }

  void check_node(int u) const {
    if (u < 0 || u >= n_) fail(Err::OutOfDomain, "node " + std::to_string(u));
  }

  // Rebuild dormant primes until the active ones certify the bound again.
  // Rebuilding inverts the full current matrix, which is the expensive path
  // this design accepts in exchange for cheap per-batch updates.
  void ensure_bits(RoundMeter* meter) {
    double bits = active_bits();
    if (bits > (double)bits_bound_) return;
    for (size_t i = 0; i < states_.size() && bits <= (double)bits_bound_; ++i) {
      PrimeState& st = states_[i];
      if (st.active) continue;
      auto res = mat_inverse(current_m(primes_[i]));
      if (meter) meter->block("reinversion");
      if (!res) continue;  // still singular mod this prime, try again later
      st.minv = std::move(res->inv);
      st.det = res->det;
      st.active = true;
      bits += st.log2p;
    }
    if (bits <= (double)bits_bound_) {
      fail(Err::TooFewActivePrimes,
           "active primes certify " + std::to_string(bits) + " bits, need more than " +
               std::to_string(bits_bound_));
    }
  }

  int n_;
  uint64_t bits_bound_;
  std::vector<uint32_t> primes_;
  std::vector<PrimeState> states_;
  std::set<uint64_t> arcs_;
};

}  // namespace dynq

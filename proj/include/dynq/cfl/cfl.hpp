#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dynq/cfl/gapped.hpp"
#include "dynq/cfl/grammar.hpp"
#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"

namespace dynq {

// Batch-dynamic membership for a context-free language. The word has a
// fixed length and a batch replaces the letters at m positions at once.
// The carried state is the gapped-interval relation; membership is the
// single fact "start symbol derives [1, n] with the hole collapsed onto a
// letter-emitting symbol".
//
// An update first keeps every tuple whose two visible flanks dodge all
// changed positions, re-derives in one stroke the tuples whose flanks
// contain exactly one change, and then closes the result under the
// plug-and-stitch rules; floor(log_1.5 m) + 1 closure rounds always reach
// the fixpoint.
class CflMaintainer {
 public:
  CflMaintainer(Grammar g, std::string word) : g_(std::move(g)), w_(std::move(word)) {
    if (w_.empty()) fail(Err::EmptyWord, "the maintained word must be nonempty");
    n_ = (int)w_.size();
    for (char c : w_) {
      if (!g_.knows_terminal(c)) {
        fail(Err::UnknownSymbol, std::string("terminal '") + c + "' not in the grammar");
      }
    }
    rel_ = initial_closure();
  }

  int n() const { return n_; }
  const Grammar& grammar() const { return g_; }
  const std::string& word() const { return w_; }
  const GappedRel& rel() const { return rel_; }

  // does x derive exactly the text on [u1, u2]?
  bool t_fact(int x, int u1, int u2) const { return derives_span(rel_, x, u1, u2); }

  bool member() const { return derives_span(rel_, g_.start(), 1, n_); }

  // changes are (position, letter) with 1-based positions
  void apply_set(const std::vector<std::pair<int, char>>& changes, RoundMeter& meter) {
    std::vector<bool> touched((size_t)n_ + 1, false);
    for (auto [pos, c] : changes) {
      if (pos < 1 || pos > n_) fail(Err::OutOfDomain, "position " + std::to_string(pos));
      if (!g_.knows_terminal(c)) {
        fail(Err::UnknownSymbol, std::string("terminal '") + c + "' not in the grammar");
      }
      if (touched[(size_t)pos]) {
        fail(Err::OutOfDomain, "position " + std::to_string(pos) + " set twice in one batch");
      }
      touched[(size_t)pos] = true;
    }

    uint64_t bound = (uint64_t)log_three_halves_bound(changes.size());
    meter.reset(bound);
    for (auto [pos, c] : changes) w_[(size_t)(pos - 1)] = c;

    GappedRel start = base_case(rel_, changes);
    meter.block("base-case");
    rel_ = run_rounds(std::move(start), bound, meter,
                      [&](const GappedRel& prev) { return one_round(prev); });
  }

 private:
  // T view of a relation snapshot: x derives [u1, u2] as plain text iff
  // some letter-emitting w sits in a collapsed hole (v, v) with the right
  // letter under it.
  bool derives_span(const GappedRel& r, int x, int u1, int u2) const {
    for (const auto& tr : g_.term()) {
      for (int v = u1; v <= u2; ++v) {
        if (w_[(size_t)(v - 1)] == tr.a && r.get(x, tr.x, u1, v, v, u2)) return true;
      }
    }
    return false;
  }

  std::vector<Bits> derive_t(const GappedRel& r) const {
    std::vector<Bits> t((size_t)g_.nt_count(), Bits((size_t)n_ * (size_t)n_ + 1));
    for (int x = 0; x < g_.nt_count(); ++x) {
      for (const auto& tr : g_.term()) {
        for (int v = 1; v <= n_; ++v) {
          if (w_[(size_t)(v - 1)] != tr.a) continue;
          for (int u1 = 1; u1 <= v; ++u1) {
            for (int u2 = v; u2 <= n_; ++u2) {
              if (r.get(x, tr.x, u1, v, v, u2)) {
                t[(size_t)x].set((size_t)(u1 - 1) * (size_t)n_ + (size_t)(u2 - 1));
              }
            }
          }
        }
      }
    }
    return t;
  }

  static bool t_bit(const std::vector<Bits>& t, int x, int u1, int u2, int n) {
    return t[(size_t)x].get((size_t)(u1 - 1) * (size_t)n + (size_t)(u2 - 1));
  }

  // dst |= a o b: an a-tuple (i1, u1, u2, i2) donates b's whole (u1, u2)
  // block to the (i1, i2) block, for every midpoint nonterminal z
  void compose_into(GappedRel& dst, const GappedRel& a, const GappedRel& b) const {
    const int nts = g_.nt_count();
    const size_t bw = dst.block_words();
    for (int x = 0; x < nts; ++x) {
      for (int z = 0; z < nts; ++z) {
        for (int i1 = 1; i1 <= n_; ++i1) {
          for (int i2 = i1; i2 <= n_; ++i2) {
            const uint64_t* ab = a.block(x, z, i1, i2);
            for (int u1 = i1; u1 <= i2; ++u1) {
              for (int u2 = u1; u2 <= i2; ++u2) {
                size_t bit = GappedRel::hole_bit(n_, u1, u2);
                if (!((ab[bit >> 6] >> (bit & 63)) & 1)) continue;
                for (int y = 0; y < nts; ++y) {
                  or_words(dst.block(x, y, i1, i2), b.block(z, y, u1, u2), bw);
                }
              }
            }
          }
        }
      }
    }
  }

  // The stitched middle layer: z expands by a binary rule, one child is
  // fully derived text (a T fact), the hole lives in the other child.
  GappedRel build_mid(const GappedRel& r, const std::vector<Bits>& t) const {
    GappedRel mid(g_.nt_count(), n_);
    const size_t bw = mid.block_words();
    for (const auto& rule : g_.binary()) {
      for (int y = 0; y < g_.nt_count(); ++y) {
        for (int v1 = 1; v1 <= n_; ++v1) {
          for (int v3 = v1 + 1; v3 <= n_; ++v3) {
            uint64_t* out = mid.block(rule.x, y, v1, v3);
            for (int v2 = v1; v2 < v3; ++v2) {
              if (t_bit(t, rule.y, v1, v2, n_)) {
                or_words(out, r.block(rule.z, y, v2 + 1, v3), bw);
              }
              if (t_bit(t, rule.z, v2 + 1, v3, n_)) {
                or_words(out, r.block(rule.y, y, v1, v2), bw);
              }
            }
          }
        }
      }
    }
    return mid;
  }

  GappedRel one_round(const GappedRel& prev) const {
    GappedRel next = prev;
    compose_into(next, prev, prev);
    GappedRel mid = build_mid(prev, derive_t(prev));
    compose_into(next, prev, mid);
    return next;
  }

  // Ground truth from scratch, by growing outer span length: a tuple with
  // outer span s comes from a binary rule whose fully-derived child covers
  // a nonempty prefix or suffix of s, and both ingredients live on shorter
  // spans. T facts per span are cached as soon as the span is closed.
  GappedRel initial_closure() const {
    GappedRel r(g_.nt_count(), n_);
    r.seed_trivial();
    std::vector<Bits> t((size_t)g_.nt_count(), Bits((size_t)n_ * (size_t)n_ + 1));
    for (int len = 1; len <= n_; ++len) {
      for (int i1 = 1; i1 + len - 1 <= n_; ++i1) {
        int i2 = i1 + len - 1;
        for (const auto& rule : g_.binary()) {
          for (int k = i1; k < i2; ++k) {
            // hole on the left of the split, text on the right
            if (t_bit(t, rule.z, k + 1, i2, n_)) {
              for (int y = 0; y < g_.nt_count(); ++y) {
                or_words(r.block(rule.x, y, i1, i2), r.block(rule.y, y, i1, k),
                         r.block_words());
              }
            }
            // text on the left, hole on the right
            if (t_bit(t, rule.y, i1, k, n_)) {
              for (int y = 0; y < g_.nt_count(); ++y) {
                or_words(r.block(rule.x, y, i1, i2), r.block(rule.z, y, k + 1, i2),
                         r.block_words());
              }
            }
          }
        }
        // with the span complete, record which symbols derive it as text
        for (int x = 0; x < g_.nt_count(); ++x) {
          if (derives_span(r, x, i1, i2)) {
            t[(size_t)x].set((size_t)(i1 - 1) * (size_t)n_ + (size_t)(i2 - 1));
          }
        }
      }
    }
    return r;
  }

  // Round zero of an update. Tuples with clean flanks carry over; tuples
  // whose flanks contain exactly one changed position are rebuilt from
  // clean facts, the new letter, and one binary rule at the junction where
  // the letter's branch and the hole's branch part ways.
  GappedRel base_case(const GappedRel& old,
                      const std::vector<std::pair<int, char>>& changes) const {
    // prefix counts of changed positions, for flank cleanliness tests
    std::vector<int> pref((size_t)n_ + 1, 0);
    for (auto [pos, c] : changes) {
      (void)c;
      pref[(size_t)pos] = 1;
    }
    for (int i = 1; i <= n_; ++i) pref[(size_t)i] += pref[(size_t)i - 1];
    auto clean = [&](int a, int b) {  // no changed position in [a, b]
      if (a > b) return true;
      return pref[(size_t)b] - pref[(size_t)(a - 1)] == 0;
    };

    const int nts = g_.nt_count();
    GappedRel rc(nts, n_);
    for (int x = 0; x < nts; ++x) {
      for (int y = 0; y < nts; ++y) {
        for (int i1 = 1; i1 <= n_; ++i1) {
          for (int i2 = i1; i2 <= n_; ++i2) {
            const uint64_t* src = old.block(x, y, i1, i2);
            uint64_t* dst = rc.block(x, y, i1, i2);
            for (int j1 = i1; j1 <= i2; ++j1) {
              if (!clean(i1, j1 - 1)) break;  // left flank only grows with j1
              for (int j2 = j1; j2 <= i2; ++j2) {
                if (!clean(j2 + 1, i2)) continue;
                size_t bit = GappedRel::hole_bit(n_, j1, j2);
                dst[bit >> 6] |= src[bit >> 6] & (1ull << (bit & 63));
              }
            }
          }
        }
      }
    }

    GappedRel r0 = rc;
    GappedRel midp(nts, n_);
    bool any_mid = false;
    for (auto [pos, c] : changes) {
      // which symbols fully derive [v1, v2] when the only dirty position
      // inside is pos, now holding letter c
      std::vector<Bits> seed((size_t)nts, Bits((size_t)n_ * (size_t)n_ + 1));
      for (int zz = 0; zz < nts; ++zz) {
        for (int e : g_.emitters(c)) {
          for (int v1 = 1; v1 <= pos; ++v1) {
            for (int v2 = pos; v2 <= n_; ++v2) {
              if (rc.get(zz, e, v1, pos, pos, v2)) {
                seed[(size_t)zz].set((size_t)(v1 - 1) * (size_t)n_ + (size_t)(v2 - 1));
              }
            }
          }
        }
      }
      for (const auto& rule : g_.binary()) {
        for (int y = 0; y < nts; ++y) {
          for (int v1 = 1; v1 <= n_; ++v1) {
            for (int v3 = v1 + 1; v3 <= n_; ++v3) {
              uint64_t* out = midp.block(rule.x, y, v1, v3);
              for (int v2 = v1; v2 < v3; ++v2) {
                if (t_bit(seed, rule.y, v1, v2, n_)) {
                  or_words(out, rc.block(rule.z, y, v2 + 1, v3), midp.block_words());
                  any_mid = true;
                }
                if (t_bit(seed, rule.z, v2 + 1, v3, n_)) {
                  or_words(out, rc.block(rule.y, y, v1, v2), midp.block_words());
                  any_mid = true;
                }
              }
            }
          }
        }
      }
    }
    if (any_mid) compose_into(r0, rc, midp);
    return r0;
  }

  Grammar g_;
  std::string w_;
  int n_ = 0;
  GappedRel rel_;
};

}  // namespace dynq

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dynq/common.hpp"

namespace dynq {

// Storage for relations over gapped intervals (i1, j1, j2, i2) with
// 1 <= i1 <= j1 <= j2 <= i2 <= n, one relation per ordered nonterminal pair.
// A tuple says: the first nonterminal derives the text on [i1, j1) and
// (j2, i2] around a hole [j1, j2] left for the second one.
//
// Layout: for each pair (x, y) and each outer span (i1, i2) there is one
// word-aligned block of n*n bits indexed by the hole (j1, j2). Every
// one-step consequence rule plugs a complete inner block into an outer
// block, so saturation runs on whole words.
class GappedRel {
 public:
  GappedRel() = default;
  GappedRel(int nts, int n) : nts_(nts), n_(n), bw_(((size_t)n * (size_t)n + 63) / 64) {
    size_t words = (size_t)nts * (size_t)nts * (size_t)n * (size_t)n * bw_;
    if (words > (1ull << 28)) {
      fail(Err::OutOfDomain, "gapped relation would need more than 2 GiB");
    }
    data_.assign(words, 0);
  }

  int n() const { return n_; }
  int nts() const { return nts_; }
  size_t block_words() const { return bw_; }

  // all coordinates 1-based
  uint64_t* block(int x, int y, int i1, int i2) {
    return data_.data() + block_off(x, y, i1, i2);
  }
  const uint64_t* block(int x, int y, int i1, int i2) const {
    return data_.data() + block_off(x, y, i1, i2);
  }

  static size_t hole_bit(int n, int j1, int j2) {
    return (size_t)(j1 - 1) * (size_t)n + (size_t)(j2 - 1);
  }

  bool get(int x, int y, int i1, int j1, int j2, int i2) const {
    size_t b = hole_bit(n_, j1, j2);
    return (block(x, y, i1, i2)[b >> 6] >> (b & 63)) & 1;
  }
  void set(int x, int y, int i1, int j1, int j2, int i2) {
    size_t b = hole_bit(n_, j1, j2);
    block(x, y, i1, i2)[b >> 6] |= 1ull << (b & 63);
  }

  // the always-true tuples: every symbol reaches itself around any hole
  void seed_trivial() {
    for (int x = 0; x < nts_; ++x) {
      for (int i = 1; i <= n_; ++i) {
        for (int j = i; j <= n_; ++j) set(x, x, i, i, j, j);
      }
    }
  }

  bool operator==(const GappedRel& o) const {
    return nts_ == o.nts_ && n_ == o.n_ && data_ == o.data_;
  }

  size_t popcount() const {
    size_t c = 0;
    for (uint64_t w : data_) c += (size_t)__builtin_popcountll(w);
    return c;
  }

  // sorted tuple dump of one pair relation, for oracle comparisons
  std::vector<std::array<int, 4>> tuples(int x, int y) const {
    std::vector<std::array<int, 4>> out;
    for (int i1 = 1; i1 <= n_; ++i1) {
      for (int i2 = i1; i2 <= n_; ++i2) {
        const uint64_t* b = block(x, y, i1, i2);
        for (int j1 = i1; j1 <= i2; ++j1) {
          for (int j2 = j1; j2 <= i2; ++j2) {
            size_t bit = hole_bit(n_, j1, j2);
            if ((b[bit >> 6] >> (bit & 63)) & 1) out.push_back({i1, j1, j2, i2});
          }
        }
      }
    }
    return out;
  }

 private:
  size_t block_off(int x, int y, int i1, int i2) const {
    size_t pair = (size_t)x * (size_t)nts_ + (size_t)y;
    size_t span = (size_t)(i1 - 1) * (size_t)n_ + (size_t)(i2 - 1);
    return (pair * (size_t)n_ * (size_t)n_ + span) * bw_;
  }

  int nts_ = 0;
  int n_ = 0;
  size_t bw_ = 0;
  std::vector<uint64_t> data_;
};

inline void or_words(uint64_t* dst, const uint64_t* src, size_t words) {
  for (size_t i = 0; i < words; ++i) dst[i] |= src[i];
}

}  // namespace dynq

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynq/common.hpp"

namespace dynq {

// Dense matrix over Z/p for a prime p < 2^21. Entries stay reduced, so any
// product fits a uint64 and a full row dot product fits well under 2^63.
struct ModMat {
  int rows = 0;
  int cols = 0;
  uint32_t p = 0;
  std::vector<uint32_t> a;

  ModMat() = default;
  ModMat(int r, int c, uint32_t prime) : rows(r), cols(c), p(prime), a((size_t)r * (size_t)c, 0) {}

  static ModMat identity(int n, uint32_t prime) {
    ModMat m(n, n, prime);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1 % prime;
    return m;
  }

  uint32_t& at(int r, int c) { return a[(size_t)r * (size_t)cols + (size_t)c]; }
  uint32_t at(int r, int c) const { return a[(size_t)r * (size_t)cols + (size_t)c]; }

  bool operator==(const ModMat& o) const {
    return rows == o.rows && cols == o.cols && p == o.p && a == o.a;
  }
};

inline uint32_t mod_inverse(uint32_t x, uint32_t p) {
  // extended Euclid; p is prime and x nonzero mod p
  int64_t t = 0, nt = 1, r = (int64_t)p, nr = (int64_t)(x % p);
  while (nr != 0) {
    int64_t q = r / nr;
    int64_t tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) fail(Err::Internal, "mod_inverse of a noninvertible element");
  if (t < 0) t += (int64_t)p;
  return (uint32_t)t;
}

inline ModMat mat_mul(const ModMat& x, const ModMat& y) {
  if (x.cols != y.rows || x.p != y.p) fail(Err::Internal, "mat_mul shape mismatch");
  ModMat out(x.rows, y.cols, x.p);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      uint64_t xv = x.at(i, k);
      if (!xv) continue;
      for (int j = 0; j < y.cols; ++j) {
        uint64_t acc = out.at(i, j) + xv * y.at(k, j) % x.p;
        out.at(i, j) = (uint32_t)(acc >= x.p ? acc - x.p : acc);
      }
    }
  }
  return out;
}

// Determinant of a small square matrix by plain elimination with pivot
// search. Works on a copy; returns 0 for singular input.
inline uint32_t det_small(ModMat m) {
  if (m.rows != m.cols) fail(Err::Internal, "det_small needs a square matrix");
  const uint32_t p = m.p;
  const int k = m.rows;
  uint64_t det = 1 % p;
  for (int col = 0; col < k; ++col) {
    int pivot = -1;
    for (int r = col; r < k; ++r) {
      if (m.at(r, col) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return 0;
    if (pivot != col) {
      for (int c = col; c < k; ++c) std::swap(m.at(pivot, c), m.at(col, c));
      det = (uint64_t)(p - (uint32_t)det) % p;
    }
    uint32_t pv = m.at(col, col);
    det = det * pv % p;
    uint32_t pinv = mod_inverse(pv, p);
    for (int r = col + 1; r < k; ++r) {
      uint32_t f = m.at(r, col);
      if (!f) continue;
      uint64_t scale = (uint64_t)f * pinv % p;
      for (int c = col; c < k; ++c) {
        uint64_t sub = scale * m.at(col, c) % p;
        uint32_t cur = m.at(r, c);
        m.at(r, c) = (uint32_t)((cur + p - (uint32_t)sub) % p);
      }
    }
  }
  return (uint32_t)det;
}

struct InverseResult {
  ModMat inv;
  uint32_t det = 0;
};

// Gauss-Jordan on [A | I]; nullopt when A is singular mod p.
inline std::optional<InverseResult> mat_inverse(const ModMat& in) {
  if (in.rows != in.cols) fail(Err::Internal, "mat_inverse needs a square matrix");
  const int n = in.rows;
  const uint32_t p = in.p;
  ModMat m = in;
  ModMat inv = ModMat::identity(n, p);
  uint64_t det = 1 % p;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (m.at(r, col) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return std::nullopt;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(m.at(pivot, c), m.at(col, c));
        std::swap(inv.at(pivot, c), inv.at(col, c));
      }
      det = (uint64_t)(p - (uint32_t)det) % p;
    }
    uint32_t pv = m.at(col, col);
    det = det * pv % p;
    uint32_t pinv = mod_inverse(pv, p);
    for (int c = 0; c < n; ++c) {
      m.at(col, c) = (uint32_t)((uint64_t)m.at(col, c) * pinv % p);
      inv.at(col, c) = (uint32_t)((uint64_t)inv.at(col, c) * pinv % p);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      uint32_t f = m.at(r, col);
      if (!f) continue;
      for (int c = 0; c < n; ++c) {
        uint64_t sub = (uint64_t)f * m.at(col, c) % p;
        m.at(r, c) = (uint32_t)((m.at(r, c) + p - (uint32_t)sub) % p);
        sub = (uint64_t)f * inv.at(col, c) % p;
        inv.at(r, c) = (uint32_t)((inv.at(r, c) + p - (uint32_t)sub) % p);
      }
    }
  }
  return InverseResult{std::move(inv), (uint32_t)det};
}

}  // namespace dynq

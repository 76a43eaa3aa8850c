#pragma once

#include <cstdint>
#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynq {

enum class Err {
  UnknownRelation,
  ArityMismatch,
  NotPresentOnDelete,
  AlreadyPresentOnInsert,
  BatchTooLarge,
  BoundExceededWithoutFixpoint,
  SyntaxError,
  MissingHeader,
  OutOfDomain,
  SingularMatrix,
  TooFewActivePrimes,
  NotAcyclic,
  NotAForest,
  NotDisjoint,
  InvalidContext,
  GrammarNotInCnf,
  UnknownSymbol,
  EmptyWord,
  DuplicateEdge,
  UnknownEdgeOnDelete,
  DegreeBoundViolated,
  NotAProperColoring,
  PreconditionViolated,
  InfeasibleConstraint,
  BadQuery,
  Internal,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::UnknownRelation: return "UnknownRelation";
    case Err::ArityMismatch: return "ArityMismatch";
    case Err::NotPresentOnDelete: return "NotPresentOnDelete";
    case Err::AlreadyPresentOnInsert: return "AlreadyPresentOnInsert";
    case Err::BatchTooLarge: return "BatchTooLarge";
    case Err::BoundExceededWithoutFixpoint: return "BoundExceededWithoutFixpoint";
    case Err::SyntaxError: return "SyntaxError";
    case Err::MissingHeader: return "MissingHeader";
    case Err::OutOfDomain: return "OutOfDomain";
    case Err::SingularMatrix: return "SingularMatrix";
    case Err::TooFewActivePrimes: return "TooFewActivePrimes";
    case Err::NotAcyclic: return "NotAcyclic";
    case Err::NotAForest: return "NotAForest";
    case Err::NotDisjoint: return "NotDisjoint";
    case Err::InvalidContext: return "InvalidContext";
    case Err::GrammarNotInCnf: return "GrammarNotInCnf";
    case Err::UnknownSymbol: return "UnknownSymbol";
    case Err::EmptyWord: return "EmptyWord";
    case Err::DuplicateEdge: return "DuplicateEdge";
    case Err::UnknownEdgeOnDelete: return "UnknownEdgeOnDelete";
    case Err::DegreeBoundViolated: return "DegreeBoundViolated";
    case Err::NotAProperColoring: return "NotAProperColoring";
    case Err::PreconditionViolated: return "PreconditionViolated";
    case Err::InfeasibleConstraint: return "InfeasibleConstraint";
    case Err::BadQuery: return "BadQuery";
    case Err::Internal: return "Internal";
  }
  return "?";
}

// All recoverable failures funnel through this one type so callers can
// switch on the kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(Err kind, std::string msg)
      : std::runtime_error(std::string(err_name(kind)) + ": " + std::move(msg)), kind_(kind) {}
  Err kind() const { return kind_; }

 private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

// Deterministic PRNG. Distribution helpers are hand-rolled so generated
// workloads are byte-identical across standard library versions.
struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed) {}

  uint64_t next() {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, m)
  uint64_t below(uint64_t m) {
    // rejection-free Lemire reduction; bias is < 2^-64 * m, irrelevant here
    return (uint64_t)(((__uint128_t)next() * m) >> 64);
  }

  int range(int lo, int hi) {  // inclusive
    return lo + (int)below((uint64_t)(hi - lo + 1));
  }

  bool chance(double p) { return (double)next() / 18446744073709551616.0 < p; }
};

// Packed bit vector sized at runtime. vector<bool> would do, but explicit
// words let relation scans enumerate set bits a word at a time.
class Bits {
 public:
  Bits() = default;
  explicit Bits(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  size_t size() const { return n_; }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i) { w_[i >> 6] |= 1ull << (i & 63); }
  void reset(size_t i) { w_[i >> 6] &= ~(1ull << (i & 63)); }

  // set bit i, returning whether it was previously clear
  bool set_new(size_t i) {
    uint64_t& w = w_[i >> 6];
    uint64_t m = 1ull << (i & 63);
    if (w & m) return false;
    w |= m;
    return true;
  }

  size_t count() const {
    size_t c = 0;
    for (uint64_t w : w_) c += (size_t)std::popcount(w);
    return c;
  }

  bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }

  template <class F>
  void for_each(F&& f) const {
    for (size_t wi = 0; wi < w_.size(); ++wi) {
      uint64_t w = w_[wi];
      while (w) {
        f(wi * 64 + (size_t)std::countr_zero(w));
        w &= w - 1;
      }
    }
  }

 private:
  size_t n_ = 0;
  std::vector<uint64_t> w_;
};

// ceil(log2(m+1)); 0 for m = 0
inline int ceil_log2_succ(uint64_t m) { return std::bit_width(m); }

// smallest k >= 1 with (3/2)^k > m, i.e. floor(log_1.5 m) + 1; integer-exact
inline int log_three_halves_bound(uint64_t m) {
  if (m <= 1) return 1;
  int k = 0;
  __uint128_t num = 1, den = 1;  // (3/2)^k = num/den
  while (num <= (__uint128_t)m * den) {
    num *= 3;
    den *= 2;
    ++k;
  }
  return k;
}

}  // namespace dynq

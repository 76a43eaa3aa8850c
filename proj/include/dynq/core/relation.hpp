#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "dynq/common.hpp"

namespace dynq {

// Active domain [0, n). Relations range over it; scripts fix n up front.
struct Domain {
  int n = 0;
};

using Tuple = std::vector<int64_t>;

inline std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

// One relation instance. Two storage backends share this interface: a hash
// set of packed tuples for sparse relations, and a word-packed bitset for
// dense ones where membership scans dominate. Component values must fit the
// declared limits (dense: < n per position; sparse: arbitrary int64).
class TupleSet {
 public:
  virtual ~TupleSet() = default;
  virtual int arity() const = 0;
  virtual size_t size() const = 0;
  virtual bool contains(const Tuple& t) const = 0;
  virtual bool insert(const Tuple& t) = 0;  // false if already present
  virtual bool erase(const Tuple& t) = 0;   // false if absent
  virtual std::vector<Tuple> rows() const = 0;  // deterministic (sorted) order
};

class SparseTupleSet final : public TupleSet {
 public:
  explicit SparseTupleSet(int arity) : arity_(arity) {}

  int arity() const override { return arity_; }
  size_t size() const override { return set_.size(); }

  bool contains(const Tuple& t) const override { return set_.count(t) != 0; }
  bool insert(const Tuple& t) override { return set_.insert(t).second; }
  bool erase(const Tuple& t) override { return set_.erase(t) != 0; }

  std::vector<Tuple> rows() const override {
    std::vector<Tuple> out(set_.begin(), set_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Hash {
    size_t operator()(const Tuple& t) const {
      uint64_t h = 0x9e3779b97f4a7c15ull;
      for (int64_t v : t) {
        h ^= (uint64_t)v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return (size_t)h;
    }
  };
  int arity_;
  std::unordered_set<Tuple, Hash> set_;
};

class DenseTupleSet final : public TupleSet {
 public:
  DenseTupleSet(int arity, int n) : arity_(arity), n_(n) {
    size_t cells = 1;
    for (int i = 0; i < arity; ++i) cells *= (size_t)n;
    bits_ = Bits(cells);
  }

  int arity() const override { return arity_; }
  size_t size() const override { return count_; }

  bool contains(const Tuple& t) const override { return bits_.get(index(t)); }

  bool insert(const Tuple& t) override {
    bool fresh = bits_.set_new(index(t));
    if (fresh) ++count_;
    return fresh;
  }

  bool erase(const Tuple& t) override {
    size_t i = index(t);
    if (!bits_.get(i)) return false;
    bits_.reset(i);
    --count_;
    return true;
  }

  std::vector<Tuple> rows() const override {
    std::vector<Tuple> out;
    out.reserve(count_);
    bits_.for_each([&](size_t idx) {
      Tuple t(arity_);
      for (int i = arity_ - 1; i >= 0; --i) {
        t[i] = (int64_t)(idx % (size_t)n_);
        idx /= (size_t)n_;
      }
      out.push_back(std::move(t));
    });
    return out;  // for_each walks ascending indices, so already sorted
  }

 private:
  size_t index(const Tuple& t) const {
    size_t idx = 0;
    for (int i = 0; i < arity_; ++i) {
      auto v = t[i];
      if (v < 0 || v >= n_) fail(Err::OutOfDomain, "component " + std::to_string(v));
      idx = idx * (size_t)n_ + (size_t)v;
    }
    return idx;
  }

  int arity_;
  int n_;
  size_t count_ = 0;
  Bits bits_;
};

// Named relations over a shared domain.
class RelationStore {
 public:
  explicit RelationStore(Domain d) : dom_(d) {}

  const Domain& domain() const { return dom_; }

  TupleSet& declare_sparse(const std::string& name, int arity) {
    auto [it, fresh] = rels_.emplace(name, std::make_unique<SparseTupleSet>(arity));
    if (!fresh) fail(Err::UnknownRelation, "redeclared " + name);
    return *it->second;
  }

  TupleSet& declare_dense(const std::string& name, int arity) {
    auto [it, fresh] = rels_.emplace(name, std::make_unique<DenseTupleSet>(arity, dom_.n));
    if (!fresh) fail(Err::UnknownRelation, "redeclared " + name);
    return *it->second;
  }

  bool has(const std::string& name) const { return rels_.count(name) != 0; }

  TupleSet& get(const std::string& name) {
    auto it = rels_.find(name);
    if (it == rels_.end()) fail(Err::UnknownRelation, name);
    return *it->second;
  }
  const TupleSet& get(const std::string& name) const {
    auto it = rels_.find(name);
    if (it == rels_.end()) fail(Err::UnknownRelation, name);
    return *it->second;
  }

 private:
  Domain dom_;
  std::map<std::string, std::unique_ptr<TupleSet>> rels_;
};

enum class ChangeOp { Insert, Delete, Set };

// One update step: a set of tuples entering or leaving a named relation.
// `declared_bound` is the batch-size budget the surrounding script promised.
struct BatchChange {
  ChangeOp op = ChangeOp::Insert;
  std::string relation;
  std::vector<Tuple> tuples;
  size_t declared_bound = 0;
};

// Applies a batch to the store. Inserted tuples must be new, deleted tuples
// must be present; violations roll nothing back because they are detected
// before any mutation.
inline void apply_change(RelationStore& store, const BatchChange& ch) {
  TupleSet& rel = store.get(ch.relation);
  if (ch.declared_bound && ch.tuples.size() > ch.declared_bound) {
    fail(Err::BatchTooLarge,
         ch.relation + ": " + std::to_string(ch.tuples.size()) + " tuples, bound " +
             std::to_string(ch.declared_bound));
  }
  for (const Tuple& t : ch.tuples) {
    if ((int)t.size() != rel.arity()) {
      fail(Err::ArityMismatch, ch.relation + " expects arity " + std::to_string(rel.arity()) +
                                   ", got " + tuple_str(t));
    }
  }
  if (ch.op == ChangeOp::Insert) {
    for (const Tuple& t : ch.tuples) {
      if (rel.contains(t)) fail(Err::AlreadyPresentOnInsert, ch.relation + " " + tuple_str(t));
    }
    // duplicates inside the batch also collide
    for (size_t i = 0; i < ch.tuples.size(); ++i) {
      for (size_t j = i + 1; j < ch.tuples.size(); ++j) {
        if (ch.tuples[i] == ch.tuples[j])
          fail(Err::AlreadyPresentOnInsert, ch.relation + " duplicate " + tuple_str(ch.tuples[i]));
      }
    }
    for (const Tuple& t : ch.tuples) rel.insert(t);
  } else if (ch.op == ChangeOp::Delete) {
    for (const Tuple& t : ch.tuples) {
      if (!rel.contains(t)) fail(Err::NotPresentOnDelete, ch.relation + " " + tuple_str(t));
    }
    for (size_t i = 0; i < ch.tuples.size(); ++i) {
      for (size_t j = i + 1; j < ch.tuples.size(); ++j) {
        if (ch.tuples[i] == ch.tuples[j])
          fail(Err::NotPresentOnDelete, ch.relation + " duplicate " + tuple_str(ch.tuples[i]));
      }
    }
    for (const Tuple& t : ch.tuples) rel.erase(t);
  } else {
    fail(Err::BadQuery, "set batches are applied by the word engine, not the store");
  }
}

}  // namespace dynq

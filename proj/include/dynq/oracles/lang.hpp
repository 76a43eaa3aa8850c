#pragma once

#include <set>
#include <string>
#include <vector>

#include "dynq/cfl/grammar.hpp"
#include "dynq/common.hpp"

namespace dynq::oracle {

// CYK over a CNF grammar. table(x,i,j) says x derives w[i..j], 1-based
// inclusive bounds.
class CykTable {
 public:
  CykTable(const Grammar& g, const std::string& w) : n_((int)w.size()), m_(g.nt_count()) {
    if (n_ == 0) fail(Err::EmptyWord, "CYK needs a nonempty word");
    t_.assign((size_t)m_ * n_ * n_, false);
    for (int i = 1; i <= n_; ++i) {
      for (int x : g.emitters(w[(size_t)i - 1])) at(x, i, i) = true;
    }
    for (int len = 2; len <= n_; ++len) {
      for (int i = 1; i + len - 1 <= n_; ++i) {
        int j = i + len - 1;
        // bodies of length-(i..j) splits are strictly shorter, so one pass
        // per rule suffices in CNF
        for (const auto& r : g.binary()) {
          if (at(r.x, i, j)) continue;
          for (int k = i; k < j; ++k) {
            if (at(r.y, i, k) && at(r.z, k + 1, j)) {
              at(r.x, i, j) = true;
              break;
            }
          }
        }
      }
    }
  }

  bool derives(int x, int i, int j) const {
    return i >= 1 && j <= n_ && i <= j && t_[idx(x, i, j)];
  }

 private:
  std::vector<bool>::reference at(int x, int i, int j) { return t_[idx(x, i, j)]; }
  size_t idx(int x, int i, int j) const {
    return ((size_t)x * n_ + (size_t)(i - 1)) * n_ + (size_t)(j - 1);
  }
  int n_, m_;
  std::vector<bool> t_;
};

inline bool cyk_member(const Grammar& g, const std::string& w) {
  if (w.empty()) return false;
  return CykTable(g, w).derives(g.start(), 1, (int)w.size());
}

// Independent cross-check: generate the language up to length L by expanding
// sentential forms breadth-first. CNF derivations never shrink, so forms
// longer than L are pruned. Only usable for tiny L; `cap` bounds the frontier
// and overflow throws rather than silently truncating the language.
inline std::set<std::string> language_upto(const Grammar& g, int L, size_t cap = 2000000) {
  std::set<std::string> words;
  // sentential form: string of terminals (lowercase) and nonterminal ids
  // encoded as bytes >= 128
  auto enc = [](int x) { return (char)(128 + x); };
  std::set<std::string> seen;
  std::vector<std::string> frontier{std::string(1, enc(g.start()))};
  seen.insert(frontier[0]);
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const std::string& form : frontier) {
      size_t i = 0;
      while (i < form.size() && (unsigned char)form[i] < 128) ++i;
      if (i == form.size()) {
        words.insert(form);
        continue;
      }
      int x = (unsigned char)form[i] - 128;
      for (const auto& r : g.binary()) {
        if (r.x != x) continue;
        if (form.size() + 1 > (size_t)L) continue;
        std::string f = form.substr(0, i) + enc(r.y) + enc(r.z) + form.substr(i + 1);
        if (seen.insert(f).second) next.push_back(std::move(f));
      }
      for (const auto& r : g.term()) {
        if (r.x != x) continue;
        std::string f = form.substr(0, i) + r.a + form.substr(i + 1);
        if (seen.insert(f).second) next.push_back(std::move(f));
      }
      if (seen.size() > cap) fail(Err::PreconditionViolated, "language enumeration overflow");
    }
    frontier = std::move(next);
  }
  return words;
}

}  // namespace dynq::oracle

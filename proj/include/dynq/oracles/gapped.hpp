#pragma once

#include <string>
#include <vector>

#include "dynq/cfl/gapped.hpp"
#include "dynq/cfl/grammar.hpp"
#include "dynq/common.hpp"
#include "dynq/oracles/lang.hpp"

namespace dynq::oracle {

inline bool or_words_detect(uint64_t* dst, const uint64_t* src, size_t words) {
  bool changed = false;
  for (size_t i = 0; i < words; ++i) {
    uint64_t merged = dst[i] | src[i];
    if (merged != dst[i]) {
      dst[i] = merged;
      changed = true;
    }
  }
  return changed;
}

// Reference construction of the gapped-interval relation: start from the
// identity tuples and saturate under the two one-rule consequences, with
// plain-text derivability supplied by an ordinary parse table. The scan
// repeats until nothing moves, so no ordering argument is needed.
inline GappedRel gapped_closure(const Grammar& g, const std::string& w) {
  const int n = (int)w.size();
  const int nts = g.nt_count();
  CykTable cyk(g, w);
  GappedRel r(nts, n);
  r.seed_trivial();

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& rule : g.binary()) {
      for (int i1 = 1; i1 <= n; ++i1) {
        for (int i2 = i1; i2 <= n; ++i2) {
          for (int k = i1; k < i2; ++k) {
            if (cyk.derives(rule.z, k + 1, i2)) {
              for (int y = 0; y < nts; ++y) {
                changed |= or_words_detect(r.block(rule.x, y, i1, i2),
                                           r.block(rule.y, y, i1, k), r.block_words());
              }
            }
            if (cyk.derives(rule.y, i1, k)) {
              for (int y = 0; y < nts; ++y) {
                changed |= or_words_detect(r.block(rule.x, y, i1, i2),
                                           r.block(rule.z, y, k + 1, i2), r.block_words());
              }
            }
          }
        }
      }
    }
  }
  return r;
}

// Definitional check of a single tuple: splice a sentinel letter into the
// hole, extend the grammar with one rule emitting it from the hole symbol,
// and ask a parse table whether the outer symbol derives the spliced text.
inline bool gapped_fact_definitional(const Grammar& g, const std::string& w, int x, int y,
                                     int i1, int j1, int j2, int i2) {
  char sentinel = 0;
  for (char c = 'a'; c <= 'z'; ++c) {
    if (!g.knows_terminal(c)) {
      sentinel = c;
      break;
    }
  }
  if (!sentinel) fail(Err::Internal, "no spare letter for the sentinel");

  // the reparse prunes everything unreachable from the first rule's head,
  // so x's own rules must open the listing
  std::string src;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& rule : g.binary()) {
      if ((rule.x == x) == (pass == 0)) {
        src += g.name(rule.x) + " -> " + g.name(rule.y) + " " + g.name(rule.z) + "\n";
      }
    }
    for (const auto& rule : g.term()) {
      if ((rule.x == x) == (pass == 0)) {
        src += g.name(rule.x) + " -> " + std::string(1, rule.a) + "\n";
      }
    }
    if (pass == 0) src += g.name(y) + " -> " + std::string(1, sentinel) + "\n";
  }
  Grammar g2 = Grammar::parse(src);

  std::string spliced = w.substr((size_t)(i1 - 1), (size_t)(j1 - i1)) + sentinel +
                        w.substr((size_t)j2, (size_t)(i2 - j2));
  // symbol ids survive the reparse only by name
  int x2 = -1, sent_head = -1;
  for (int i = 0; i < g2.nt_count(); ++i) {
    if (g2.name(i) == g.name(x)) x2 = i;
    if (g2.name(i) == g.name(y)) sent_head = i;
  }
  (void)sent_head;
  if (x2 < 0) return false;  // x was pruned: it derives nothing at all
  return CykTable(g2, spliced).derives(x2, 1, (int)spliced.size());
}

}  // namespace dynq::oracle

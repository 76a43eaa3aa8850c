#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "dynq/common.hpp"

namespace dynq {

// Chomsky-normal-form grammar: rules are X -> Y Z or X -> a. The start
// symbol heads the first production. Empty word is outside the language by
// construction.
class Grammar {
 public:
  struct BinRule {
    int x, y, z;
  };
  struct TermRule {
    int x;
    char a;
  };

  // Text format: one production per line, "X -> Y Z" or "X -> a".
  // Nonterminals are uppercase identifiers, terminals single lowercase
  // letters. Unreachable and unproductive nonterminals are pruned here so
  // later passes can assume every symbol matters; the start symbol survives
  // even if its language is empty.
  static Grammar parse(const std::string& text) {
    Grammar g;
    std::map<std::string, int> ids;
    auto intern = [&](const std::string& name) {
      auto [it, fresh] = ids.emplace(name, (int)g.names_.size());
      if (fresh) g.names_.push_back(name);
      return it->second;
    };

    size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
      size_t eol = text.find('\n', pos);
      std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
      pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
      ++line_no;
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);

      std::vector<std::string> toks;
      size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
        size_t j = i;
        while (j < line.size() && !std::isspace((unsigned char)line[j])) ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
      }
      if (toks.empty()) continue;
      if (toks.size() < 3 || toks[1] != "->") {
        fail(Err::GrammarNotInCnf, "line " + std::to_string(line_no) + ": expected 'X -> ...'");
      }
      if (!is_nonterminal(toks[0])) {
        fail(Err::GrammarNotInCnf,
             "line " + std::to_string(line_no) + ": bad nonterminal '" + toks[0] + "'");
      }
      int head = intern(toks[0]);
      if (g.start_ < 0) g.start_ = head;
      if (toks.size() == 3 && is_terminal(toks[2])) {
        g.term_.push_back({head, toks[2][0]});
      } else if (toks.size() == 4 && is_nonterminal(toks[2]) && is_nonterminal(toks[3])) {
        g.bin_.push_back({head, intern(toks[2]), intern(toks[3])});
      } else {
        fail(Err::GrammarNotInCnf,
             "line " + std::to_string(line_no) + ": productions are 'X -> Y Z' or 'X -> a'");
      }
    }
    if (g.start_ < 0) fail(Err::GrammarNotInCnf, "no productions");
    g.prune();
    g.index();
    return g;
  }

  int nt_count() const { return (int)names_.size(); }
  int start() const { return start_; }
  const std::string& name(int x) const { return names_[x]; }
  const std::vector<BinRule>& binary() const { return bin_; }
  const std::vector<TermRule>& term() const { return term_; }

  // heads that can emit terminal a directly
  const std::vector<int>& emitters(char a) const {
    static const std::vector<int> none;
    auto it = by_term_.find(a);
    return it == by_term_.end() ? none : it->second;
  }

  bool knows_terminal(char a) const { return by_term_.count(a) != 0; }

  // terminal alphabet in sorted order; front() is the customary default fill
  std::vector<char> alphabet() const {
    std::vector<char> out;
    for (auto& [a, _] : by_term_) out.push_back(a);
    return out;
  }

 private:
  static bool is_nonterminal(const std::string& s) {
    if (s.empty() || !std::isupper((unsigned char)s[0])) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum((unsigned char)c) || c == '\''; });
  }
  static bool is_terminal(const std::string& s) {
    return s.size() == 1 && std::islower((unsigned char)s[0]);
  }

  void prune() {
    int m = (int)names_.size();
    // productive: derives some terminal string
    std::vector<bool> productive(m, false);
    for (auto& t : term_) productive[t.x] = true;
    for (bool grew = true; grew;) {
      grew = false;
      for (auto& b : bin_) {
        if (!productive[b.x] && productive[b.y] && productive[b.z]) {
          productive[b.x] = true;
          grew = true;
        }
      }
    }
    // reachable from start through productive rules
    std::vector<bool> reach(m, false);
    reach[start_] = true;
    for (bool grew = true; grew;) {
      grew = false;
      for (auto& b : bin_) {
        if (reach[b.x] && productive[b.y] && productive[b.z]) {
          if (!reach[b.y]) reach[b.y] = grew = true;
          if (!reach[b.z]) reach[b.z] = grew = true;
        }
      }
    }
    std::vector<bool> keep(m);
    for (int i = 0; i < m; ++i) keep[i] = (productive[i] && reach[i]) || i == start_;

    std::vector<int> remap(m, -1);
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) {
      if (keep[i]) {
        remap[i] = (int)names.size();
        names.push_back(names_[i]);
      }
    }
    std::vector<BinRule> bin;
    for (auto& b : bin_) {
      if (keep[b.x] && keep[b.y] && keep[b.z] && productive[b.y] && productive[b.z]) {
        bin.push_back({remap[b.x], remap[b.y], remap[b.z]});
      }
    }
    std::vector<TermRule> term;
    for (auto& t : term_) {
      if (keep[t.x]) term.push_back({remap[t.x], t.a});
    }
    names_ = std::move(names);
    bin_ = std::move(bin);
    term_ = std::move(term);
    start_ = remap[start_];
  }

  void index() {
    by_term_.clear();
    for (auto& t : term_) by_term_[t.a].push_back(t.x);
    for (auto& [a, v] : by_term_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }

  std::vector<std::string> names_;
  std::vector<BinRule> bin_;
  std::vector<TermRule> term_;
  std::map<char, std::vector<int>> by_term_;
  int start_ = -1;
};

}  // namespace dynq

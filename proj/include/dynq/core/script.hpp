#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynq/core/relation.hpp"

namespace dynq {

enum class StructKind { Digraph, Ugraph, Dag, Forest, Word, Wgraph };

inline const char* kind_name(StructKind k) {
  switch (k) {
    case StructKind::Digraph: return "digraph";
    case StructKind::Ugraph: return "ugraph";
    case StructKind::Dag: return "dag";
    case StructKind::Forest: return "forest";
    case StructKind::Word: return "word";
    case StructKind::Wgraph: return "wgraph";
  }
  return "?";
}

inline std::optional<StructKind> kind_from(const std::string& s) {
  if (s == "digraph") return StructKind::Digraph;
  if (s == "ugraph") return StructKind::Ugraph;
  if (s == "dag") return StructKind::Dag;
  if (s == "forest") return StructKind::Forest;
  if (s == "word") return StructKind::Word;
  if (s == "wgraph") return StructKind::Wgraph;
  return std::nullopt;
}

enum class QueryKind { Reach, Dist, Member, Tiso, Msf, Matching, Coloring };

inline const char* query_name(QueryKind q) {
  switch (q) {
    case QueryKind::Reach: return "reach";
    case QueryKind::Dist: return "dist";
    case QueryKind::Member: return "member";
    case QueryKind::Tiso: return "tiso";
    case QueryKind::Msf: return "msf";
    case QueryKind::Matching: return "matching";
    case QueryKind::Coloring: return "coloring";
  }
  return "?";
}

struct Query {
  QueryKind kind;
  std::vector<int64_t> args;
};

struct ScriptStep {
  // exactly one of change/query is meaningful
  bool is_query = false;
  BatchChange change;
  Query query;
  int line = 0;
};

struct ChangeScript {
  int n = 0;
  StructKind kind = StructKind::Digraph;
  size_t batch_bound = 0;
  std::string grammar_path;   // word scripts
  std::string default_symbol; // word scripts; empty means first grammar terminal
  int delta = -1;             // degree bound for coloring; -1 if absent
  std::vector<ScriptStep> steps;
};

namespace detail {

[[noreturn]] inline void syntax(int line, int col, const std::string& what) {
  fail(Err::SyntaxError, "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace((unsigned char)s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// "(a,b,c)" -> fields as raw strings
inline std::vector<std::string> tuple_fields(const std::string& tok, int line, int col) {
  if (tok.size() < 2 || tok.front() != '(' || tok.back() != ')') {
    syntax(line, col, "expected (v,...) tuple, got '" + tok + "'");
  }
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 1; i + 1 < tok.size(); ++i) {
    if (tok[i] == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += tok[i];
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    if (f.empty()) syntax(line, col, "empty tuple field in '" + tok + "'");
  }
  return out;
}

inline int64_t parse_int(const std::string& s, int line, int col) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) syntax(line, col, "trailing junk in number '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    syntax(line, col, "expected integer, got '" + s + "'");
  }
}

inline int col_of_token(const std::string& raw, const std::string& tok, int occurrence) {
  // best-effort column for diagnostics: start of the occurrence-th token
  size_t pos = 0;
  for (int k = 0; k <= occurrence; ++k) {
    pos = raw.find(tok, pos);
    if (pos == std::string::npos) return 1;
    if (k < occurrence) pos += tok.size();
  }
  return (int)pos + 1;
}

}  // namespace detail

// Default per-step batch budget: ceil(log2 n)^3, floored at 1. Scripts may
// override it in the init line.
inline size_t default_batch_bound(int n) {
  int lg = ceil_log2_succ((uint64_t)(n > 1 ? n - 1 : 0));  // ceil(log2 n)
  size_t b = (size_t)lg * lg * lg;
  return b ? b : 1;
}

inline ChangeScript parse_script(const std::string& text) {
  using namespace detail;
  ChangeScript sc;
  bool have_init = false;
  int line_no = 0;
  size_t pos = 0;

  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string raw = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string body = raw;
    if (auto h = body.find('#'); h != std::string::npos) body.resize(h);
    auto toks = split_ws(body);
    if (toks.empty()) continue;

    if (!have_init) {
      if (toks[0] != "init") syntax(line_no, 1, "first statement must be init");
      int64_t n = -1;
      std::optional<StructKind> kind;
      int64_t bound = -1;
      for (size_t i = 1; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        int col = col_of_token(raw, toks[i], 0);
        if (eq == std::string::npos) syntax(line_no, col, "expected key=value, got '" + toks[i] + "'");
        std::string key = toks[i].substr(0, eq), val = toks[i].substr(eq + 1);
        if (key == "n") {
          n = parse_int(val, line_no, col);
        } else if (key == "kind") {
          kind = kind_from(val);
          if (!kind) syntax(line_no, col, "unknown kind '" + val + "'");
        } else if (key == "grammar") {
          sc.grammar_path = val;
        } else if (key == "delta") {
          sc.delta = (int)parse_int(val, line_no, col);
          if (sc.delta < 0) syntax(line_no, col, "delta must be nonnegative");
        } else if (key == "default") {
          sc.default_symbol = val;
        } else if (key == "bound") {
          bound = parse_int(val, line_no, col);
          if (bound < 1) syntax(line_no, col, "bound must be positive");
        } else {
          syntax(line_no, col, "unknown init key '" + key + "'");
        }
      }
      if (n < 1) syntax(line_no, 1, "init requires n>=1");
      if (!kind) syntax(line_no, 1, "init requires kind=");
      sc.n = (int)n;
      sc.kind = *kind;
      sc.batch_bound = bound > 0 ? (size_t)bound : default_batch_bound(sc.n);
      have_init = true;
      continue;
    }

    ScriptStep step;
    step.line = line_no;

    if (toks[0] == "ins" || toks[0] == "del") {
      if (toks.size() < 2) syntax(line_no, 1, toks[0] + " needs a relation name");
      step.change.op = toks[0] == "ins" ? ChangeOp::Insert : ChangeOp::Delete;
      step.change.relation = toks[1];
      step.change.declared_bound = sc.batch_bound;
      int arity = -1;
      for (size_t i = 2; i < toks.size(); ++i) {
        int col = col_of_token(raw, toks[i], 0);
        auto fields = tuple_fields(toks[i], line_no, col);
        if (arity == -1) arity = (int)fields.size();
        if ((int)fields.size() != arity) syntax(line_no, col, "mixed tuple arity in batch");
        Tuple t;
        for (auto& f : fields) {
          int64_t v = parse_int(f, line_no, col);
          t.push_back(v);
        }
        // node components live in [0,n); the weight slot of wgraph triples is
        // only bounded above
        size_t node_slots = (sc.kind == StructKind::Wgraph && t.size() == 3) ? 2 : t.size();
        for (size_t s = 0; s < node_slots; ++s) {
          if (t[s] < 0 || t[s] >= sc.n)
            fail(Err::OutOfDomain, "line " + std::to_string(line_no) + ": node " + std::to_string(t[s]));
        }
        if (sc.kind == StructKind::Wgraph && t.size() == 3) {
          if (t[2] < 0 || t[2] > (int64_t(1) << 62))
            fail(Err::OutOfDomain, "line " + std::to_string(line_no) + ": weight " + std::to_string(t[2]));
        }
        step.change.tuples.push_back(std::move(t));
      }
      if (step.change.tuples.size() > sc.batch_bound) {
        fail(Err::BatchTooLarge, "line " + std::to_string(line_no) + ": batch of " +
                                     std::to_string(step.change.tuples.size()) + " exceeds bound " +
                                     std::to_string(sc.batch_bound));
      }
    } else if (toks[0] == "set") {
      if (sc.kind != StructKind::Word) syntax(line_no, 1, "set is only valid for word scripts");
      step.change.op = ChangeOp::Set;
      step.change.relation = "W";
      step.change.declared_bound = sc.batch_bound;
      for (size_t i = 1; i < toks.size(); ++i) {
        int col = col_of_token(raw, toks[i], 0);
        auto fields = tuple_fields(toks[i], line_no, col);
        if (fields.size() != 2) syntax(line_no, col, "set expects (position,symbol)");
        int64_t p = parse_int(fields[0], line_no, col);
        if (p < 1 || p > sc.n)
          fail(Err::OutOfDomain, "line " + std::to_string(line_no) + ": position " + std::to_string(p));
        if (fields[1].size() != 1 || !std::islower((unsigned char)fields[1][0]))
          syntax(line_no, col, "symbol must be one lowercase letter, got '" + fields[1] + "'");
        for (auto& prev : step.change.tuples) {
          if (prev[0] == p)
            fail(Err::AlreadyPresentOnInsert,
                 "line " + std::to_string(line_no) + ": position " + std::to_string(p) + " set twice");
        }
        step.change.tuples.push_back({p, (int64_t)fields[1][0]});
      }
      if (step.change.tuples.size() > sc.batch_bound) {
        fail(Err::BatchTooLarge, "line " + std::to_string(line_no) + ": batch exceeds bound");
      }
    } else if (toks[0] == "query") {
      if (toks.size() < 2) syntax(line_no, 1, "query needs a kind");
      step.is_query = true;
      const std::string& q = toks[1];
      size_t want_args = 0;
      if (q == "reach") {
        step.query.kind = QueryKind::Reach;
        want_args = 2;
      } else if (q == "dist") {
        step.query.kind = QueryKind::Dist;
        want_args = 2;
      } else if (q == "member") {
        step.query.kind = QueryKind::Member;
      } else if (q == "tiso") {
        step.query.kind = QueryKind::Tiso;
        want_args = 4;
      } else if (q == "msf") {
        step.query.kind = QueryKind::Msf;
      } else if (q == "matching") {
        step.query.kind = QueryKind::Matching;
      } else if (q == "coloring") {
        step.query.kind = QueryKind::Coloring;
      } else {
        syntax(line_no, col_of_token(raw, q, 0), "unknown query '" + q + "'");
      }
      if (toks.size() - 2 != want_args)
        syntax(line_no, 1, "query " + q + " takes " + std::to_string(want_args) + " arguments");
      for (size_t i = 2; i < toks.size(); ++i) {
        int col = col_of_token(raw, toks[i], 0);
        int64_t v = parse_int(toks[i], line_no, col);
        if (v < 0 || v >= sc.n)
          fail(Err::OutOfDomain, "line " + std::to_string(line_no) + ": node " + std::to_string(v));
        step.query.args.push_back(v);
      }
    } else {
      syntax(line_no, 1, "unknown statement '" + toks[0] + "'");
    }
    sc.steps.push_back(std::move(step));
  }

  if (!have_init) fail(Err::MissingHeader, "script has no init line");
  return sc;
}

}  // namespace dynq

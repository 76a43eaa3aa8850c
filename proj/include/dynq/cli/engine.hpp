#pragma once

#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynq/cfl/cfl.hpp"
#include "dynq/cfl/grammar.hpp"
#include "dynq/common.hpp"
#include "dynq/core/meter.hpp"
#include "dynq/core/script.hpp"
#include "dynq/dist/distance.hpp"
#include "dynq/oracles/graph.hpp"
#include "dynq/oracles/lang.hpp"
#include "dynq/oracles/span.hpp"
#include "dynq/oracles/tree.hpp"
#include "dynq/reach/reach.hpp"
#include "dynq/smallstruct/coloring.hpp"
#include "dynq/smallstruct/matching.hpp"
#include "dynq/smallstruct/msf.hpp"
#include "dynq/tree/treeiso.hpp"

namespace dynq {

struct StepRow {
  int step = 0;
  int line = 0;
  size_t m = 0;
  uint64_t rounds = 0;
  uint64_t bound = 0;
  std::vector<std::pair<std::string, uint64_t>> blocks;
  double wall_ms = 0.0;
};

struct QueryRow {
  int line = 0;
  std::string text;
  std::string answer;
};

struct RunReport {
  std::vector<StepRow> steps;
  std::vector<QueryRow> answers;
};

struct EngineOptions {
  bool verify = false;
  int max_n = 4096;
  std::string base_dir = ".";       // grammar paths resolve against this
  std::string grammar_text;         // overrides file loading when nonempty
};

inline std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::SyntaxError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Renders the per-step table, then the query answers when any were asked.
// Wall time is the only nondeterministic column, so it can be left out to
// make replays byte-comparable.
inline std::string render_report(const RunReport& rep, bool with_wall) {
  std::ostringstream out;
  out << "step,line,m,rounds,bound,blocks";
  if (with_wall) out << ",wall_ms";
  out << "\n";
  for (const StepRow& r : rep.steps) {
    out << r.step << "," << r.line << "," << r.m << "," << r.rounds << "," << r.bound << ",";
    if (r.blocks.empty()) {
      out << "-";
    } else {
      for (size_t i = 0; i < r.blocks.size(); ++i) {
        if (i) out << ";";
        out << r.blocks[i].first << ":" << r.blocks[i].second;
      }
    }
    if (with_wall) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.3f", r.wall_ms);
      out << buf;
    }
    out << "\n";
  }
  if (!rep.answers.empty()) {
    out << "\nquery,line,answer\n";
    for (const QueryRow& q : rep.answers) {
      out << q.text << "," << q.line << ",\"" << q.answer << "\"\n";
    }
  }
  return out.str();
}

// Executes one parsed script against the maintainer matching its kind:
// digraph -> reachability; dag -> distances; ugraph -> distances plus the
// matching maintainer, or the coloring maintainer when delta= is given;
// forest -> tree isomorphism; word -> grammar membership; wgraph -> minimum
// spanning forest. With verify on, the module's oracle re-derives the
// queried structure from scratch after every change step.
class Engine {
 public:
  Engine(ChangeScript sc, EngineOptions opt) : sc_(std::move(sc)), opt_(std::move(opt)) {
    if (sc_.n > opt_.max_n) {
      fail(Err::OutOfDomain,
           "n=" + std::to_string(sc_.n) + " exceeds the cap of " + std::to_string(opt_.max_n));
    }
    switch (sc_.kind) {
      case StructKind::Digraph:
        reach_ = std::make_unique<ReachMaintainer>(sc_.n);
        break;
      case StructKind::Dag:
        dist_ = std::make_unique<DistanceMaintainer>(sc_.n, DistKind::Dag);
        break;
      case StructKind::Ugraph:
        if (sc_.delta >= 0) {
          coloring_ = std::make_unique<ColoringMaintainer>(sc_.n, sc_.delta);
        } else {
          dist_ = std::make_unique<DistanceMaintainer>(sc_.n, DistKind::Undirected);
          matching_ = std::make_unique<MatchingMaintainer>(sc_.n);
        }
        break;
      case StructKind::Forest:
        treeiso_ = std::make_unique<TreeIsoMaintainer>(sc_.n);
        break;
      case StructKind::Wgraph:
        msf_ = std::make_unique<MsfMaintainer>(sc_.n);
        break;
      case StructKind::Word: {
        if (sc_.grammar_path.empty() && opt_.grammar_text.empty())
          fail(Err::MissingHeader, "word scripts need grammar=<path>");
        std::string gtext = opt_.grammar_text;
        if (gtext.empty()) gtext = slurp_file(opt_.base_dir + "/" + sc_.grammar_path);
        grammar_ = std::make_unique<Grammar>(Grammar::parse(gtext));
        char fill;
        if (sc_.default_symbol.empty()) {
          fill = grammar_->alphabet().front();
        } else {
          if (sc_.default_symbol.size() != 1)
            fail(Err::UnknownSymbol, "default symbol must be one letter");
          fill = sc_.default_symbol[0];
          if (!grammar_->knows_terminal(fill))
            fail(Err::UnknownSymbol, std::string("default symbol '") + fill + "' not in grammar");
        }
        cfl_ = std::make_unique<CflMaintainer>(*grammar_, std::string((size_t)sc_.n, fill));
        break;
      }
    }
  }

  RunReport run() {
    RunReport rep;
    int step_no = 0;
    for (const ScriptStep& st : sc_.steps) {
      if (st.is_query) {
        rep.answers.push_back(answer(st));
        continue;
      }
      StepRow row;
      row.step = ++step_no;
      row.line = st.line;
      row.m = st.change.tuples.size();
      auto t0 = std::chrono::steady_clock::now();
      apply_change_step(st.change, row);
      auto t1 = std::chrono::steady_clock::now();
      row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      rep.steps.push_back(std::move(row));
      if (opt_.verify) verify_step(st.line);
    }
    return rep;
  }

 private:
  using Pairs = std::vector<std::pair<int, int>>;

  static void split_tuples(const BatchChange& ch, Pairs& dels, Pairs& inss) {
    Pairs& dst = ch.op == ChangeOp::Delete ? dels : inss;
    for (const Tuple& t : ch.tuples) {
      if (t.size() != 2) fail(Err::ArityMismatch, ch.relation + " expects pairs");
      dst.push_back({(int)t[0], (int)t[1]});
    }
  }

  void apply_change_step(const BatchChange& ch, StepRow& row) {
    RoundMeter meter;
    if (sc_.kind == StructKind::Word) {
      if (ch.op != ChangeOp::Set) fail(Err::BadQuery, "word scripts take set batches only");
      std::vector<std::pair<int, char>> changes;
      for (const Tuple& t : ch.tuples) changes.push_back({(int)t[0], (char)t[1]});
      cfl_->apply_set(changes, meter);
      fold_meter(row, meter);
      return;
    }
    if (ch.op == ChangeOp::Set) fail(Err::BadQuery, "set batches only apply to word scripts");
    if (ch.relation != "E") fail(Err::UnknownRelation, ch.relation);

    if (sc_.kind == StructKind::Wgraph) {
      Pairs dels;
      std::vector<WeightedEdge> inss;
      for (const Tuple& t : ch.tuples) {
        if (ch.op == ChangeOp::Delete) {
          if (t.size() != 2) fail(Err::ArityMismatch, "wgraph deletes take (u,v)");
          dels.push_back({(int)t[0], (int)t[1]});
        } else {
          if (t.size() != 3) fail(Err::ArityMismatch, "wgraph inserts take (u,v,w)");
          inss.push_back({(int)t[0], (int)t[1], t[2]});
        }
      }
      msf_->apply(dels, inss, meter);
      fold_meter(row, meter);
      return;
    }

    Pairs dels, inss;
    split_tuples(ch, dels, inss);
    switch (sc_.kind) {
      case StructKind::Digraph:
        reach_->apply(dels, inss, meter);
        fold_meter(row, meter);
        break;
      case StructKind::Dag:
        dist_->apply(dels, inss, meter);
        fold_meter(row, meter);
        break;
      case StructKind::Ugraph:
        if (coloring_) {
          coloring_->apply(dels, inss, meter);
          fold_meter(row, meter);
        } else {
          dist_->apply(dels, inss, meter);
          fold_meter(row, meter);
          RoundMeter mm;
          matching_->apply(dels, inss, mm);
          for (const auto& b : mm.block_events) row.blocks.push_back(b);
        }
        break;
      case StructKind::Forest:
        treeiso_->apply(dels, inss, meter);
        fold_meter(row, meter);
        break;
      default:
        fail(Err::Internal, "unhandled script kind");
    }
  }

  static void fold_meter(StepRow& row, const RoundMeter& meter) {
    row.rounds = meter.rounds_used;
    row.bound = meter.bound;
    for (const auto& b : meter.block_events) row.blocks.push_back(b);
  }

  QueryRow answer(const ScriptStep& st) {
    QueryRow q;
    q.line = st.line;
    std::ostringstream text;
    text << query_name(st.query.kind);
    for (int64_t a : st.query.args) text << " " << a;
    q.text = text.str();
    q.answer = answer_text(st.query);
    return q;
  }

  std::string answer_text(const Query& q) {
    switch (q.kind) {
      case QueryKind::Reach: {
        int s = (int)q.args[0], t = (int)q.args[1];
        if (reach_) return reach_->reach_query(s, t) ? "true" : "false";
        if (dist_) return dist_->reach_view(s, t) ? "true" : "false";
        break;
      }
      case QueryKind::Dist: {
        if (!dist_) break;
        int64_t d = dist_->dist((int)q.args[0], (int)q.args[1]);
        return d < 0 ? "inf" : std::to_string(d);
      }
      case QueryKind::Member:
        if (!cfl_) break;
        return cfl_->member() ? "true" : "false";
      case QueryKind::Tiso:
        if (!treeiso_) break;
        return treeiso_->t_iso((int)q.args[0], (int)q.args[1], (int)q.args[2], (int)q.args[3])
                   ? "true"
                   : "false";
      case QueryKind::Msf: {
        if (!msf_) break;
        std::ostringstream out;
        auto forest = msf_->forest();
        for (size_t i = 0; i < forest.size(); ++i) {
          if (i) out << " ";
          out << "(" << forest[i].u << "," << forest[i].v << "," << forest[i].w << ")";
        }
        out << (forest.empty() ? "weight=0" : " weight=" + std::to_string(msf_->forest_weight()));
        return out.str();
      }
      case QueryKind::Matching: {
        if (!matching_) break;
        std::ostringstream out;
        auto m = matching_->matching();
        if (m.empty()) return "empty";
        for (size_t i = 0; i < m.size(); ++i) {
          if (i) out << " ";
          out << "(" << m[i].first << "," << m[i].second << ")";
        }
        return out.str();
      }
      case QueryKind::Coloring: {
        if (!coloring_) break;
        std::ostringstream out;
        for (int v = 0; v < coloring_->n(); ++v) {
          if (v) out << " ";
          out << v << ":" << coloring_->color_of(v);
        }
        return out.str();
      }
    }
    fail(Err::BadQuery, std::string(query_name(q.kind)) + " is not answerable by a " +
                            kind_name(sc_.kind) + " script" +
                            (sc_.delta >= 0 ? " with delta=" : ""));
  }

  [[noreturn]] static void diverged(int line, const std::string& what) {
    fail(Err::Internal, "verify failed after line " + std::to_string(line) + ": " + what);
  }

  void verify_step(int line) {
    switch (sc_.kind) {
      case StructKind::Digraph: {
        oracle::EdgeList g;
        g.n = sc_.n;
        g.directed = true;
        g.edges = reach_->arcs();
        auto want = oracle::dfs_reach_all(g);
        for (int u = 0; u < sc_.n; ++u) {
          for (int v = 0; v < sc_.n; ++v) {
            if (reach_->reach_query(u, v) != want[(size_t)u].get((size_t)v))
              diverged(line, "reach " + std::to_string(u) + " " + std::to_string(v));
          }
        }
        break;
      }
      case StructKind::Dag:
      case StructKind::Ugraph: {
        if (coloring_) {
          std::string why;
          if (!oracle::check_coloring(sc_.n, coloring_->edges(), coloring_->coloring(),
                                      sc_.delta + 1, &why))
            diverged(line, why);
          break;
        }
        oracle::EdgeList g;
        g.n = sc_.n;
        g.directed = (sc_.kind == StructKind::Dag);
        g.edges = dist_->edges();
        auto want = oracle::bfs_all_pairs(g);
        for (int u = 0; u < sc_.n; ++u) {
          for (int v = 0; v < sc_.n; ++v) {
            if (dist_->dist(u, v) != want[(size_t)u][(size_t)v])
              diverged(line, "dist " + std::to_string(u) + " " + std::to_string(v));
          }
        }
        if (matching_) {
          std::string why;
          if (!oracle::check_matching_maximal(sc_.n, matching_->edges(), matching_->matching(),
                                              &why))
            diverged(line, why);
        }
        break;
      }
      case StructKind::Wgraph: {
        std::vector<oracle::WEdge> all;
        for (const auto& e : msf_->edge_list()) all.push_back({e.u, e.v, e.w});
        auto want = oracle::kruskal(sc_.n, all);
        auto got = msf_->forest();
        bool same = got.size() == want.size();
        for (size_t i = 0; same && i < got.size(); ++i) {
          same = got[i].u == want[i].u && got[i].v == want[i].v && got[i].w == want[i].w;
        }
        if (!same) diverged(line, "forest differs from the sorting oracle");
        break;
      }
      case StructKind::Word:
        if (cfl_->member() != oracle::cyk_member(*grammar_, cfl_->word()))
          diverged(line, "membership of '" + cfl_->word() + "'");
        break;
      case StructKind::Forest:
        verify_forest(line);
        break;
    }
  }

  // whole-subtree relation against canonical codes, plus a direct recount of
  // every sibling multiplicity
  void verify_forest(int line) {
    const int n = sc_.n;
    oracle::ForestView f(n);
    for (int v = 0; v < n; ++v) {
      int p = treeiso_->parent_of(v);
      if (p >= 0) f.add_edge(p, v);
    }
    struct Anchored {
      int x, r;
      uint64_t mask;
      std::string code;
    };
    std::vector<Anchored> subs;
    for (int x = 0; x < n; ++x) {
      auto dx = oracle::tree_dist_from(f, x);
      for (int r = 0; r < n; ++r) {
        if (dx[(size_t)r] < 0) continue;
        Anchored a;
        a.x = x;
        a.r = r;
        a.mask = 0;
        for (int v : oracle::subtree_nodes(f, x, r)) a.mask |= 1ull << v;
        a.code = oracle::ahu_code(f, x, r);
        subs.push_back(std::move(a));
      }
    }
    for (size_t i = 0; i < subs.size(); ++i) {
      for (size_t j = i + 1; j < subs.size(); ++j) {
        if (subs[i].mask & subs[j].mask) continue;
        bool want = subs[i].code == subs[j].code;
        if (treeiso_->t_iso(subs[i].x, subs[i].r, subs[j].x, subs[j].r) != want)
          diverged(line, "tiso " + std::to_string(subs[i].x) + " " + std::to_string(subs[i].r) +
                             " " + std::to_string(subs[j].x) + " " + std::to_string(subs[j].r));
      }
    }
    for (const Anchored& a : subs) {
      for (int y = 0; y < n; ++y) {
        if (!((a.mask >> y) & 1u) || y == a.r) continue;
        int q = oracle::neighbor_toward(f, y, a.x == y ? a.r : a.x);
        int block = oracle::neighbor_toward(f, q, a.x);
        int want = 0;
        std::string mine = oracle::ahu_code(f, q, y);
        for (int s : f.adj[(size_t)q]) {
          if (s == block || s == y) continue;
          if (oracle::ahu_code(f, q, s) == mine) want += 1;
        }
        if (treeiso_->iso_sibling_count(a.x, a.r, y) != want)
          diverged(line, "sibling count of " + std::to_string(y) + " under (" +
                             std::to_string(a.x) + "," + std::to_string(a.r) + ")");
      }
    }
  }

  ChangeScript sc_;
  EngineOptions opt_;
  std::unique_ptr<ReachMaintainer> reach_;
  std::unique_ptr<DistanceMaintainer> dist_;
  std::unique_ptr<MatchingMaintainer> matching_;
  std::unique_ptr<ColoringMaintainer> coloring_;
  std::unique_ptr<TreeIsoMaintainer> treeiso_;
  std::unique_ptr<MsfMaintainer> msf_;
  std::unique_ptr<Grammar> grammar_;
  std::unique_ptr<CflMaintainer> cfl_;
};

}  // namespace dynq

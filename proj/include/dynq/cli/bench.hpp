#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "dynq/cli/engine.hpp"
#include "dynq/common.hpp"
#include "dynq/core/script.hpp"

namespace dynq {

struct BenchRow {
  int step = 0;
  int line = 0;
  size_t m = 0;
  uint64_t rounds = 0;
  uint64_t bound = 0;
  double median_wall_ms = 0.0;
};

// Replays the script `reps` times on fresh engines and reports the median
// wall time per change step. The round counts must agree across repetitions;
// a mismatch means the fixpoint loop is nondeterministic, which is a bug
// worth crashing over.
inline std::vector<BenchRow> bench_script(const ChangeScript& sc, const EngineOptions& base,
                                          int reps) {
  if (reps < 1) fail(Err::OutOfDomain, "reps must be positive");
  std::vector<BenchRow> rows;
  std::vector<std::vector<double>> walls;
  for (int rep = 0; rep < reps; ++rep) {
    EngineOptions opt = base;
    opt.verify = false;
    Engine eng(sc, opt);
    RunReport out = eng.run();
    if (rep == 0) {
      rows.resize(out.steps.size());
      walls.resize(out.steps.size());
      for (size_t i = 0; i < out.steps.size(); ++i) {
        rows[i].step = out.steps[i].step;
        rows[i].line = out.steps[i].line;
        rows[i].m = out.steps[i].m;
        rows[i].rounds = out.steps[i].rounds;
        rows[i].bound = out.steps[i].bound;
      }
    } else {
      if (out.steps.size() != rows.size()) fail(Err::Internal, "step count changed between runs");
      for (size_t i = 0; i < rows.size(); ++i) {
        if (out.steps[i].rounds != rows[i].rounds)
          fail(Err::Internal, "round count changed between runs at step " +
                                  std::to_string(rows[i].step));
      }
    }
    for (size_t i = 0; i < out.steps.size(); ++i) walls[i].push_back(out.steps[i].wall_ms);
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    std::sort(walls[i].begin(), walls[i].end());
    size_t k = walls[i].size();
    rows[i].median_wall_ms =
        k % 2 ? walls[i][k / 2] : 0.5 * (walls[i][k / 2 - 1] + walls[i][k / 2]);
  }
  return rows;
}

inline std::string render_bench(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "step,line,m,rounds,bound,median_wall_ms\n";
  for (const BenchRow& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.median_wall_ms);
    out << r.step << "," << r.line << "," << r.m << "," << r.rounds << "," << r.bound << ","
        << buf << "\n";
  }
  return out.str();
}

}  // namespace dynq

// Command line front end: run a change script against the maintainer for its
// structure kind, generate scripts, or benchmark one. Exit code 0 means
// success, 1 means a broken internal promise (verification mismatch, fixpoint
// overrun, nondeterministic rounds), 2 means bad input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dynq/cli/bench.hpp"
#include "dynq/cli/engine.hpp"
#include "dynq/cli/gen.hpp"

namespace {

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) dynq::fail(dynq::Err::SyntaxError, "cannot write '" + path + "'");
  out << text;
}

std::string dir_of(const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

// Scripts resolve their grammar= path relative to the script file, so when a
// grammar sits next to the --out target rather than the working directory,
// look for it there too before giving up.
std::string slurp_grammar(const std::string& grammar, const std::string& out_path) {
  std::error_code ec;
  if (!std::filesystem::exists(grammar, ec) && !out_path.empty()) {
    std::string beside = dir_of(out_path) + "/" + grammar;
    if (std::filesystem::exists(beside, ec)) return dynq::slurp_file(beside);
  }
  return dynq::slurp_file(grammar);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch-dynamic structure maintenance over change scripts"};
  app.require_subcommand(1);

  std::string script_path;
  std::string report_mode = "rounds";
  std::string out_path;
  bool verify = false;
  int max_n = 4096;

  CLI::App* run = app.add_subcommand("run", "replay a change script and report per-step rounds");
  run->add_option("script", script_path, "script file")->required();
  run->add_flag("--verify", verify, "recompute every queried structure from scratch after each step");
  run->add_option("--report", report_mode, "rounds (deterministic) or csv (adds wall_ms)")
      ->check(CLI::IsMember({"rounds", "csv"}));
  run->add_option("--max-n", max_n, "largest accepted domain size");
  run->add_option("--out", out_path, "write the report here instead of stdout");

  std::string gen_kind = "digraph";
  int gen_n = 16, gen_steps = 20, gen_batch = 0, gen_delta = -1;
  uint64_t gen_seed = 1;
  std::string gen_grammar;
  bool no_queries = false;

  CLI::App* gen = app.add_subcommand("gen", "generate a deterministic change script");
  gen->add_option("--kind", gen_kind,
                  "digraph, dag, ugraph, forest, word, wgraph, or bench-dist")
      ->required();
  gen->add_option("--n", gen_n, "domain size");
  gen->add_option("--steps", gen_steps, "number of change lines");
  gen->add_option("--batch", gen_batch, "per-line tuple cap (0: script default)");
  gen->add_option("--delta", gen_delta, "degree bound; >= 0 makes a ugraph a coloring script");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--grammar", gen_grammar, "grammar file, required for word scripts");
  gen->add_flag("--no-queries", no_queries, "emit change lines only");
  gen->add_option("--out", out_path, "write the script here instead of stdout");

  int reps = 3;
  CLI::App* bench = app.add_subcommand("bench", "replay a script repeatedly and time each step");
  bench->add_option("script", script_path, "script file")->required();
  bench->add_option("--reps", reps, "repetitions per measurement");
  bench->add_option("--max-n", max_n, "largest accepted domain size");
  bench->add_option("--out", out_path, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(run)) {
      dynq::ChangeScript sc = dynq::parse_script(dynq::slurp_file(script_path));
      dynq::EngineOptions opt;
      opt.verify = verify;
      opt.max_n = max_n;
      opt.base_dir = dir_of(script_path);
      dynq::Engine eng(std::move(sc), opt);
      dynq::RunReport rep = eng.run();
      write_out(out_path, dynq::render_report(rep, report_mode == "csv"));
    } else if (app.got_subcommand(gen)) {
      if (gen_kind == "bench-dist") {
        write_out(out_path, dynq::gen_bench_dist());
      } else {
        auto kind = dynq::kind_from(gen_kind);
        if (!kind) dynq::fail(dynq::Err::SyntaxError, "unknown kind '" + gen_kind + "'");
        dynq::GenSpec spec;
        spec.kind = *kind;
        spec.n = gen_n;
        spec.steps = gen_steps;
        spec.batch = gen_batch;
        spec.delta = gen_delta;
        spec.seed = gen_seed;
        spec.queries = !no_queries;
        if (*kind == dynq::StructKind::Word) {
          if (gen_grammar.empty())
            dynq::fail(dynq::Err::MissingHeader, "word scripts need --grammar");
          spec.grammar_path = gen_grammar;
          spec.grammar_text = slurp_grammar(gen_grammar, out_path);
        }
        write_out(out_path, dynq::gen_script(spec));
      }
    } else if (app.got_subcommand(bench)) {
      dynq::ChangeScript sc = dynq::parse_script(dynq::slurp_file(script_path));
      dynq::EngineOptions opt;
      opt.max_n = max_n;
      opt.base_dir = dir_of(script_path);
      auto rows = dynq::bench_script(sc, opt, reps);
      write_out(out_path, dynq::render_bench(rows));
    }
  } catch (const dynq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    bool internal = e.kind() == dynq::Err::Internal ||
                    e.kind() == dynq::Err::BoundExceededWithoutFixpoint;
    return internal ? 1 : 2;
  }
  return 0;
}

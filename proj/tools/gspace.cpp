#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

namespace {

void common_flags(CLI::App* app, gspace::cli::CommonOptions& c) {
  app->add_option("-c,--config", c.config, "Instance document, or the name of a shipped fixture")->required();
  app->add_option("--tol-prox", c.tol_prox, "Override eps_prox");
  app->add_option("--tol-zero", c.tol_zero, "Override eps_zero");
  app->add_option("--seed", c.seed, "Seed for subsampled scans");
  app->add_option("--max-tuples", c.max_tuples, "Scan cap before subsampling (0 = exhaustive)");
  app->add_flag("--json", c.json, "Print the structured report instead of text");
  app->add_option("-o,--out", c.out, "Write the structured report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gspace::cli;
  CLI::App app{"Checkers and fixed-point solvers for g-spaces"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Run hypothesis checks on an instance");
  common_flags(v, verify.common);
  v->add_option("-k,--check", verify.checks, "kind[:function][:key=value...], repeatable")->required();
  v->add_option("--replay", verify.replay, "Re-evaluate one witness: role=(..);role=(..)");

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Run a solver and write its trace");
  common_flags(s, solve.common);
  s->add_option("scheme", solve.scheme, "picard | power | proximal | berinde")->required();
  s->add_option("--function", solve.function, "Function name (default g)");
  s->add_option("--map", solve.map, "Map name");
  s->add_option("--from", solve.from, "Start point, e.g. \"(0,1)\"");
  s->add_option("--alpha", solve.alpha, "Contraction constant (estimated when omitted)");
  s->add_option("--n0", solve.n0, "Power of the map for the power scheme");
  s->add_option("--stages", solve.stages, "Stages of the harmonic schedule for berinde");
  s->add_option("--N", solve.n_cap, "N of the Berinde inequality");
  s->add_option("--max-iter", solve.max_iter, "Iteration cap");
  s->add_option("--A", solve.a, "Set A");
  s->add_option("--B", solve.b, "Set B");
  s->add_option("--trace", solve.trace, "Write the trace as CSV");
  s->add_flag("--skip-side-condition", solve.skip_side_condition, "Leave the side condition out of the battery");

  SearchOptions search;
  auto* q = app.add_subcommand("search", "Sweep a coefficient looking for counterexamples");
  common_flags(q, search.common);
  q->add_option("-k,--check", search.check, "banach[:function] or proximal-weak[:function][:N=..]")->required();
  q->add_option("--sweep-from", search.from, "First swept value");
  q->add_option("--sweep-to", search.to, "Last swept value");
  q->add_option("--count", search.count, "Number of swept values");

  FixturesOptions fixtures;
  auto* f = app.add_subcommand("fixtures", "Run the shipped fixtures");
  f->add_option("pattern", fixtures.pattern, "Glob over fixture names (default *)");
  f->add_option("--dir", fixtures.dir, "Fixture directory");
  f->add_flag("--json", fixtures.json, "Print the structured report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  if (*v) return cmd_verify(verify, std::cout, std::cerr);
  if (*s) return cmd_solve(solve, std::cout, std::cerr);
  if (*q) return cmd_search(search, std::cout, std::cerr);
  return cmd_fixtures(fixtures, std::cout, std::cerr);
}

// sapctl: generate instances, run engines, verify invariants, benchmark.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "sap/harness.hpp"

int main(int argc, char** argv) {
  using namespace sap;
  CLI::App app{"Shortest-augmenting-path matching toolkit"};
  app.require_subcommand(1);

  cli::GenOptions gen;
  auto* g = app.add_subcommand("gen", "write a generated instance to standard output");
  g->add_option("kind", gen.kind, "random | complete | adversary | star_chain")->required();
  g->add_option("--servers", gen.spec.servers, "server count");
  g->add_option("--clients", gen.spec.clients, "client count");
  std::optional<std::size_t> degree;
  g->add_option("--degree", degree, "neighbors per client (random)");
  g->add_option("--min-degree", gen.spec.min_degree, "smallest client degree (random)");
  g->add_option("--max-degree", gen.spec.max_degree, "largest client degree (random)");
  g->add_option("--seed", gen.spec.seed, "random seed");
  g->add_option("--L", gen.spec.L, "adversary server count, a multiple of 4");
  g->add_option("--pad-to", gen.spec.pad_to, "pad the adversary with K_{1,1} copies to this many clients");
  g->add_option("--depth", gen.spec.depth, "star chain depth");

  cli::RunOptions run;
  auto* r = app.add_subcommand("run", "run an engine on an instance file");
  r->set_help_flag("--help", "print this help message and exit");
  r->add_option("file", run.file, "instance file, or - for standard input")->required();
  r->add_option("--engine", run.engine, "naive | fast | capacitated | minmax | semi");
  r->add_option("--epsilon", run.epsilon, "semi-matching slack, e.g. 1/2");
  r->add_option("--h", run.h, "depth limit of the fast engine");
  r->add_flag("--analyze", run.analyze, "add per-arrival max alpha and opt load columns");
  r->add_option("--csv", run.csv, "telemetry CSV path, or - for standard output");

  cli::VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "check invariants on an instance file or a built-in suite");
  v->add_option("file", verify.file, "instance file");
  v->add_option("--suite", verify.suite, "built-in corpus: small");
  v->add_flag("--analyze", verify.analyze, "include balanced-flow properties");

  cli::BenchOptions bench;
  auto* b = app.add_subcommand("bench", "sweep random instances and report replacement totals");
  b->add_option("--sizes", bench.sizes, "client counts")->delimiter(',');
  b->add_option("--seeds", bench.seeds, "seeds per size");
  b->add_option("--engine", bench.engine, "naive | fast");
  b->add_option("--csv", bench.csv, "output path, or - for standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  try {
    if (*g) {
      if (degree) gen.spec.min_degree = gen.spec.max_degree = *degree;
      return cli::cmd_gen(gen, std::cout);
    }
    if (*r) return cli::cmd_run(run, std::cout);
    if (*v) return cli::cmd_verify(verify, std::cout);
    if (*b) return cli::cmd_bench(bench, std::cout);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return cli::kInvariantFailure;
  }
  return cli::kUsage;
}

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sap/analysis.hpp"
#include "sap/errors.hpp"
#include "sap/extensions.hpp"
#include "sap/fast_sap.hpp"
#include "sap/generators.hpp"
#include "sap/instance_io.hpp"
#include "sap/oracles.hpp"

namespace sap::cli {

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kUsage = 2 };

/// "3", "1/2" or "0.25" as an exact fraction.
inline Rational parse_rational(const std::string& text) {
  auto to_int = [&](std::string_view w) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw UsageError("not a number: '" + text + "'");
    return v;
  };
  const std::string_view t(text);
  if (const auto slash = t.find('/'); slash != std::string_view::npos)
    return Rational(to_int(t.substr(0, slash)), to_int(t.substr(slash + 1)));
  if (const auto dot = t.find('.'); dot != std::string_view::npos) {
    const auto frac = t.substr(dot + 1);
    if (frac.size() > 12) throw UsageError("too many decimals in '" + text + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t whole = dot == 0 ? 0 : to_int(t.substr(0, dot));
    const std::int64_t part = frac.empty() ? 0 : to_int(frac);
    if (whole < 0 || t.front() == '-') throw UsageError("negative decimal not supported: '" + text + "'");
    return Rational(whole * den + part, den);
  }
  return Rational(to_int(t));
}

inline ArrivalInstance load_instance(const std::string& path) {
  if (path == "-") return read_instance(std::cin);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return read_instance(in);
}

struct GenOptions {
  std::string kind;
  GenSpec spec;
};

inline int cmd_gen(const GenOptions& opt, std::ostream& out) {
  GenSpec spec = opt.spec;
  if (opt.kind == "random") {
    spec.kind = GenKind::kRandom;
  } else if (opt.kind == "complete") {
    spec.kind = GenKind::kComplete;
  } else if (opt.kind == "adversary") {
    spec.kind = GenKind::kAdversary;
  } else if (opt.kind == "star_chain") {
    spec.kind = GenKind::kStarChain;
  } else {
    throw UsageError("unknown generator '" + opt.kind + "' (random, complete, adversary, star_chain)");
  }
  write_instance(out, generate(spec));
  return kOk;
}

struct RunOptions {
  std::string file;
  std::string engine = "naive";
  std::optional<std::string> epsilon;
  std::optional<int> h;
  bool analyze = false;
  std::optional<std::string> csv;  // "-" for standard output
};

/// Runs one engine; telemetry goes to the CSV target, a one-line summary to `out`.
inline int cmd_run(const RunOptions& opt, std::ostream& out) {
  const auto instance = load_instance(opt.file);
  const std::string& e = opt.engine;
  if (e != "naive" && e != "fast" && e != "capacitated" && e != "minmax" && e != "semi")
    throw UsageError("unknown engine '" + e + "' (naive, fast, capacitated, minmax, semi)");
  if (opt.epsilon && e != "semi") throw UsageError("--epsilon applies only to the semi engine");
  if (!opt.epsilon && e == "semi") throw UsageError("the semi engine needs --epsilon");
  if (opt.h && e != "fast") throw UsageError("--h applies only to the fast engine");
  if (instance.has_capacities() && e != "capacitated")
    throw UsageError("instance has capacities; use --engine capacitated");

  RunLog log;
  std::size_t matched = 0;
  std::ostringstream extra;
  if (e == "naive") {
    auto r = run_sap(instance);
    if (!r.state.consistent()) throw InvariantViolation("matching state inconsistent");
    if (r.state.matched_count() != oracle::hopcroft_karp_size(oracle::GraphSnapshot::of_prefix(instance, instance.client_count())))
      throw InvariantViolation("final matching is not maximum");
    matched = r.state.matched_count();
    log = std::move(r.log);
  } else if (e == "fast") {
    FastSapOptions fo;
    fo.depth_limit = opt.h;
    auto r = run_fast_sap(instance, fo);
    if (r.state.matched_count() != oracle::hopcroft_karp_size(oracle::GraphSnapshot::of_prefix(instance, instance.client_count())))
      throw InvariantViolation("final matching is not maximum");
    matched = r.state.matched_count();
    log = std::move(r.log);
    extra << " h=" << r.depth_limit << " tree_paths=" << r.stats.tree_paths << " brute_force=" << r.stats.brute_force_found
          << " failed_searches=" << r.stats.brute_force_failed << " pruned_clients=" << r.stats.pruned_clients
          << " pruned_servers=" << r.stats.pruned_servers;
  } else if (e == "capacitated") {
    auto r = run_capacitated(instance);
    matched = r.state.matched_count();
    log = std::move(r.log);
  } else if (e == "minmax") {
    auto r = run_minmax(instance);
    matched = r.state.matched_count();
    log = std::move(r.log);
    extra << " opt=" << (r.opt_history.empty() ? 0 : r.opt_history.back()) << " epochs=" << r.epochs.size();
  } else {
    const Rational eps = parse_rational(*opt.epsilon);
    auto r = run_semi_matching(instance, eps);
    matched = r.state.matched_count();
    for (const auto& rec : r.log.records())
      if (!within(static_cast<long double>(*rec.path_edges - 1), semi_tail_bound(eps, static_cast<std::size_t>(rec.client) + 1)))
        throw InvariantViolation("augmenting path of client " + std::to_string(rec.client) + " exceeds the semi-matching bound");
    log = std::move(r.log);
    extra << " epsilon=" << eps.str();
  }
  if (!log.consistent()) throw InvariantViolation("run log totals inconsistent");

  std::vector<AnalysisRow> rows;
  if (opt.analyze) {
    std::int32_t opt_prev = 0;
    for (std::size_t i = 0; i < instance.client_count(); ++i) {
      const auto g = ClientGraph::from_prefix(instance, i + 1);
      const Rational m = g.client_count() == 0 ? Rational(0) : balanced_flow(g).max_alpha();
      opt_prev = opt_load(instance, i + 1, opt_prev);
      rows.push_back({m, opt_prev});
    }
  }

  std::ostream* summary = &out;
  std::ofstream file;
  if (opt.csv) {
    if (*opt.csv == "-") {
      write_telemetry(out, log, e, opt.analyze ? &rows : nullptr);
      summary = &std::cerr;
    } else {
      file.open(*opt.csv);
      if (!file) throw UsageError("cannot write '" + *opt.csv + "'");
      write_telemetry(file, log, e, opt.analyze ? &rows : nullptr);
    }
  }
  *summary << "engine=" << e << " clients=" << instance.client_count() << " matched=" << matched
           << " cum_replacements=" << log.cum_replacements() << " cum_path_edges=" << log.cum_path_edges()
           << " max_path_edges=" << log.max_path_edges() << extra.str() << '\n';
  return kOk;
}

/// Small in-repo corpus for `verify --suite small`.
inline std::vector<std::pair<std::string, ArrivalInstance>> small_suite() {
  std::vector<std::pair<std::string, ArrivalInstance>> out;
  out.emplace_back("complete 10x10", gen_complete(10, 10));
  out.emplace_back("complete 10x20", gen_complete(10, 20));
  out.emplace_back("star chain 5", gen_star_chain(5).instance);
  out.emplace_back("adversary L=4", gen_minmax_adversary(4).instance);
  out.emplace_back("three on one server", ArrivalInstance(1, {{0}, {0}, {0}}));
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t servers = 3 + seed % 5;
    out.emplace_back("random seed " + std::to_string(seed),
                     gen_random_mixed(servers, 8 + seed % 7, 1, std::min<std::size_t>(3, servers), seed));
  }
  return out;
}

struct VerifyOptions {
  std::optional<std::string> file;
  std::optional<std::string> suite;
  bool analyze = false;
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  std::vector<std::pair<std::string, ArrivalInstance>> corpus;
  bool flows = opt.analyze;
  if (opt.suite) {
    if (*opt.suite != "small") throw UsageError("unknown suite '" + *opt.suite + "' (small)");
    if (opt.file) throw UsageError("give either a file or --suite, not both");
    corpus = small_suite();
    flows = true;
  } else if (opt.file) {
    corpus.emplace_back(*opt.file, load_instance(*opt.file));
  } else {
    throw UsageError("verify needs a file or --suite small");
  }

  // Aggregate each property over the corpus.
  std::vector<PropertyResult> merged;
  for (const auto& [name, inst] : corpus) {
    for (auto& r : verify_instance(inst, flows)) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const PropertyResult& m) { return m.name == r.name; });
      if (it == merged.end()) {
        merged.push_back(r);
        if (!r.passed) merged.back().detail = name + ": " + r.detail;
        continue;
      }
      it->checks += r.checks;
      if (r.skipped) {
        it->skipped = true;
        it->detail = name + ": " + r.detail;
      }
      if (!r.passed && it->passed) {
        it->passed = false;
        it->detail = name + ": " + r.detail;
      }
    }
  }

  if (opt.suite) {
    PropertyResult mm{"min-max load equals opt on the L=4 adversary"};
    const auto adv = gen_minmax_adversary(4);
    try {
      const auto r = run_minmax(adv.instance);
      mm.checks = static_cast<std::int64_t>(r.opt_history.size());
      if (r.log.cum_replacements() < 1) mm.fail("fewer reassignments than the forced transitions");
    } catch (const InvariantViolation& ex) {
      mm.fail(ex.what());
    }
    merged.push_back(mm);

    PropertyResult semi{"semi-matching paths and allowances"};
    for (const Rational eps : {Rational(1, 2), Rational(1)}) {
      for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto inst = gen_random_mixed(5, 12, 1, 3, seed);
        try {
          const auto r = run_semi_matching(inst, eps);
          for (const auto& rec : r.log.records()) {
            ++semi.checks;
            if (!within(static_cast<long double>(*rec.path_edges - 1), semi_tail_bound(eps, static_cast<std::size_t>(rec.client) + 1)))
              semi.fail("seed " + std::to_string(seed) + ": long path at client " + std::to_string(rec.client));
          }
        } catch (const InvariantViolation& ex) {
          semi.fail(ex.what());
        }
      }
    }
    merged.push_back(semi);

    PropertyResult ident{"unit capacities reduce to plain SAP"};
    for (const auto& [name, inst] : corpus) {
      ++ident.checks;
      std::vector<std::int32_t> ones(inst.server_count(), 1);
      if (run_capacitated(inst, ones).log != run_sap(inst).log) ident.fail(name);
    }
    merged.push_back(ident);
  }

  bool ok = true;
  for (const auto& r : merged) {
    const char* tag = r.skipped ? "SKIP" : r.informational ? (r.passed ? "INFO pass" : "INFO fail") : r.passed ? "PASS" : "FAIL";
    out << tag << "  " << r.name << " (" << r.checks << " checks)";
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
    if (!r.passed && !r.informational && !r.skipped) ok = false;
  }
  out << (ok ? "verify: all properties hold" : "verify: property failures") << " over " << corpus.size()
      << " instance(s)\n";
  return ok ? kOk : kInvariantFailure;
}

struct BenchOptions {
  std::vector<std::size_t> sizes{64, 128, 256};
  std::size_t seeds = 3;
  std::string engine = "naive";
  std::optional<std::string> csv;
};

struct BenchRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::int64_t total_replacements = 0;
  std::int64_t total_path_edges = 0;
  long double n_ln2_n = 0;
  long double path_edges_bound = 0;
};

/// One (size, seed) cell: n clients over n servers, degrees 1..5.
inline BenchRow bench_cell(std::size_t n, std::uint64_t seed, const std::string& engine) {
  const auto inst = gen_random_mixed(n, n, 1, std::min<std::size_t>(5, n), seed);
  const RunLog log = engine == "fast" ? run_fast_sap(inst).log : run_sap(inst).log;
  const long double l = ln(n);
  return {n, seed, log.cum_replacements(), log.cum_path_edges(), static_cast<long double>(n) * l * l, total_edges_bound(n)};
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out) {
  if (opt.engine != "naive" && opt.engine != "fast") throw UsageError("bench engine must be naive or fast");
  if (opt.seeds == 0 || opt.sizes.empty()) throw UsageError("bench needs at least one size and one seed");
  for (std::size_t n : opt.sizes)
    if (n < 2) throw UsageError("bench sizes must be >= 2");
  std::vector<std::future<BenchRow>> cells;
  for (std::size_t n : opt.sizes)
    for (std::uint64_t seed = 1; seed <= opt.seeds; ++seed)
      cells.push_back(std::async(std::launch::async, bench_cell, n, seed, opt.engine));

  std::ostringstream csv;
  csv << "n,seed,total_replacements,total_path_edges,n_ln2_n,path_edges_bound\n" << std::fixed << std::setprecision(3);
  bool ok = true;
  for (auto& f : cells) {
    const auto r = f.get();
    if (!within(static_cast<long double>(r.total_path_edges), r.path_edges_bound)) ok = false;
    csv << r.n << ',' << r.seed << ',' << r.total_replacements << ',' << r.total_path_edges << ',' << r.n_ln2_n << ','
        << r.path_edges_bound << '\n';
  }
  if (opt.csv && *opt.csv != "-") {
    std::ofstream file(*opt.csv);
    if (!file) throw UsageError("cannot write '" + *opt.csv + "'");
    file << csv.str();
    out << "bench: " << cells.size() << " rows written to " << *opt.csv << '\n';
  } else {
    out << csv.str();
  }
  if (!ok) out << "bench: total path edges exceeded the bound\n";
  return ok ? kOk : kInvariantFailure;
}

}  // namespace sap::cli

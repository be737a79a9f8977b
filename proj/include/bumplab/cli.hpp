// Command-line front end.
//
// run_command() is the whole program: the binary's main() forwards argv and
// exits with the returned code, and tests call it in-process.  Exit codes:
// 0 success, 2 malformed input (bad flags, unreadable or invalid files),
// 3 numeric failure (an oracle did not converge or a scale bracket failed).
//
// Reports are byte-reproducible: rows are serialized with 17-digit C-locale
// formatting and '\n' line ends, batch inputs keep their command-line order
// regardless of how many worker threads ran, and every randomized routine
// takes its seed from the command line or the instance file.  The "runtime"
// column is a structural operation count (cubes visited, oracle iterations),
// not wall-clock time, precisely so that it reproduces.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "bumplab/corona.hpp"
#include "bumplab/instance_io.hpp"
#include "bumplab/parallel.hpp"
#include "bumplab/report.hpp"
#include "bumplab/search.hpp"
#include "bumplab/selfimprove.hpp"

namespace bumplab {
namespace cli_detail {

inline std::string path_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

inline double parse_flag_number(const std::string& text,
                                const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw IoError(flag + ": '" + text + "' is not a number");
  }
}

// FAMILY[:eta=R] with FAMILY in {power, log, loglog}; the exponent comes
// from the instance (or the --p override), not from the flag.
inline YoungFunction parse_young_flag(const std::string& spec, double p,
                                      const std::string& flag) {
  std::string family = spec;
  std::optional<double> eta;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    family = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (rest.rfind("eta=", 0) != 0)
      throw IoError(flag + ": expected FAMILY[:eta=R], got '" + spec + "'");
    eta = parse_flag_number(rest.substr(4), flag);
  }
  try {
    if (family == "power") {
      if (eta) throw IoError(flag + ": the power bump takes no eta");
      return YoungFunction::power(p);
    }
    if (family == "log") return YoungFunction::log_bump(p, eta.value_or(1.0));
    if (family == "loglog")
      return YoungFunction::loglog_bump(p, eta.value_or(1.0));
  } catch (const std::invalid_argument& e) {
    throw IoError(flag + ": " + e.what());
  }
  throw IoError(flag + ": unknown bump family '" + family + "'");
}

// FAMILY:KEY=R with power:a=, log:b=, triple:eta=; the result is normalized
// against the exponent q of the side it penalizes.
inline EpsilonFunction parse_eps_flag(const std::string& spec, double q,
                                      const std::string& flag) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw IoError(flag + ": expected FAMILY:KEY=R, got '" + spec + "'");
  const std::string family = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  const auto eq = rest.find('=');
  if (eq == std::string::npos)
    throw IoError(flag + ": expected FAMILY:KEY=R, got '" + spec + "'");
  const std::string key = rest.substr(0, eq);
  const double value = parse_flag_number(rest.substr(eq + 1), flag);
  try {
    if (family == "power" && key == "a")
      return EpsilonFunction::power_law(value).normalized(q);
    if (family == "log" && key == "b")
      return EpsilonFunction::log_power(value).normalized(q);
    if (family == "triple" && key == "eta")
      return EpsilonFunction::triple_log(value).normalized(q);
  } catch (const std::invalid_argument& e) {
    throw IoError(flag + ": " + e.what());
  }
  throw IoError(flag + ": unknown penalty '" + family + ":" + key + "'");
}

inline YoungFunction young_at_exponent(const YoungFunction& A, double p) {
  switch (A.family()) {
    case YoungFamily::power: return YoungFunction::power(p);
    case YoungFamily::log_bump: return YoungFunction::log_bump(p, A.eta());
    case YoungFamily::loglog_bump:
      return YoungFunction::loglog_bump(p, A.eta());
    case YoungFamily::tabulated: break;
  }
  throw IoError("--p: a tabulated bump cannot be rebuilt at a new exponent");
}

inline EpsilonFunction eps_renormalized(const EpsilonFunction& e, double q) {
  switch (e.family()) {
    case EpsilonFamily::power_law:
      return EpsilonFunction::power_law(e.param()).normalized(q);
    case EpsilonFamily::log_power:
      return EpsilonFunction::log_power(e.param()).normalized(q);
    case EpsilonFamily::triple_log:
      return EpsilonFunction::triple_log(e.param()).normalized(q);
  }
  throw IoError("--p: unknown penalty family");
}

// Optional replacements for the functional data of a loaded instance.
// Overriding p rebuilds both bumps at the new exponents and renormalizes
// both penalties, so the instance stays internally consistent.
struct Overrides {
  std::optional<double> p;
  std::string young_sigma;  // empty keeps the file's bump
  std::string young_w;
  std::string eps_sigma;
  std::string eps_w;
};

inline Instance apply_overrides(Instance inst, const Overrides& o) {
  if (o.p) {
    if (!(*o.p > 1.0)) throw IoError("--p: must exceed 1");
    inst.p = *o.p;
    const double pc = inst.p / (inst.p - 1.0);
    inst.A = young_at_exponent(inst.A, inst.p);
    inst.B = young_at_exponent(inst.B, pc);
    inst.eps_p = eps_renormalized(inst.eps_p, pc);
    inst.eps_pc = eps_renormalized(inst.eps_pc, inst.p);
  }
  const double pc = inst.p / (inst.p - 1.0);
  if (!o.young_sigma.empty())
    inst.A = parse_young_flag(o.young_sigma, inst.p, "--A");
  if (!o.young_w.empty()) inst.B = parse_young_flag(o.young_w, pc, "--B");
  if (!o.eps_sigma.empty())
    inst.eps_p = parse_eps_flag(o.eps_sigma, pc, "--eps-sigma");
  if (!o.eps_w.empty()) inst.eps_pc = parse_eps_flag(o.eps_w, inst.p, "--eps-w");
  return inst;
}

inline void fill_identity(ReportRow& row, const Instance& inst,
                          const std::string& id, const char* command) {
  row.id = id;
  row.command = command;
  row.set("p", inst.p);
  row.set("dimension", inst.grid->dimension());
  row.set("depth", inst.grid->depth());
  row.set("seed", static_cast<double>(inst.seed));
}

// The shared fill helpers below are the single computation path for their
// columns; `constants`, `testing`, `norm` and `verify-theorem` all go
// through them, which is what makes composed rows match individual runs
// bit for bit.  Each returns its structural operation count.
inline double fill_constants(ReportRow& row, const Instance& inst) {
  const double pc = inst.p / (inst.p - 1.0);
  const YoungFunction Abar = dual_young(inst.A);
  const YoungFunction Bbar = dual_young(inst.B);
  row.set("ap", ap_constant(inst.sigma, inst.w, inst.p));
  row.set("separated_sw", separated_bump(inst.sigma, inst.w, Abar, inst.p));
  row.set("separated_ws", separated_bump(inst.w, inst.sigma, Bbar, pc));
  row.set("entangled_sw_one_plus_rho",
          entangled_bump(inst.sigma, inst.w, Abar, inst.eps_p, inst.p,
                         EntangleArg::one_plus_rho));
  row.set("entangled_ws_one_plus_rho",
          entangled_bump(inst.w, inst.sigma, Bbar, inst.eps_pc, pc,
                         EntangleArg::one_plus_rho));
  row.set("entangled_sw_rho", entangled_bump(inst.sigma, inst.w, Abar,
                                             inst.eps_p, inst.p,
                                             EntangleArg::rho));
  row.set("entangled_ws_rho", entangled_bump(inst.w, inst.sigma, Bbar,
                                             inst.eps_pc, pc,
                                             EntangleArg::rho));
  return 7.0 * static_cast<double>(inst.grid->total_cubes());
}

inline double fill_testing(ReportRow& row, const Instance& inst) {
  const TestingReport tr =
      testing_constants(inst.sigma, inst.w, inst.family, inst.p);
  row.set("testing_forward", tr.forward);
  row.set("testing_dual", tr.dual);
  row.set("testing_max", tr.max());
  return 2.0 * static_cast<double>(inst.family.size());
}

inline double fill_norm(ReportRow& row, const Instance& inst,
                        std::uint64_t oracle_seed, bool& converged) {
  const NormReport nr =
      norm_oracle(inst.sigma, inst.w, inst.family, inst.p, oracle_seed);
  row.set("norm", nr.value);
  row.set("norm_converged", nr.converged ? 1.0 : 0.0);
  row.set("norm_iterations", static_cast<double>(nr.iterations));
  converged = nr.converged;
  return static_cast<double>(nr.iterations) *
         static_cast<double>(inst.family.size());
}

inline double objective_value(const ObjectiveBreakdown& bd) {
  return bd.infinite ? std::numeric_limits<double>::infinity() : bd.value;
}

// Shared batch options.
struct BatchOpts {
  std::vector<std::string> inputs;
  std::string output;
  std::string format = "csv";
  bool quiet = false;
};

inline void add_batch_opts(CLI::App* sub, BatchOpts& b, bool multi = true) {
  auto* in = sub->add_option("--input,-i", b.inputs, "instance file (JSON)")
                 ->required();
  if (!multi) in->expected(1);
  sub->add_option("--output,-o", b.output,
                  "report destination (default: stdout)");
  sub->add_option("--format", b.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--quiet,-q", b.quiet, "suppress progress diagnostics");
}

inline void emit_report(const std::vector<ReportRow>& rows,
                        const BatchOpts& b, std::ostream& out) {
  const std::string text = serialize_rows(rows, b.format);
  if (b.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(b.output, std::ios::binary);
  if (!f) throw IoError(b.output + ": cannot open for writing");
  f << text;
  if (!f) throw IoError(b.output + ": write failed");
}

// Fans a per-file row builder over the batch, serializes in input order.
template <class Fn>
inline int run_batch(const BatchOpts& b, std::ostream& out, std::ostream& err,
                     const char* command, Fn per_file) {
  const auto groups = thread_map(b.inputs, per_file);
  std::vector<ReportRow> rows;
  for (const auto& g : groups) rows.insert(rows.end(), g.begin(), g.end());
  emit_report(rows, b, out);
  if (!b.quiet)
    err << "bumplab " << command << ": " << rows.size() << " row(s) from "
        << b.inputs.size() << " file(s)\n";
  return 0;
}

}  // namespace cli_detail

inline int run_command(const std::vector<std::string>& args,
                       std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  using cli_detail::BatchOpts;
  using cli_detail::Overrides;

  CLI::App app{"numerical laboratory for two-weight bump constants"};
  app.name("bumplab");
  app.require_subcommand(1);

  // gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "gen", "generate a random instance and write it as JSON");
  std::string gen_kind = "lognormal";
  int gen_d = 1, gen_L = 4, gen_extra = 8;
  double gen_p = 2.0, gen_spread = 1.0, gen_lacunary = 2.0, gen_eta = 1.0;
  double gen_spike = 0.0;
  std::uint64_t gen_seed = 1;
  std::string gen_output;
  bool gen_quiet = false;
  gen->add_option("--kind", gen_kind, "cell generator")
      ->check(CLI::IsMember({"lognormal", "power-spike", "lacunary"}));
  gen->add_option("--dimension,-d", gen_d, "grid dimension (1 or 2)");
  gen->add_option("--depth,-L", gen_L, "grid depth");
  gen->add_option("--p", gen_p, "integrability exponent");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--spread", gen_spread, "lognormal spread of the cells");
  auto* spike_opt = gen->add_option("--spike-exponent", gen_spike,
                                    "power-spike exponent (default: random)");
  gen->add_option("--lacunary-factor", gen_lacunary,
                  "geometric step of lacunary cells");
  gen->add_option("--extra-cubes", gen_extra,
                  "random cubes tried on top of the base chain");
  gen->add_option("--eta", gen_eta, "log-bump parameter of both bumps");
  gen->add_option("--output,-o", gen_output, "instance file to write")
      ->required();
  gen->add_flag("--quiet,-q", gen_quiet, "suppress progress diagnostics");

  // constants -----------------------------------------------------------
  auto* constants = app.add_subcommand(
      "constants", "bump and Muckenhoupt constants of instances");
  BatchOpts constants_b;
  Overrides constants_o;
  cli_detail::add_batch_opts(constants, constants_b);
  constants->add_option("--p", constants_o.p, "override the exponent");
  constants->add_option("--A", constants_o.young_sigma,
                        "override the sigma-side bump, FAMILY[:eta=R]");
  constants->add_option("--B", constants_o.young_w,
                        "override the w-side bump, FAMILY[:eta=R]");
  constants->add_option("--eps-sigma", constants_o.eps_sigma,
                        "override the sigma-side penalty, FAMILY:KEY=R");
  constants->add_option("--eps-w", constants_o.eps_w,
                        "override the w-side penalty, FAMILY:KEY=R");

  // testing ---------------------------------------------------------------
  auto* testing = app.add_subcommand(
      "testing", "sparse-form testing constants of instances");
  BatchOpts testing_b;
  cli_detail::add_batch_opts(testing, testing_b);

  // norm --------------------------------------------------------------
  auto* norm = app.add_subcommand(
      "norm", "sparse-operator norm oracle for instances");
  BatchOpts norm_b;
  std::uint64_t norm_seed = 1;
  cli_detail::add_batch_opts(norm, norm_b);
  norm->add_option("--seed", norm_seed, "oracle seed");

  // verify-theorem ---------------------------------------------------------
  auto* verify = app.add_subcommand(
      "verify-theorem",
      "testing, norm, constants and objective ratios in one row");
  BatchOpts verify_b;
  Overrides verify_o;
  int verify_steps = 0;
  std::uint64_t verify_seed = 0;
  std::string verify_save_best;
  cli_detail::add_batch_opts(verify, verify_b);
  verify->add_option("--p", verify_o.p, "override the exponent");
  verify->add_option("--A", verify_o.young_sigma,
                     "override the sigma-side bump, FAMILY[:eta=R]");
  verify->add_option("--B", verify_o.young_w,
                     "override the w-side bump, FAMILY[:eta=R]");
  verify->add_option("--eps-sigma", verify_o.eps_sigma,
                     "override the sigma-side penalty, FAMILY:KEY=R");
  verify->add_option("--eps-w", verify_o.eps_w,
                     "override the w-side penalty, FAMILY:KEY=R");
  verify->add_option("--steps", verify_steps,
                     "annealing steps; > 0 appends a searched-best row");
  verify->add_option("--seed", verify_seed, "search seed (0: derived)");
  verify->add_option("--save-best", verify_save_best,
                     "write the searched-best instance to this file");

  // corona-report -----------------------------------------------------------
  auto* corona = app.add_subcommand(
      "corona-report", "stopping-time strata and block-lemma ratios");
  BatchOpts corona_b;
  Overrides corona_o;
  std::string corona_arg = "one-plus-rho";
  cli_detail::add_batch_opts(corona, corona_b);
  corona->add_option("--p", corona_o.p, "override the exponent");
  corona->add_option("--A", corona_o.young_sigma,
                     "override the sigma-side bump, FAMILY[:eta=R]");
  corona->add_option("--eps-sigma", corona_o.eps_sigma,
                     "override the sigma-side penalty, FAMILY:KEY=R");
  corona->add_option("--arg-mode", corona_arg, "penalty argument")
      ->check(CLI::IsMember({"one-plus-rho", "rho"}));

  // prop-eta ----------------------------------------------------------------
  auto* prop = app.add_subcommand(
      "prop-eta", "bump-narrowing chain check on instances");
  BatchOpts prop_b;
  std::string prop_case = "log";
  double prop_eta = 1.0, prop_eta_prime = 0.0, prop_p = 0.0;
  cli_detail::add_batch_opts(prop, prop_b);
  prop->add_option("--case", prop_case, "bump family of the recipe")
      ->check(CLI::IsMember({"log", "loglog"}));
  prop->add_option("--eta", prop_eta, "bump parameter");
  auto* prop_ep_opt = prop->add_option("--eta-prime", prop_eta_prime,
                                       "free loglog parameter (default: eta)");
  auto* prop_p_opt = prop->add_option("--p", prop_p, "override the exponent");

  // search -------------------------------------------------------------
  auto* search = app.add_subcommand(
      "search", "anneal an instance toward a larger objective ratio");
  BatchOpts search_b;
  std::string search_objective = "theorem";
  int search_steps = 200;
  std::uint64_t search_seed = 0;
  double search_t0 = 0.0, search_cool = 1e-3;
  std::string search_save_best, search_trace;
  cli_detail::add_batch_opts(search, search_b, /*multi=*/false);
  search->add_option("--objective", search_objective, "ratio to maximize")
      ->check(CLI::IsMember({"theorem", "conjecture"}));
  search->add_option("--steps", search_steps, "annealing steps");
  search->add_option("--seed", search_seed, "search seed (0: derived)");
  search->add_option("--t0", search_t0,
                     "initial temperature (0: calibrated from probe moves)");
  search->add_option("--cool", search_cool, "geometric cooling target factor");
  search->add_option("--save-best", search_save_best,
                     "write the best instance to this file");
  search->add_option("--trace", search_trace,
                     "write the per-step acceptance trace to this CSV file");

  // parse ---------------------------------------------------------------
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("bumplab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*gen) {
      const GeneratorKind kind = gen_kind == "lognormal"
                                     ? GeneratorKind::lognormal
                                 : gen_kind == "power-spike"
                                     ? GeneratorKind::power_spike
                                     : GeneratorKind::lacunary;
      GeneratorConfig cfg;
      cfg.lognormal_spread = gen_spread;
      if (spike_opt->count() > 0) cfg.spike_exponent = gen_spike;
      cfg.lacunary_factor = gen_lacunary;
      cfg.extra_cubes = gen_extra;
      cfg.eta = gen_eta;
      const Instance inst =
          generate_instance(kind, gen_d, gen_L, gen_p, gen_seed, cfg);
      write_instance(inst, gen_output);
      if (!gen_quiet) err << "bumplab gen: wrote " << gen_output << "\n";
      return 0;
    }

    if (*constants) {
      return cli_detail::run_batch(
          constants_b, out, err, "constants",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance inst =
                cli_detail::apply_overrides(read_instance(path), constants_o);
            ReportRow row;
            cli_detail::fill_identity(row, inst, cli_detail::path_stem(path),
                                      "constants");
            row.set("runtime", cli_detail::fill_constants(row, inst));
            return {row};
          });
    }

    if (*testing) {
      return cli_detail::run_batch(
          testing_b, out, err, "testing",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance inst = read_instance(path);
            ReportRow row;
            cli_detail::fill_identity(row, inst, cli_detail::path_stem(path),
                                      "testing");
            row.set("runtime", cli_detail::fill_testing(row, inst));
            return {row};
          });
    }

    if (*norm) {
      std::atomic<bool> any_diverged{false};
      const int code = cli_detail::run_batch(
          norm_b, out, err, "norm",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance inst = read_instance(path);
            ReportRow row;
            cli_detail::fill_identity(row, inst, cli_detail::path_stem(path),
                                      "norm");
            bool converged = false;
            row.set("runtime",
                    cli_detail::fill_norm(row, inst, norm_seed, converged));
            if (!converged) any_diverged.store(true);
            return {row};
          });
      if (code != 0) return code;
      if (any_diverged.load()) {
        err << "bumplab norm: oracle did not converge on every input\n";
        return 3;
      }
      return 0;
    }

    if (*verify) {
      std::atomic<bool> any_diverged{false};
      const ObjectiveKind theorem = ObjectiveKind::theorem_ratio;
      const ObjectiveKind conjecture = ObjectiveKind::conjecture_ratio;
      const auto full_row = [&](const Instance& inst, const std::string& id,
                                ReportRow& row) {
        cli_detail::fill_identity(row, inst, id, "verify-theorem");
        double ops = cli_detail::fill_constants(row, inst);
        ops += cli_detail::fill_testing(row, inst);
        bool converged = false;
        ops += cli_detail::fill_norm(row, inst, 1, converged);
        if (!converged) any_diverged.store(true);
        const double tmax = row.get("testing_max").value_or(0.0);
        const double nrm = row.get("norm").value_or(0.0);
        row.set("sandwich_ratio",
                tmax > 0.0 ? nrm / tmax
                           : std::numeric_limits<double>::infinity());
        row.set("theorem_ratio", cli_detail::objective_value(
                                     evaluate_objective(inst, theorem)));
        row.set("conjecture_ratio", cli_detail::objective_value(
                                        evaluate_objective(inst, conjecture)));
        return ops;
      };
      const int code = cli_detail::run_batch(
          verify_b, out, err, "verify-theorem",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance inst =
                cli_detail::apply_overrides(read_instance(path), verify_o);
            const std::string id = cli_detail::path_stem(path);
            ReportRow row;
            row.set("runtime", full_row(inst, id, row));
            std::vector<ReportRow> rows{row};
            if (verify_steps > 0) {
              const SearchResult res = local_search(
                  inst, theorem, verify_steps, AnnealSchedule{}, verify_seed);
              ReportRow best;
              double ops = full_row(res.best, id + "#best", best);
              ops += static_cast<double>(verify_steps);
              best.set("runtime", ops);
              best.set("start_objective", res.start_objective);
              best.set("best_objective", res.best_objective);
              best.set("accepted_moves", res.accepted_moves);
              best.set("rejected_infinite", res.rejected_infinite);
              best.set("t0", res.t0);
              rows.push_back(best);
              if (!verify_save_best.empty())
                write_instance(res.best, verify_save_best);
            }
            return rows;
          });
      if (code != 0) return code;
      if (any_diverged.load()) {
        err << "bumplab verify-theorem: norm oracle did not converge\n";
        return 3;
      }
      return 0;
    }

    if (*corona) {
      const EntangleArg arg = corona_arg == "rho" ? EntangleArg::rho
                                                  : EntangleArg::one_plus_rho;
      return cli_detail::run_batch(
          corona_b, out, err, "corona-report",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance inst =
                cli_detail::apply_overrides(read_instance(path), corona_o);
            // The stopping function g is the sigma cell profile, which keeps
            // the report a pure function of the instance file.
            const CoronaDecomposition d =
                build_corona(inst.sigma, inst.w, inst.sigma.cells(),
                             inst.family, inst.p);
            const auto strata =
                alpha_strata(inst.sigma, inst.w, inst.family, inst.p, inst.A,
                             inst.eps_p, arg);
            std::vector<ReportRow> rows;
            for (const auto& stratum : strata) {
              const LemmaReport lr =
                  lemma_report(d, stratum, inst.sigma, inst.w, inst.A,
                               inst.eps_p);
              ReportRow row;
              cli_detail::fill_identity(row, inst, cli_detail::path_stem(path),
                                        "corona-report");
              row.set("stratum", lr.stratum_index);
              row.set("alpha", lr.alpha);
              row.set("blocks", static_cast<double>(lr.blocks.size()));
              row.set("degenerate_blocks", lr.degenerate_blocks);
              row.set("tsharp_failures", lr.t_sharp_failures);
              row.set("r_quasiorth", lr.r_quasiorth);
              row.set("r_epssum", lr.r_epssum);
              row.set("r_rhodecay", lr.r_rhodecay);
              row.set("r_holder", lr.r_holder);
              row.set("r_sw", lr.r_sw);
              row.set("r_packing", lr.r_packing);
              row.set("worst_block", lr.worst_block_ratio);
              row.set("runtime", static_cast<double>(inst.family.size()) *
                                     static_cast<double>(1 + strata.size()));
              rows.push_back(std::move(row));
            }
            return rows;
          });
    }

    if (*prop) {
      const PropCase recipe =
          prop_case == "loglog" ? PropCase::loglog_bump : PropCase::log_bump;
      const std::optional<double> eta_prime =
          prop_ep_opt->count() > 0 ? std::optional<double>(prop_eta_prime)
                                   : std::nullopt;
      return cli_detail::run_batch(
          prop_b, out, err, "prop-eta",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance inst = read_instance(path);
            const double p = prop_p_opt->count() > 0 ? prop_p : inst.p;
            const PropEtaReport pr = proposition_eta(
                inst.sigma, inst.w, p, prop_eta, recipe, eta_prime);
            ReportRow row;
            cli_detail::fill_identity(row, inst, cli_detail::path_stem(path),
                                      "prop-eta");
            row.set("p", pr.p);
            row.set("eta", pr.eta);
            row.set("eta_prime", pr.eta_prime);
            row.set("hypothesis", pr.hypothesis);
            row.set("conclusion", pr.conclusion);
            row.set("prop_ratio", pr.ratio);
            row.set("r_theta", pr.r_theta);
            row.set("r_ep", pr.r_ep);
            row.set("r_chain", pr.r_chain);
            row.set("eps_scale", pr.eps_scale);
            row.set("eps_quadrature", pr.eps_quadrature);
            row.set("prop_skipped", pr.skipped_cubes);
            row.set("runtime",
                    4.0 * static_cast<double>(inst.grid->total_cubes()));
            return {row};
          });
    }

    if (*search) {
      const ObjectiveKind kind = search_objective == "conjecture"
                                     ? ObjectiveKind::conjecture_ratio
                                     : ObjectiveKind::theorem_ratio;
      if (search_steps < 0) throw IoError("--steps: must be nonnegative");
      AnnealSchedule sched;
      sched.t0 = search_t0;
      sched.t_end_factor = search_cool;
      return cli_detail::run_batch(
          search_b, out, err, "search",
          [&](const std::string& path) -> std::vector<ReportRow> {
            const Instance start = read_instance(path);
            const SearchResult res =
                local_search(start, kind, search_steps, sched, search_seed);
            ReportRow row;
            cli_detail::fill_identity(row, res.best,
                                      cli_detail::path_stem(path), "search");
            row.set("start_objective", res.start_objective);
            row.set("best_objective", res.best_objective);
            row.set("accepted_moves", res.accepted_moves);
            row.set("rejected_infinite", res.rejected_infinite);
            row.set("t0", res.t0);
            const char* col = kind == ObjectiveKind::theorem_ratio
                                  ? "theorem_ratio"
                                  : "conjecture_ratio";
            row.set(col, res.best_objective);
            row.set("runtime", static_cast<double>(search_steps));
            if (!search_save_best.empty())
              write_instance(res.best, search_save_best);
            if (!search_trace.empty()) {
              std::ofstream tf(search_trace, std::ios::binary);
              if (!tf)
                throw IoError(search_trace + ": cannot open for writing");
              tf << "step,move,accepted,objective,best,temperature\n";
              for (const auto& s : res.trace)
                tf << s.step << ',' << s.move << ',' << (s.accepted ? 1 : 0)
                   << ',' << detail::format_number(s.objective) << ','
                   << detail::format_number(s.best) << ','
                   << detail::format_number(s.temperature) << '\n';
              if (!tf) throw IoError(search_trace + ": write failed");
            }
            return {row};
          });
    }
  } catch (const IoError& e) {
    err << "bumplab: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "bumplab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "bumplab: numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 2;  // unreachable with require_subcommand(1)
}

}  // namespace bumplab

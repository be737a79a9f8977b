#pragma once

// Self-improvement checks for bump constants.  The route: a bumped average
// built from a slowly varying profile beta can be discounted by a factor
// theta evaluated at the average itself, and the discounted profile beta0
// absorbs the loss.  Everything here is evaluated through exact distribution
// sums on dyadic cells, so the identities can be checked to rounding error
// instead of quadrature error.
//
// Quantities:
//   distribution(sigma, Q, lam)      cell fraction of Q where sigma > lam
//   orlicz_via_distribution          int_0^inf D(lam) beta(1/D(lam)) dlam,
//                                    an exact finite sum over cell values
//   weak_concavity_check             sampled f(sum lam_j x_j) >=
//                                    C^{-1} sum lam_j f(x_j)
//   self_improve_check               <sigma>_{B0,Q} vs
//                                    <sigma>_{B,Q} theta(<sigma>_{B,Q}/<sigma>_Q)
//   proposition_eta                  full pipeline: separated constant with
//                                    the wide bump vs entangled constant with
//                                    the narrowed bump and a matched penalty
//
// Two recipes are wired in.  The log recipe narrows L_{p',eta} to
// L_{p',eta/2} and pays eps(t) = c t^{eta/(2p')}; the discount profile is
// theta(u) = (1+u)^{-eta/2} composed with Log u.  The loglog recipe narrows
// the iterated-log family and pays eps(t) = c (Log t)^{(1+eta')/p'}; the
// discount theta(u) = (Log u)^{-1-eta'/2} applies directly.  eta' is a free
// parameter of the loglog recipe and defaults to eta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "bumplab/bumps.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/orlicz.hpp"

namespace bumplab {

// ---------------------------------------------------------------------------
// Profile bundles
// ---------------------------------------------------------------------------

enum class PropCase { log_bump, loglog_bump };

// beta is the slowly varying part of the wide bump written in the
// substituted variable: the wide Young function is B(t) = t beta(t) after
// the power of t has been divided out.  theta is the discount, decreasing
// on [1, inf).  beta0 is the discounted profile defining B0(t) = t beta0(t).
struct BetaFactor {
  double p = 2.0;
  double eta = 1.0;
  double eta_prime = 1.0;
  PropCase recipe = PropCase::log_bump;

  double beta(double u) const {
    const double lg = log_plus(u);
    if (recipe == PropCase::log_bump)
      return std::pow(lg, 1.0 / (p - 1.0) + eta);
    return std::pow(lg, 1.0 / (p - 1.0)) *
           std::pow(loglog_plus(u), 1.0 / (p - 1.0) + 0.5 * eta);
  }

  double theta(double u) const {
    if (recipe == PropCase::log_bump)
      return std::pow(1.0 + u, -0.5 * eta);
    return std::pow(log_plus(u), -1.0 - 0.5 * eta_prime);
  }

  // The log recipe discounts at the scale of Log u (the discount has to act
  // on the exponent of the log factor); the loglog recipe discounts at u
  // itself since theta is already logarithmic.
  double beta0(double u) const {
    if (recipe == PropCase::log_bump) return beta(u) * theta(log_plus(u));
    return beta(u) * theta(u);
  }

  double B(double u) const { return u * beta(u); }
  double B0(double u) const { return u * beta0(u); }

  std::function<double(double)> beta_fn() const {
    return [*this](double u) { return beta(u); };
  }
  std::function<double(double)> beta0_fn() const {
    return [*this](double u) { return beta0(u); };
  }

  static BetaFactor log_case(double p, double eta) {
    requireParams(p, eta, eta);
    return BetaFactor{p, eta, eta, PropCase::log_bump};
  }

  static BetaFactor loglog_case(double p, double eta, double eta_prime) {
    requireParams(p, eta, eta_prime);
    return BetaFactor{p, eta, eta_prime, PropCase::loglog_bump};
  }

 private:
  static void requireParams(double p, double eta, double eta_prime) {
    if (!(p > 1.0)) throw std::invalid_argument("beta_factor: need p > 1");
    if (!(eta > 0.0) || !(eta_prime > 0.0))
      throw std::invalid_argument("beta_factor: need eta > 0");
  }
};

// ---------------------------------------------------------------------------
// Distribution function and the distribution-sum Orlicz average
// ---------------------------------------------------------------------------

// |{x in Q : sigma(x) > lam}| / |Q| by exact cell counting.  Strict
// inequality: a cell equal to lam does not count.
inline double distribution(const Weight& sigma, const Cube& q, double lam) {
  if (!(lam >= 0.0))
    throw std::invalid_argument("distribution: need lam >= 0");
  const auto cells = sigma.grid().cells_of(q);
  std::size_t gt = 0;
  for (std::uint64_t c : cells)
    if (sigma.cells()[c] > lam) ++gt;
  return static_cast<double>(gt) / static_cast<double>(cells.size());
}

// int_0^inf D(lam) beta(1/D(lam)) dlam as an exact sum.  D is a right
// continuous step function with jumps at the distinct cell values, so the
// integral is sum_i (u_{i+1} - u_i) D(u_i) beta(1/D(u_i)) with u_0 = 0 and
// u_1 < ... < u_m the distinct positive values; past u_m the integrand is 0.
inline double orlicz_via_distribution(
    const Weight& sigma, const Cube& q,
    const std::function<double(double)>& beta) {
  const auto cells = sigma.grid().cells_of(q);
  std::vector<double> vals;
  vals.reserve(cells.size());
  for (std::uint64_t c : cells) {
    const double v = sigma.cells()[c];
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("orlicz_via_distribution: bad cell value");
    vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  std::vector<double> u{0.0};
  for (double v : vals)
    if (v > u.back()) u.push_back(v);
  const double n = static_cast<double>(vals.size());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const auto gt = vals.end() - std::upper_bound(vals.begin(), vals.end(), u[i]);
    const double d = static_cast<double>(gt) / n;  // > 0: u[i+1] is a value
    acc += (u[i + 1] - u[i]) * d * beta(1.0 / d);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Sampled weak concavity
// ---------------------------------------------------------------------------

struct WeakConcavityReport {
  bool pass = false;
  double worst = 1.0;  // smallest admissible C found by sampling
};

// Random convex combinations of up to 8 points of [lo, hi]; the report's
// worst is the largest observed sum lam_j f(x_j) / f(sum lam_j x_j), clamped
// below at 1.  Points are drawn log-uniformly when lo > 0 so that wide
// intervals get small-end coverage; weights are normalized exponentials.
inline WeakConcavityReport weak_concavity_check(
    const std::function<double(double)>& f, double lo, double hi,
    int trials = 10000, double cap = 16.0, std::uint64_t seed = 1) {
  if (!(lo < hi) || !(lo >= 0.0))
    throw std::invalid_argument("weak_concavity: need 0 <= lo < hi");
  if (trials < 1) throw std::invalid_argument("weak_concavity: trials < 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(2, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool log_scale = lo > 0.0;
  const double a = log_scale ? std::log(lo) : lo;
  const double b = log_scale ? std::log(hi) : hi;
  const auto draw_point = [&] {
    const double s = a + (b - a) * unit(rng);
    return log_scale ? std::exp(s) : s;
  };
  WeakConcavityReport rep;
  rep.worst = 1.0;
  for (int t = 0; t < trials; ++t) {
    const int n = pick_n(rng);
    double wsum = 0.0, xbar = 0.0, fbar = 0.0;
    double wts[8], xs[8];
    for (int j = 0; j < n; ++j) {
      wts[j] = -std::log(std::max(unit(rng), 1e-300));
      xs[j] = draw_point();
      wsum += wts[j];
    }
    for (int j = 0; j < n; ++j) {
      const double lam = wts[j] / wsum;
      xbar += lam * xs[j];
      fbar += lam * f(xs[j]);
    }
    const double fx = f(xbar);
    if (!(fx > 0.0)) {
      rep.worst = std::numeric_limits<double>::infinity();
      break;
    }
    rep.worst = std::max(rep.worst, fbar / fx);
  }
  rep.pass = rep.worst <= cap;
  return rep;
}

// ---------------------------------------------------------------------------
// Per-cube self-improvement inequality
// ---------------------------------------------------------------------------

struct SelfImproveRow {
  double lhs = 0.0;    // <sigma>_{B0,Q} via the distribution sum on beta0
  double rhs = 0.0;    // <sigma>_{B,Q} theta(<sigma>_{B,Q} / <sigma>_Q)
  double ratio = 0.0;  // lhs / rhs
  bool skipped = false;  // sigma has no mass on Q
};

inline SelfImproveRow self_improve_check(const Weight& sigma, const Cube& q,
                                         const BetaFactor& bf) {
  SelfImproveRow row;
  const double savg = sigma.average(q);
  if (!(savg > 0.0)) {
    row.skipped = true;
    return row;
  }
  const double b = orlicz_via_distribution(sigma, q, bf.beta_fn());
  row.lhs = orlicz_via_distribution(sigma, q, bf.beta0_fn());
  row.rhs = b * bf.theta(b / savg);
  row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
  return row;
}

// ---------------------------------------------------------------------------
// Full narrowing pipeline
// ---------------------------------------------------------------------------

struct PropEtaReport {
  double p = 0.0;
  double eta = 0.0;
  double eta_prime = 0.0;
  PropCase recipe = PropCase::log_bump;

  double hypothesis = 0.0;  // separated constant with the wide dual bump
  Cube hypothesis_argmax;
  double conclusion = 0.0;  // entangled constant with the narrowed bump
  Cube conclusion_argmax;
  double ratio = 0.0;  // conclusion / hypothesis

  double eps_scale = 0.0;       // normalization scale of the penalty
  double eps_quadrature = 0.0;  // int eps^{-p'} dt/t after normalizing; ~1

  // Worst per-cube links of the chain, taken over cubes with sigma mass.
  // t_Q = <sigma>_{B,Q} / <sigma>_Q is the discount argument.
  double r_theta = 0.0;  // <sigma>_{B0,Q} / (<sigma>_{B,Q} theta(t_Q))
  double r_ep = 0.0;     // eps(t_Q)^{p'} theta(t_Q)
  double r_chain = 0.0;  // eps(t_Q)^{p'} <sigma>_{B0,Q} <w>_Q^{p'/p} / H^{p'}
  int skipped_cubes = 0;
};

// Builds both constants and walks the per-cube chain.  The wide family is
// log_bump(p, eta) (log recipe) or loglog_bump(p, 1 + eta) (loglog recipe);
// the narrowed family is log_bump(p, eta/2) resp. loglog_bump(p, eta'/p).
// The penalty is normalized against p', so the reported constants are
// comparable across recipes.
inline PropEtaReport proposition_eta(const Weight& sigma, const Weight& w,
                                     double p, double eta, PropCase recipe,
                                     std::optional<double> eta_prime = {}) {
  if (!(p > 1.0)) throw std::invalid_argument("proposition_eta: need p > 1");
  if (!(eta > 0.0))
    throw std::invalid_argument("proposition_eta: need eta > 0");
  const double ep = eta_prime.value_or(eta);
  if (!(ep > 0.0))
    throw std::invalid_argument("proposition_eta: need eta' > 0");
  const double pc = p / (p - 1.0);

  YoungFunction wide = recipe == PropCase::log_bump
                           ? YoungFunction::log_bump(p, eta)
                           : YoungFunction::loglog_bump(p, 1.0 + eta);
  YoungFunction narrow = recipe == PropCase::log_bump
                             ? YoungFunction::log_bump(p, 0.5 * eta)
                             : YoungFunction::loglog_bump(p, ep / p);
  EpsilonFunction eps =
      (recipe == PropCase::log_bump
           ? EpsilonFunction::power_law(0.5 * eta / pc)
           : EpsilonFunction::log_power((1.0 + ep) / pc))
          .normalized(pc);
  const BetaFactor bf = recipe == PropCase::log_bump
                            ? BetaFactor::log_case(p, eta)
                            : BetaFactor::loglog_case(p, eta, ep);

  PropEtaReport rep;
  rep.p = p;
  rep.eta = eta;
  rep.eta_prime = ep;
  rep.recipe = recipe;
  rep.eps_scale = eps.scale();
  rep.eps_quadrature = eps.normalization_integral(pc);

  const CubeValue hyp = separated_bump_report(sigma, w, dual_young(wide), p);
  rep.hypothesis = hyp.value;
  rep.hypothesis_argmax = hyp.argmax;
  const EntangledReport con = entangled_bump_report(
      sigma, w, dual_young(narrow), eps, p, EntangleArg::one_plus_rho);
  rep.conclusion = con.value;
  rep.conclusion_argmax = con.argmax;
  rep.ratio = rep.hypothesis > 0.0 ? rep.conclusion / rep.hypothesis : 0.0;

  const auto beta = bf.beta_fn();
  const auto beta0 = bf.beta0_fn();
  const double hpow =
      rep.hypothesis > 0.0 ? std::pow(rep.hypothesis, pc) : 0.0;
  const auto& grid = sigma.grid();
  for (int k = 0; k <= grid.depth(); ++k)
    for (std::uint64_t i = 0; i < grid.cubes_at(k); ++i) {
      const Cube q = grid.cube_from_linear(k, i);
      const double savg = sigma.average(q);
      if (!(savg > 0.0)) {
        ++rep.skipped_cubes;
        continue;
      }
      const double b = orlicz_via_distribution(sigma, q, beta);
      const double b0 = orlicz_via_distribution(sigma, q, beta0);
      const double t = b / savg;
      const double th = bf.theta(t);
      const double pen = std::pow(eps(t), pc);
      if (th > 0.0 && b > 0.0)
        rep.r_theta = std::max(rep.r_theta, b0 / (b * th));
      rep.r_ep = std::max(rep.r_ep, pen * th);
      if (hpow > 0.0)
        rep.r_chain = std::max(
            rep.r_chain, pen * b0 * std::pow(w.average(q), pc / p) / hpow);
    }
  return rep;
}

}  // namespace bumplab

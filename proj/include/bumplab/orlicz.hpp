#ifndef BUMPLAB_ORLICZ_HPP
#define BUMPLAB_ORLICZ_HPP

// Young functions and Luxembourg norms on finite sample spaces.
//
// All built-in families are normalized so that A(0) = 0 and A(1) = 1.
// Logarithms are clamped: Log t = 1 + max(0, log t), so every log factor
// equals 1 on (0, 1] and the normalization at t = 1 is automatic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bumplab {

// Log t = 1 + max(0, log t).  Defined for t >= 0 (Log 0 = 1 by the clamp).
inline double log_plus(double t) {
  return t > 1.0 ? 1.0 + std::log(t) : 1.0;
}

// Log Log t, with the same clamp applied twice.  log_plus >= 1 always,
// so the outer value is 1 + log(log_plus t) once t > e.
inline double loglog_plus(double t) { return 1.0 + std::log(log_plus(t)); }

inline double logloglog_plus(double t) {
  return 1.0 + std::log(loglog_plus(t));
}

// One point of a discrete measure space: f takes `value` on a set of
// measure `mass`.  Luxembourg norms expect the masses to sum to 1.
struct Sample {
  double value = 0.0;
  double mass = 0.0;
};

enum class YoungFamily { power, log_bump, loglog_bump, tabulated };

// A Young function A with A(0)=0, A(1)=1, superlinear growth.
//
//   power:        A(t) = t^p
//   log_bump:     A(t) = t^p (Log t^{p'})^{-1-(p-1)eta}
//   loglog_bump:  A(t) = t^p (Log t)^{-1} (LogLog t)^{-1-(p-1)eta}
//   tabulated:    geometric interpolation of a monotone sample table
//
// The closed-form dual of each bump family is carried by the same object
// with dual_form = true:
//
//   dual log_bump:    t^{p'} (Log t)^{1/(p-1)+eta}
//   dual loglog_bump: t^{p'} (Log t)^{1/(p-1)} (LogLog t)^{1/(p-1)+eta}
//
// The bump families with clamped logs are increasing only up to bounded
// distortion near t ~ 1 (the log factor kicks in at full strength at
// t = 1); validate() reports the grid index from which monotonicity and
// convexity hold.  The dual forms are increasing and convex everywhere.
class YoungFunction {
 public:
  using Table = std::vector<std::pair<double, double>>;

  static YoungFunction power(double p) {
    requireExponent(p);
    YoungFunction a;
    a.family_ = YoungFamily::power;
    a.p_ = p;
    return a;
  }

  static YoungFunction log_bump(double p, double eta) {
    requireExponent(p);
    if (!(eta > 0.0)) throw std::invalid_argument("log_bump: eta must be > 0");
    YoungFunction a;
    a.family_ = YoungFamily::log_bump;
    a.p_ = p;
    a.eta_ = eta;
    return a;
  }

  static YoungFunction loglog_bump(double p, double eta) {
    requireExponent(p);
    if (!(eta > 0.0))
      throw std::invalid_argument("loglog_bump: eta must be > 0");
    YoungFunction a;
    a.family_ = YoungFamily::loglog_bump;
    a.p_ = p;
    a.eta_ = eta;
    return a;
  }

  // Table rows must be (t, A(t)) with t > 0 strictly increasing and A > 0
  // nondecreasing.  `p` records the leading growth exponent; it drives the
  // below-table continuation and the dual integrand.
  static YoungFunction tabulated(double p, Table table) {
    requireExponent(p);
    if (table.size() < 2)
      throw std::invalid_argument("tabulated: need at least two rows");
    for (std::size_t i = 0; i < table.size(); ++i) {
      auto [t, v] = table[i];
      if (!(t > 0.0) || !std::isfinite(t) || !(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("tabulated: rows must be positive finite");
      if (i > 0 && !(t > table[i - 1].first))
        throw std::invalid_argument("tabulated: abscissae must increase");
    }
    YoungFunction a;
    a.family_ = YoungFamily::tabulated;
    a.p_ = p;
    a.table_ = std::move(table);
    return a;
  }

  YoungFamily family() const { return family_; }
  double p() const { return p_; }
  double eta() const { return eta_; }
  bool dual_form() const { return dual_form_; }
  double normalizer() const { return normalizer_; }
  // Raw value of the defining integral at t=1 for numeric duals; 1 otherwise.
  double raw_scale() const { return raw_scale_; }
  const Table& table() const { return table_; }

  double conjugate_exponent() const { return p_ / (p_ - 1.0); }

  // Leading power of t: p for primal forms, p' for dual forms.
  double growth_exponent() const {
    return dual_form_ ? conjugate_exponent() : p_;
  }

  double operator()(double t) const { return eval(t); }

  double eval(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::domain_error("young eval: argument must be finite and >= 0");
    if (t == 0.0) return 0.0;
    const double pc = conjugate_exponent();
    double v = 0.0;
    switch (family_) {
      case YoungFamily::power:
        v = std::pow(t, p_);
        break;
      case YoungFamily::log_bump:
        v = dual_form_ ? std::pow(t, pc) *
                             std::pow(log_plus(t), 1.0 / (p_ - 1.0) + eta_)
                       : std::pow(t, p_) *
                             std::pow(log_plus(std::pow(t, pc)),
                                      -1.0 - (p_ - 1.0) * eta_);
        break;
      case YoungFamily::loglog_bump:
        v = dual_form_
                ? std::pow(t, pc) * std::pow(log_plus(t), 1.0 / (p_ - 1.0)) *
                      std::pow(loglog_plus(t), 1.0 / (p_ - 1.0) + eta_)
                : std::pow(t, p_) / log_plus(t) *
                      std::pow(loglog_plus(t), -1.0 - (p_ - 1.0) * eta_);
        break;
      case YoungFamily::tabulated:
        v = evalTable(t);
        break;
    }
    return normalizer_ * v;
  }

  // Closed-form dual for the parametric families; see dual_young() below
  // for the numeric route used by tabulated functions.
  YoungFunction closedFormDual() const {
    if (family_ == YoungFamily::tabulated)
      throw std::logic_error("closedFormDual: tabulated family is numeric");
    if (family_ == YoungFamily::power) return power(conjugate_exponent());
    YoungFunction d = *this;
    d.dual_form_ = !dual_form_;
    return d;
  }

  friend YoungFunction dual_young(const YoungFunction& a);

 private:
  static void requireExponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p))
      throw std::invalid_argument("young function: need 1 < p < inf");
  }

  // Geometric interpolation: linear in (log t, log A).  Below the first row
  // the function continues as c t^p; above the last row the final segment's
  // log-log slope is extended.
  double evalTable(double t) const {
    const auto& tb = table_;
    if (t <= tb.front().first) {
      return tb.front().second *
             std::pow(t / tb.front().first, p_);
    }
    if (t >= tb.back().first) {
      const auto& [t1, v1] = tb[tb.size() - 2];
      const auto& [t2, v2] = tb.back();
      const double slope = std::log(v2 / v1) / std::log(t2 / t1);
      return v2 * std::pow(t / t2, slope);
    }
    auto it = std::lower_bound(
        tb.begin(), tb.end(), t,
        [](const std::pair<double, double>& row, double x) {
          return row.first < x;
        });
    const auto& [t2, v2] = *it;
    const auto& [t1, v1] = *(it - 1);
    if (t == t2) return v2;
    const double w = std::log(t / t1) / std::log(t2 / t1);
    return v1 * std::pow(v2 / v1, w);
  }

  YoungFamily family_ = YoungFamily::power;
  double p_ = 2.0;
  double eta_ = 0.0;
  bool dual_form_ = false;
  double normalizer_ = 1.0;
  double raw_scale_ = 1.0;
  Table table_;
};

// Diagnostic shape report for a Young function on the geometric grid
// t = 2^k, k in [k_lo, k_hi].  The clamped-log bump families dip below
// monotone/convex behavior on a bounded window above t = 1, so the grid
// index from which each property holds is reported instead of a flat bool.
struct YoungShape {
  bool zero_at_zero = false;
  bool one_at_one = false;
  bool superlinear_unbounded = false;  // A(t)/t increases by the grid end
  int monotone_from_k = 0;             // A nondecreasing for t >= 2^k
  int convex_from_k = 0;               // difference quotients nondecreasing
};

inline YoungShape validate_young(const YoungFunction& a, int k_lo = -20,
                                 int k_hi = 40) {
  YoungShape s;
  s.zero_at_zero = a.eval(0.0) == 0.0;
  s.one_at_one = std::abs(a.eval(1.0) - 1.0) <= 1e-12;

  std::vector<double> t(static_cast<std::size_t>(k_hi - k_lo + 1));
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = std::ldexp(1.0, k_lo + static_cast<int>(i));
    v[i] = a.eval(t[i]);
  }

  int mono = k_lo;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (v[i] < v[i - 1] * (1.0 - 1e-12)) mono = k_lo + static_cast<int>(i);
  s.monotone_from_k = mono;

  int cvx = k_lo;
  for (std::size_t i = 2; i < t.size(); ++i) {
    const double d1 = (v[i - 1] - v[i - 2]) / (t[i - 1] - t[i - 2]);
    const double d2 = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
    if (d2 < d1 * (1.0 - 1e-9)) cvx = k_lo + static_cast<int>(i);
  }
  s.convex_from_k = cvx;

  const double r_last = v.back() / t.back();
  const double r_mid = v[t.size() / 2] / t[t.size() / 2];
  const double r_first = v.front() / t.front();
  s.superlinear_unbounded = r_last > 4.0 * r_mid && r_mid >= r_first * 0.999;
  return s;
}

// ---------------------------------------------------------------------------
// Luxembourg norm
// ---------------------------------------------------------------------------

namespace detail {

inline void checkSamples(const std::vector<Sample>& samples) {
  if (samples.empty())
    throw std::invalid_argument("luxembourg_norm: empty sample list");
  double total = 0.0;
  for (const auto& s : samples) {
    if (!(s.value >= 0.0) || !std::isfinite(s.value))
      throw std::invalid_argument(
          "luxembourg_norm: values must be finite and >= 0");
    if (!(s.mass >= 0.0) || !std::isfinite(s.mass))
      throw std::invalid_argument(
          "luxembourg_norm: masses must be finite and >= 0");
    total += s.mass;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("luxembourg_norm: masses must sum to 1");
}

}  // namespace detail

// inf { lam > 0 : sum A(value_i / lam) mass_i <= 1 } by bisection in
// log(lam).  Bracket [max * 1e-9, max]; A(1) <= 1 for normalized families
// makes the upper end feasible, and the bracket is widened if a raw
// (un-normalized) evaluator needs it.  Samples with value 0 contribute
// A(0) = 0 for every lam and are dropped up front.
inline double luxembourg_norm(const std::vector<Sample>& samples,
                              const std::function<double(double)>& A,
                              double tol = 1e-9) {
  detail::checkSamples(samples);
  std::vector<Sample> pos;
  pos.reserve(samples.size());
  double vmax = 0.0;
  for (const auto& s : samples)
    if (s.value > 0.0 && s.mass > 0.0) {
      pos.push_back(s);
      vmax = std::max(vmax, s.value);
    }
  if (pos.empty()) return 0.0;

  const auto excess = [&](double lam) {
    double g = 0.0;
    for (const auto& s : pos) g += s.mass * A(s.value / lam);
    return g - 1.0;
  };

  double hi = vmax;
  for (int i = 0; i < 200 && excess(hi) > 0.0; ++i) hi *= 2.0;
  if (excess(hi) > 0.0)
    throw std::runtime_error("luxembourg_norm: no feasible scale found");
  double lo = hi * 1e-9;
  if (excess(lo) <= 0.0) return lo;

  while (hi > lo * (1.0 + tol)) {
    const double mid = std::sqrt(lo * hi);
    if (excess(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double luxembourg_norm(const std::vector<Sample>& samples,
                              const YoungFunction& A, double tol = 1e-9) {
  // Powers admit the exact closed form (sum v^p m)^{1/p}.
  if (A.family() == YoungFamily::power) {
    detail::checkSamples(samples);
    double acc = 0.0;
    for (const auto& s : samples)
      if (s.value > 0.0) acc += s.mass * std::pow(s.value, A.p());
    return acc > 0.0 ? std::pow(acc, 1.0 / A.p()) : 0.0;
  }
  return luxembourg_norm(
      samples, [&A](double t) { return A.eval(t); }, tol);
}

// ---------------------------------------------------------------------------
// Numeric dual
// ---------------------------------------------------------------------------

// Dual Young function.  Parametric families use the closed forms listed on
// YoungFunction.  A tabulated function A(t) = t^p alpha(t) is dualized by
// the integral
//
//   conj(T) = int_0^T [s / alpha(s)]^{1/(p-1)} ds,
//             alpha(s) = A(s) / s^p read off the table,
//
// evaluated by trapezoidal quadrature on a geometric grid of 2048 nodes.
// The result is a tabulated function renormalized so conj(1) = 1, with the
// raw value of the integral at 1 kept as raw_scale().
inline YoungFunction dual_young(const YoungFunction& a) {
  if (a.family() != YoungFamily::tabulated) return a.closedFormDual();

  const auto& tb = a.table();
  for (std::size_t i = 1; i < tb.size(); ++i)
    if (tb[i].second < tb[i - 1].second)
      throw std::invalid_argument("dual_young: table values must not decrease");

  const double p = a.p();
  const double pc = a.conjugate_exponent();
  const double inv = 1.0 / (p - 1.0);
  const auto integrand = [&](double s) {
    // [s / alpha(s)]^{1/(p-1)} with alpha = A(s)/s^p.
    return std::pow(std::pow(s, p + 1.0) / a.eval(s), inv);
  };

  const double s_hi = tb.back().first;
  const double s_lo = std::min(tb.front().first, 1e-3) * 1e-3;
  constexpr int kNodes = 2048;
  const double ratio = std::pow(s_hi / s_lo, 1.0 / (kNodes - 1));

  YoungFunction::Table out;
  out.reserve(kNodes);
  // Below s_lo the table continues as c s^p, so the integrand is a pure
  // power and the head integrates in closed form.
  double prev_s = s_lo;
  double prev_f = integrand(s_lo);
  double acc = prev_f * s_lo / pc;
  out.emplace_back(s_lo, acc);
  for (int i = 1; i < kNodes; ++i) {
    const double s = s_lo * std::pow(ratio, i);
    const double f = integrand(s);
    acc += 0.5 * (f + prev_f) * (s - prev_s);
    out.emplace_back(s, acc);
    prev_s = s;
    prev_f = f;
  }

  YoungFunction d = YoungFunction::tabulated(pc, std::move(out));
  const double at_one = d.eval(1.0);
  if (!(at_one > 0.0) || !std::isfinite(at_one))
    throw std::runtime_error("dual_young: degenerate integral");
  d.raw_scale_ = at_one;
  d.normalizer_ = 1.0 / at_one;
  return d;
}

// Samples a parametric family into a tabulated function on a geometric
// grid.  Values are rectified with a running max so the table satisfies
// the monotone-table requirement; the clamped-log bump families dip on a
// bounded window above t = 1 and are otherwise unchanged.
inline YoungFunction tabulate_young(const YoungFunction& a, double t_lo = 1e-6,
                                    double t_hi = 1e9, int nodes = 4096) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || nodes < 2)
    throw std::invalid_argument("tabulate_young: bad grid");
  YoungFunction::Table tb;
  tb.reserve(static_cast<std::size_t>(nodes));
  const double ratio = std::pow(t_hi / t_lo, 1.0 / (nodes - 1));
  double run = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = t_lo * std::pow(ratio, i);
    run = std::max(run, a.eval(t));
    tb.emplace_back(t, run);
  }
  return YoungFunction::tabulated(a.growth_exponent(), std::move(tb));
}

// ---------------------------------------------------------------------------
// B_p integral
// ---------------------------------------------------------------------------

enum class TailVerdict { finite, divergent };

struct BpResult {
  double value = 0.0;          // int_1^{T_max} A(t) t^{-p} dt/t
  TailVerdict verdict = TailVerdict::finite;
  bool tail_known = true;      // false for tabulated functions
};

// Integrability test for int^inf A(t) t^{-p} dt/t.  The quadrature runs in
// u = log t with composite Simpson; the tail verdict is analytic for the
// parametric families and empirical (up to T_max) for tabulated input.
inline BpResult bp_integral(const YoungFunction& a, double p,
                            double t_max = 1e8) {
  if (!(p > 1.0)) throw std::invalid_argument("bp_integral: need p > 1");
  if (!(t_max > 1.0)) throw std::invalid_argument("bp_integral: need T > 1");

  BpResult r;
  constexpr int kIntervals = 4096;  // even
  const double u_hi = std::log(t_max);
  const double h = u_hi / kIntervals;
  const auto f = [&](double u) {
    const double t = std::exp(u);
    return a.eval(t) * std::exp(-p * u);
  };
  double acc = f(0.0) + f(u_hi);
  for (int i = 1; i < kIntervals; ++i)
    acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  r.value = acc * h / 3.0;

  const double q = a.growth_exponent();
  switch (a.family()) {
    case YoungFamily::power:
      r.verdict = q < p ? TailVerdict::finite : TailVerdict::divergent;
      break;
    case YoungFamily::log_bump:
    case YoungFamily::loglog_bump:
      if (q < p)
        r.verdict = TailVerdict::finite;
      else if (q > p)
        r.verdict = TailVerdict::divergent;
      else
        // At the critical exponent the log corrections decide: the primal
        // bumps carry a summable negative power, the dual forms do not.
        r.verdict = a.dual_form() ? TailVerdict::divergent
                                  : TailVerdict::finite;
      break;
    case YoungFamily::tabulated:
      r.verdict = TailVerdict::finite;
      r.tail_known = false;
      break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Generalized Hoelder pairing
// ---------------------------------------------------------------------------

struct HolderReport {
  double lhs = 0.0;    // sum f g dmu
  double rhs = 0.0;    // |f|_A |g|_{dual A}
  double ratio = 0.0;  // lhs / rhs, 0 when rhs == 0
};

// Smallest kappa with s t <= kappa (A(s) + conj(t)) over a log grid.
// Normalized conjugate powers give (1/p)^{1/p} (1/p')^{1/p'}, e.g. 1/2 at
// p = 2 (the constant-1 textbook form keeps 1/p, 1/p' weights that the
// normalization drops).  The clamped-log bump pairs exceed 1 near the dip;
// the excess grows as p drops toward 1 (about 2.4 at p = 2, eta = 1 and
// 6.0 at p = 1.5, eta = 1).
inline double young_gap(const YoungFunction& A, double lo = 1e-4,
                        double hi = 1e6, int n = 400) {
  const YoungFunction D = dual_young(A);
  const double step = std::pow(hi / lo, 1.0 / n);
  std::vector<double> av(static_cast<std::size_t>(n + 1));
  std::vector<double> dv(av.size());
  double x = lo;
  for (std::size_t i = 0; i < av.size(); ++i, x *= step) {
    av[i] = A.eval(x);
    dv[i] = D.eval(x);
  }
  double kappa = 0.0;
  double s = lo;
  for (std::size_t i = 0; i < av.size(); ++i, s *= step) {
    double t = lo;
    for (std::size_t j = 0; j < dv.size(); ++j, t *= step)
      kappa = std::max(kappa, s * t / (av[i] + dv[j]));
  }
  return kappa;
}

// Audit constant for the pairing bound sum f g dmu <= C |f|_A |g|_{conj A}.
// Conjugate powers satisfy it with C = 1 (the norms are exact L^p means).
// Otherwise the modular argument gives C = 2 kappa: after scaling each
// factor by its norm both modulars are <= 1, and the product integrand is
// below kappa times their sum.  The 2% headroom covers the grid gap in
// the kappa scan.
inline double holder_audit_constant(const YoungFunction& A) {
  if (A.family() == YoungFamily::power) return 1.0;
  return 2.0 * 1.02 * young_gap(A);
}

inline HolderReport holder_pair(const std::vector<double>& f,
                                const std::vector<double>& g,
                                const std::vector<double>& masses,
                                const YoungFunction& A) {
  if (f.size() != g.size() || f.size() != masses.size() || f.empty())
    throw std::invalid_argument("holder_pair: size mismatch");
  std::vector<Sample> fs(f.size()), gs(f.size());
  HolderReport rep;
  for (std::size_t i = 0; i < f.size(); ++i) {
    fs[i] = {f[i], masses[i]};
    gs[i] = {g[i], masses[i]};
    rep.lhs += f[i] * g[i] * masses[i];
  }
  const double nf = luxembourg_norm(fs, A);
  const double ng = luxembourg_norm(gs, dual_young(A));
  rep.rhs = nf * ng;
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

}  // namespace bumplab

#endif  // BUMPLAB_ORLICZ_HPP

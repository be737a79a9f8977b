#ifndef BUMPLAB_BUMPS_HPP
#define BUMPLAB_BUMPS_HPP

// Weight constants on a dyadic grid: the two-weight power constant, the
// separated Orlicz bump, and the entangled bump where the Orlicz-to-power
// ratio rho(Q) feeds a normalized penalty function.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bumplab/grid.hpp"
#include "bumplab/orlicz.hpp"

namespace bumplab {

// Luxembourg average of a cell function over one cube.
inline double orlicz_average(const DyadicGrid& grid,
                             const std::vector<double>& values,
                             const YoungFunction& A, const Cube& q) {
  return luxembourg_norm(cube_samples(grid, values, q), A);
}

// sup_Q <w>_Q <sigma>_Q^{p-1} over all dyadic cubes.
struct CubeValue {
  double value = 0.0;
  Cube argmax;
};

namespace detail {

template <class F>
CubeValue sup_over_cubes(const DyadicGrid& grid, F&& per_cube) {
  CubeValue best;
  for (int k = 0; k <= grid.depth(); ++k)
    for (std::uint64_t i = 0; i < grid.cubes_at(k); ++i) {
      const Cube q = grid.cube_from_linear(k, i);
      const double v = per_cube(q);
      if (v > best.value) best = {v, q};
    }
  return best;
}

inline void requireSameGrid(const Weight& a, const Weight& b) {
  if (&a.grid() != &b.grid())
    throw std::invalid_argument("weights must share one grid object");
}

inline std::vector<double> power_cells(const Weight& w, double e) {
  std::vector<double> out(w.cells().size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::pow(w.cells()[i], e);
  return out;
}

}  // namespace detail

inline CubeValue ap_constant_report(const Weight& sigma, const Weight& w,
                                    double p) {
  detail::requireSameGrid(sigma, w);
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant: need p > 1");
  return detail::sup_over_cubes(sigma.grid(), [&](const Cube& q) {
    return w.average(q) * std::pow(sigma.average(q), p - 1.0);
  });
}

inline double ap_constant(const Weight& sigma, const Weight& w, double p) {
  return ap_constant_report(sigma, w, p).value;
}

// rho(Q) = <sigma^{1/p'}>_{Abar,Q} / <sigma>_Q^{1/p'}, the ratio of the
// bumped average to the plain one.  Equals 1 identically when Abar is the
// conjugate power t^{p'}; dual-form bumps dominate that power pointwise,
// so rho >= 1 for them.  Cubes with sigma(Q) = 0 have no ratio.
inline double rho_ratio(const Weight& sigma, const YoungFunction& Abar,
                        double p, const Cube& q) {
  if (!(p > 1.0)) throw std::invalid_argument("rho_ratio: need p > 1");
  if (!(sigma.mass(q) > 0.0))
    throw std::domain_error("rho_ratio: sigma vanishes on the cube");
  const double pc = p / (p - 1.0);
  const auto powered = detail::power_cells(sigma, 1.0 / pc);
  const double bumped = orlicz_average(sigma.grid(), powered, Abar, q);
  return bumped / std::pow(sigma.average(q), 1.0 / pc);
}

// Separated bump constant: sup_Q <sigma^{1/p'}>_{Abar,Q} <w>_Q^{1/p}.
// Abar is applied to sigma^{1/p'} as given; callers pick the bump side by
// argument order, so the mirror-image constant is
// separated_bump(w, sigma, Bbar, p').
inline CubeValue separated_bump_report(const Weight& sigma, const Weight& w,
                                       const YoungFunction& Abar, double p) {
  detail::requireSameGrid(sigma, w);
  if (!(p > 1.0)) throw std::invalid_argument("separated_bump: need p > 1");
  const double pc = p / (p - 1.0);
  const auto powered = detail::power_cells(sigma, 1.0 / pc);
  const auto& grid = sigma.grid();
  return detail::sup_over_cubes(grid, [&](const Cube& q) {
    if (!(w.mass(q) > 0.0) || !(sigma.mass(q) > 0.0)) return 0.0;
    const double bumped = orlicz_average(grid, powered, Abar, q);
    return bumped * std::pow(w.average(q), 1.0 / p);
  });
}

inline double separated_bump(const Weight& sigma, const Weight& w,
                             const YoungFunction& Abar, double p) {
  return separated_bump_report(sigma, w, Abar, p).value;
}

// ---------------------------------------------------------------------------
// Penalty functions
// ---------------------------------------------------------------------------

enum class EpsilonFamily { power_law, log_power, triple_log };

// Increasing penalty on [1, inf), evaluated as eps(max(t, 1)):
//
//   power_law:  c t^a                       (a > 0)
//   log_power:  c (Log t)^b                 (b > 0)
//   triple_log: c (Log t)^{1/q} (LogLog t)^{1/q} (LogLogLog t)^{(1+eta)/q}
//
// where q is the exponent the family was normalized against.  The scale c
// is chosen so that int_1^inf eps(t)^{-q} dt/t = 1; see normalized().
class EpsilonFunction {
 public:
  static EpsilonFunction power_law(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("epsilon: need a > 0");
    EpsilonFunction e;
    e.family_ = EpsilonFamily::power_law;
    e.param_ = a;
    return e;
  }

  static EpsilonFunction log_power(double b) {
    if (!(b > 0.0)) throw std::invalid_argument("epsilon: need b > 0");
    EpsilonFunction e;
    e.family_ = EpsilonFamily::log_power;
    e.param_ = b;
    return e;
  }

  static EpsilonFunction triple_log(double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("epsilon: need eta > 0");
    EpsilonFunction e;
    e.family_ = EpsilonFamily::triple_log;
    e.param_ = eta;
    return e;
  }

  EpsilonFamily family() const { return family_; }
  double param() const { return param_; }
  double scale() const { return scale_; }
  // Exponent q the scale was normalized against; 0 before normalization.
  double normalized_q() const { return q_; }

  double operator()(double t) const {
    const double u = std::max(t, 1.0);
    switch (family_) {
      case EpsilonFamily::power_law:
        return scale_ * std::pow(u, param_);
      case EpsilonFamily::log_power:
        return scale_ * std::pow(log_plus(u), param_);
      case EpsilonFamily::triple_log: {
        // The triple-log shape depends on the exponent it was normalized
        // against; evaluating before normalized() would guess silently.
        if (!(q_ > 0.0))
          throw std::logic_error(
              "epsilon: triple_log must be normalized before evaluation");
        return scale_ * std::pow(log_plus(u), 1.0 / q_) *
               std::pow(loglog_plus(u), 1.0 / q_) *
               std::pow(logloglog_plus(u), (1.0 + param_) / q_);
      }
    }
    return 0.0;
  }

  // int_1^inf eps(t)^{-q} dt/t: composite Simpson in u = log t on [0, U],
  // U = log(1e8), plus the analytic tail of the family beyond.
  double normalization_integral(double q) const {
    if (!(q > 1.0))
      throw std::invalid_argument("epsilon: normalization needs q > 1");
    if (family_ == EpsilonFamily::log_power && !(param_ * q > 1.0))
      throw std::invalid_argument("epsilon: log_power needs b q > 1");
    constexpr int kIntervals = 1 << 15;
    const double u_hi = std::log(1e8);
    const double h = u_hi / kIntervals;
    const auto f = [&](double u) {
      return std::pow(evalAt(std::exp(u), q), -q);
    };
    double acc = f(0.0) + f(u_hi);
    for (int i = 1; i < kIntervals; ++i)
      acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0 + tailBeyond(u_hi, q);
  }

  // Returns a copy rescaled so normalization_integral(q) == 1: the raw
  // integral I with c = 1 scales as c^{-q} I, so c = I^{1/q}.
  EpsilonFunction normalized(double q) const {
    EpsilonFunction raw = *this;
    raw.scale_ = 1.0;
    raw.q_ = q;
    const double integral = raw.normalization_integral(q);
    EpsilonFunction out = raw;
    out.scale_ = std::pow(integral, 1.0 / q);
    return out;
  }

  // Exact scales for cross-checking the numeric route:
  //   power_law:  (a q)^{-1/q}
  //   log_power:  (b q - 1)^{-1/q}
  //   triple_log: eta^{-1/q}
  double closed_form_scale(double q) const {
    switch (family_) {
      case EpsilonFamily::power_law:
        return std::pow(param_ * q, -1.0 / q);
      case EpsilonFamily::log_power:
        return std::pow(param_ * q - 1.0, -1.0 / q);
      case EpsilonFamily::triple_log:
        return std::pow(param_, -1.0 / q);
    }
    return 0.0;
  }

 private:
  // Evaluate with the triple_log q defaulting to the integration exponent
  // during normalization (before q_ is set).
  double evalAt(double t, double q) const {
    if (family_ != EpsilonFamily::triple_log || q_ > 0.0)
      return (*this)(t);
    const double u = std::max(t, 1.0);
    return scale_ * std::pow(log_plus(u), 1.0 / q) *
           std::pow(loglog_plus(u), 1.0 / q) *
           std::pow(logloglog_plus(u), (1.0 + param_) / q);
  }

  // Analytic continuation of the integral past u = log T:
  //   power_law:  c^{-q} e^{-a q u} / (a q)
  //   log_power:  c^{-q} (1+u)^{1-bq} / (bq - 1)
  //   triple_log: c^{-q} (1 + log(1+log(1+u)))^{-eta} / eta
  double tailBeyond(double u, double q) const {
    const double cq = std::pow(scale_, -q);
    switch (family_) {
      case EpsilonFamily::power_law:
        return cq * std::exp(-param_ * q * u) / (param_ * q);
      case EpsilonFamily::log_power:
        return cq * std::pow(1.0 + u, 1.0 - param_ * q) / (param_ * q - 1.0);
      case EpsilonFamily::triple_log:
        return cq * std::pow(1.0 + std::log(1.0 + std::log(1.0 + u)),
                             -param_) /
               param_;
    }
    return 0.0;
  }

  EpsilonFamily family_ = EpsilonFamily::power_law;
  double param_ = 1.0;
  double scale_ = 1.0;
  double q_ = 0.0;
};

// ---------------------------------------------------------------------------
// Entangled bump
// ---------------------------------------------------------------------------

// What the penalty is evaluated at: 1 + rho(Q) for the headline constant,
// bare rho(Q) for the decomposition diagnostics.
enum class EntangleArg { one_plus_rho, rho };

struct EntangledReport {
  double value = 0.0;
  Cube argmax;
  double rho_at_argmax = 0.0;
};

// sup_Q eps(arg(Q)) <sigma^{1/p'}>_{Abar,Q} <w>_Q^{1/p}.  Cubes where
// sigma vanishes contribute 0 (the bumped average itself is 0 there).
inline EntangledReport entangled_bump_report(
    const Weight& sigma, const Weight& w, const YoungFunction& Abar,
    const EpsilonFunction& eps, double p,
    EntangleArg mode = EntangleArg::one_plus_rho) {
  detail::requireSameGrid(sigma, w);
  if (!(p > 1.0)) throw std::invalid_argument("entangled_bump: need p > 1");
  const double pc = p / (p - 1.0);
  const auto powered = detail::power_cells(sigma, 1.0 / pc);
  const auto& grid = sigma.grid();
  EntangledReport best;
  for (int k = 0; k <= grid.depth(); ++k)
    for (std::uint64_t i = 0; i < grid.cubes_at(k); ++i) {
      const Cube q = grid.cube_from_linear(k, i);
      if (!(sigma.mass(q) > 0.0)) continue;
      const double bumped = orlicz_average(grid, powered, Abar, q);
      const double rho = bumped / std::pow(sigma.average(q), 1.0 / pc);
      const double arg = mode == EntangleArg::one_plus_rho ? 1.0 + rho : rho;
      const double v = eps(arg) * bumped * std::pow(w.average(q), 1.0 / p);
      if (v > best.value) best = {v, q, rho};
    }
  return best;
}

inline double entangled_bump(const Weight& sigma, const Weight& w,
                             const YoungFunction& Abar,
                             const EpsilonFunction& eps, double p,
                             EntangleArg mode = EntangleArg::one_plus_rho) {
  return entangled_bump_report(sigma, w, Abar, eps, p, mode).value;
}

// ---------------------------------------------------------------------------
// Orlicz maximal function
// ---------------------------------------------------------------------------

// M_A f per finest cell: max over all cubes containing the cell of the
// Luxembourg average <f>_{A,Q}.  Power families ride the mass tree of f^p
// (exact closed form per cube); other families evaluate per-cube norms.
inline std::vector<double> orlicz_maximal(const DyadicGrid& grid,
                                          const std::vector<double>& f,
                                          const YoungFunction& A) {
  if (f.size() != grid.cell_count())
    throw std::invalid_argument("orlicz_maximal: size mismatch");
  const int L = grid.depth();
  std::vector<double> out(f.size(), 0.0);

  const auto lift = [&](int level, const std::vector<double>& per_cube) {
    for (std::uint64_t i = 0; i < grid.cubes_at(level); ++i) {
      const double v = per_cube[i];
      if (v <= 0.0) continue;
      for (std::uint64_t c :
           grid.cells_of(grid.cube_from_linear(level, i)))
        out[c] = std::max(out[c], v);
    }
  };

  if (A.family() == YoungFamily::power) {
    std::vector<double> powered(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(f[i] >= 0.0) || !std::isfinite(f[i]))
        throw std::invalid_argument("orlicz_maximal: f must be >= 0");
      powered[i] = std::pow(f[i], A.p());
    }
    const Weight tree(grid, powered);
    for (int k = 0; k <= L; ++k) {
      std::vector<double> avg(grid.cubes_at(k));
      for (std::uint64_t i = 0; i < avg.size(); ++i)
        avg[i] = std::pow(tree.average(grid.cube_from_linear(k, i)),
                          1.0 / A.p());
      lift(k, avg);
    }
    return out;
  }

  for (int k = 0; k <= L; ++k) {
    std::vector<double> avg(grid.cubes_at(k));
    for (std::uint64_t i = 0; i < avg.size(); ++i)
      avg[i] = orlicz_average(grid, f, A, grid.cube_from_linear(k, i));
    lift(k, avg);
  }
  return out;
}

// |g|_{L^2(dx)} over the unit cube for a cell function.
inline double l2_norm(const DyadicGrid& grid, const std::vector<double>& g) {
  if (g.size() != grid.cell_count())
    throw std::invalid_argument("l2_norm: size mismatch");
  const double cell = std::ldexp(1.0, -grid.depth() * grid.dimension());
  double acc = 0.0;
  for (double v : g) acc += v * v * cell;
  return std::sqrt(acc);
}

}  // namespace bumplab

#endif  // BUMPLAB_BUMPS_HPP

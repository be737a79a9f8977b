#ifndef BUMPLAB_CORONA_HPP
#define BUMPLAB_CORONA_HPP

// Stopping-time decomposition of a sparse collection driven by a weight
// pair (sigma, w) and a test function g, penalty stratification, and the
// blockwise ratio report for the three-regime summation estimates.
//
// Two stopping families are built over the member cubes, rooted at a cube
// that must itself be a member:
//
//   T family: children of T are the maximal members Q with
//             <g>^w_Q > factor * <g>^w_T.
//   S family: children of S are the maximal members Q with
//             <sigma>_Q > factor * <sigma>_S  OR  Q in T.
//
// The restart clause makes T a subset of S by construction.  Anchors Q^t
// and Q^s are the minimal family members containing Q; distances i_T, i_S
// count collection generations (strict member-ancestors), so Q^s inside
// Q^t forces i_S <= i_T.  Cubes with w(Q) = 0 average to 0 and can never
// be selected by the g-stopping rule.
//
// Every member gets exactly one regime label relative to its anchors:
//
//   1: <w>_Q^{1/p}      <  2^{2 i_T} <w>_{Q^t}^{1/p}
//   2: not 1, and <sigma>_Q^{1/p} < 2^{-i_S/2} <sigma>_{Q^s}^{1/p}
//   3: neither smallness holds.
//
// The per-cube penalty level is psi(Q) = eps(arg) <sigma^{1/p'}>_{Abar,Q}
// <w>_Q^{1/p} with arg = rho(Q) or 1 + rho(Q).  alpha_strata layers the
// collection by j = floor(log2(psi_max / psi)); within a stratum psi
// varies by at most 2, which is what the decay diagnostics need, and the
// stratum inherits the penalty level alpha_j = psi_max * 2^{-j}.  Cubes
// with psi = 0 land in a null stratum (index -1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bumplab/bumps.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/orlicz.hpp"
#include "bumplab/sparse.hpp"

namespace bumplab {

struct CoronaOptions {
  double stopping_factor = 10.0;
  // Root of the decomposition; defaults to the grid root.  It must be a
  // member of the collection, and only members inside it participate.
  std::optional<Cube> root;
};

struct CoronaCube {
  Cube cube;
  int parent = -1;       // row of the nearest strict member-ancestor
  int q_generation = 0;  // strict member-ancestors in the collection
  bool in_t = false;
  bool in_s = false;
  int t_anchor = -1;  // row index of Q^t
  int s_anchor = -1;  // row index of Q^s
  int i_t = 0;
  int i_s = 0;
  int regime = 3;
  double sigma_avg = 0.0;
  double w_avg = 0.0;
  double g_wavg = 0.0;           // <g>^w_Q, 0 when w(Q) = 0
  double w_sharp_fraction = 1.0; // w(T#)/w(T) on T rows, 1 when w(T) = 0
};

class CoronaDecomposition {
 public:
  double p = 2.0;
  std::vector<CoronaCube> rows;  // canonical member order
  std::vector<double> g;         // the cell function the T tree stopped on
  int t_sharp_failures = 0;      // T rows with w(T#) < w(T)/2

  const DyadicGrid& grid() const { return *grid_; }
  const std::vector<int>& t_children(std::size_t row) const {
    return t_children_.at(row);
  }
  const std::vector<int>& s_children(std::size_t row) const {
    return s_children_.at(row);
  }
  int row_of(const Cube& q) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].cube == q) return static_cast<int>(i);
    return -1;
  }
  std::size_t t_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.in_t;
    return n;
  }
  std::size_t s_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.in_s;
    return n;
  }
  std::vector<Cube> member_cubes() const {
    std::vector<Cube> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.cube);
    return out;
  }

 private:
  const DyadicGrid* grid_ = nullptr;
  std::vector<std::vector<int>> t_children_;
  std::vector<std::vector<int>> s_children_;
  friend CoronaDecomposition build_corona(const Weight&, const Weight&,
                                          const std::vector<double>&,
                                          const std::vector<Cube>&, double,
                                          CoronaOptions);
};

inline CoronaDecomposition build_corona(const Weight& sigma, const Weight& w,
                                        const std::vector<double>& g,
                                        const std::vector<Cube>& members,
                                        double p, CoronaOptions opts = {}) {
  if (!(p > 1.0)) throw std::invalid_argument("corona: need p > 1");
  if (&sigma.grid() != &w.grid())
    throw std::invalid_argument("corona: weights must share a grid");
  const auto& grid = sigma.grid();
  if (g.size() != grid.cell_count())
    throw std::invalid_argument("corona: g size mismatch");
  for (double v : g)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("corona: g must be nonnegative finite");
  if (!(opts.stopping_factor > 1.0))
    throw std::invalid_argument("corona: stopping factor must exceed 1");

  std::vector<Cube> sorted = members;
  canonicalize(grid, sorted);
  const Cube root = opts.root.value_or(Cube{0, 0, 0});
  grid.requireCube(root);
  bool root_found = false;
  for (const Cube& q : sorted) root_found = root_found || q == root;
  if (!root_found)
    throw std::invalid_argument(
        "corona: root cube is not a member of the collection");
  {
    std::vector<Cube> inside;
    for (const Cube& q : sorted)
      if (grid.contains(root, q)) inside.push_back(q);
    sorted = std::move(inside);
  }

  CoronaDecomposition out;
  out.p = p;
  out.g = g;
  out.grid_ = &grid;
  out.rows.resize(sorted.size());

  // Nearest strict member-ancestor per row; canonical order places
  // ancestors before descendants, so a single backward scan suffices.
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    int best = -1;
    for (std::size_t j = 0; j < i; ++j)
      if (sorted[j].level < sorted[i].level &&
          grid.contains(sorted[j], sorted[i]))
        if (best < 0 || sorted[j].level > sorted[best].level)
          best = static_cast<int>(j);
    out.rows[i].parent = best;
  }

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto& row = out.rows[i];
    row.cube = sorted[i];
    row.q_generation =
        row.parent < 0 ? 0 : out.rows[row.parent].q_generation + 1;
    row.sigma_avg = sigma.average(sorted[i]);
    row.w_avg = w.average(sorted[i]);
    row.g_wavg = w.weighted_average(g, sorted[i]);

    if (row.parent < 0) {
      row.in_t = row.in_s = true;
      row.t_anchor = row.s_anchor = static_cast<int>(i);
      continue;
    }
    const auto& par = out.rows[row.parent];
    const int t_ref = par.t_anchor;
    row.in_t =
        row.g_wavg > opts.stopping_factor * out.rows[t_ref].g_wavg;
    row.t_anchor = row.in_t ? static_cast<int>(i) : t_ref;
    const int s_ref = par.s_anchor;
    row.in_s = row.in_t || row.sigma_avg > opts.stopping_factor *
                                               out.rows[s_ref].sigma_avg;
    row.s_anchor = row.in_s ? static_cast<int>(i) : s_ref;
  }

  out.t_children_.assign(out.rows.size(), {});
  out.s_children_.assign(out.rows.size(), {});
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    if (row.parent < 0) continue;
    if (row.in_t)
      out.t_children_[out.rows[row.parent].t_anchor].push_back(
          static_cast<int>(i));
    if (row.in_s)
      out.s_children_[out.rows[row.parent].s_anchor].push_back(
          static_cast<int>(i));
  }

  for (auto& row : out.rows) {
    row.i_t = row.q_generation - out.rows[row.t_anchor].q_generation;
    row.i_s = row.q_generation - out.rows[row.s_anchor].q_generation;
    const auto& t = out.rows[row.t_anchor];
    const auto& s = out.rows[row.s_anchor];
    const bool w_small =
        std::pow(row.w_avg, 1.0 / p) <
        std::ldexp(1.0, 2 * row.i_t) * std::pow(t.w_avg, 1.0 / p);
    const bool sigma_small =
        std::pow(row.sigma_avg, 1.0 / p) <
        std::exp2(-0.5 * row.i_s) * std::pow(s.sigma_avg, 1.0 / p);
    row.regime = w_small ? 1 : (sigma_small ? 2 : 3);
  }

  // T# masses: direct stopping children are pairwise disjoint, so the
  // subtraction is exact up to one rounding per child.
  for (std::size_t ti = 0; ti < out.rows.size(); ++ti) {
    auto& t = out.rows[ti];
    if (!t.in_t) continue;
    const double wt = w.mass(t.cube);
    if (!(wt > 0.0)) continue;
    double carved = 0.0;
    for (int ci : out.t_children_[ti]) carved += w.mass(out.rows[ci].cube);
    t.w_sharp_fraction = (wt - carved) / wt;
    if (t.w_sharp_fraction < 0.5) out.t_sharp_failures += 1;
  }
  return out;
}

// Piecewise-constant envelope attached to a T row: the stopped average on
// T# and the child's average on each direct stopping child; zero outside T.
inline std::vector<double> corona_g_function(const CoronaDecomposition& d,
                                             std::size_t t_row) {
  if (t_row >= d.rows.size() || !d.rows[t_row].in_t)
    throw std::invalid_argument("corona_g_function: not a T row");
  const auto& grid = d.grid();
  std::vector<double> out(grid.cell_count(), 0.0);
  for (std::uint64_t c : grid.cells_of(d.rows[t_row].cube))
    out[c] = d.rows[t_row].g_wavg;
  for (int ci : d.t_children(t_row))
    for (std::uint64_t c : grid.cells_of(d.rows[ci].cube))
      out[c] = d.rows[ci].g_wavg;
  return out;
}

// ---------------------------------------------------------------------------
// Penalty strata
// ---------------------------------------------------------------------------

struct AlphaStratum {
  int index = 0;       // -1 collects the psi = 0 cubes
  double alpha = 0.0;  // psi_max * 2^{-index}, 0 for the null stratum
  EntangleArg arg = EntangleArg::one_plus_rho;
  std::vector<Cube> members;
  std::vector<double> psi;  // aligned with members
  std::vector<double> rho;  // aligned with members, 0 when sigma(Q) = 0
};

namespace detail {

inline int stratum_index(double psi_max, double psi) {
  if (!(psi > 0.0)) return -1;
  return static_cast<int>(std::floor(std::log2(psi_max / psi)));
}

}  // namespace detail

inline std::vector<AlphaStratum> alpha_strata(
    const Weight& sigma, const Weight& w, const std::vector<Cube>& members,
    double p, const YoungFunction& A, const EpsilonFunction& eps,
    EntangleArg arg = EntangleArg::one_plus_rho) {
  if (!(p > 1.0)) throw std::invalid_argument("alpha_strata: need p > 1");
  if (&sigma.grid() != &w.grid())
    throw std::invalid_argument("alpha_strata: weights must share a grid");
  const auto& grid = sigma.grid();
  std::vector<Cube> sorted = members;
  canonicalize(grid, sorted);
  if (sorted.empty())
    throw std::invalid_argument("alpha_strata: no members");

  const double pc = p / (p - 1.0);
  const YoungFunction Abar = dual_young(A);
  const auto powered = detail::power_cells(sigma, 1.0 / pc);

  std::vector<double> psi(sorted.size(), 0.0), rho(sorted.size(), 0.0);
  double psi_max = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double savg = sigma.average(sorted[i]);
    if (!(savg > 0.0)) continue;
    const double bumped = orlicz_average(grid, powered, Abar, sorted[i]);
    rho[i] = bumped / std::pow(savg, 1.0 / pc);
    const double at =
        arg == EntangleArg::one_plus_rho ? 1.0 + rho[i] : rho[i];
    psi[i] = eps(at) * bumped * std::pow(w.average(sorted[i]), 1.0 / p);
    psi_max = std::max(psi_max, psi[i]);
  }

  std::vector<AlphaStratum> out;
  const auto slot = [&](int j) -> AlphaStratum& {
    for (auto& s : out)
      if (s.index == j) return s;
    AlphaStratum s;
    s.index = j;
    s.alpha = j < 0 ? 0.0 : psi_max * std::exp2(-j);
    s.arg = arg;
    out.push_back(std::move(s));
    return out.back();
  };
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto& s = slot(detail::stratum_index(psi_max, psi[i]));
    s.members.push_back(sorted[i]);
    s.psi.push_back(psi[i]);
    s.rho.push_back(rho[i]);
  }
  std::sort(out.begin(), out.end(),
            [](const AlphaStratum& a, const AlphaStratum& b) {
              if ((a.index < 0) != (b.index < 0)) return b.index < 0;
              return a.index < b.index;
            });
  return out;
}

// ---------------------------------------------------------------------------
// Block report
// ---------------------------------------------------------------------------

// One row per T with at least one stratum cube anchored to it.  Ratios
// compare the regime-restricted left sides against
// alpha * [sum_{Q^t=T} <sigma^{1/p}>_{A,Q}^p |Q|]^{1/p} w(T)^{1/p'};
// r_regime3_alt swaps in the weaker printed variant of that right side
// (no p-th power inside the bracket, w(T)^{1/p} outside).
struct LemmaBlockRow {
  Cube t_cube;
  int member_count = 0;  // stratum cubes anchored at this T
  bool degenerate = false;  // w(T) = 0 or empty sigma mass; ratios forced 0
  double w_sharp_fraction = 1.0;
  double r_basic = 0.0;
  double r_regime1 = 0.0;
  double r_regime2 = 0.0;
  double r_regime3 = 0.0;
  double r_regime3_alt = 0.0;
};

struct LemmaReport {
  int stratum_index = 0;
  double alpha = 0.0;
  std::vector<LemmaBlockRow> blocks;
  int degenerate_blocks = 0;
  int t_sharp_failures = 0;
  double r_quasiorth = 0.0;  // sum_T (<g>^w_T)^{p'} w(T) / |g|^{p'}_{L^{p'}(w)}
  double r_epssum = 0.0;     // max cell sum of eps(arg)^{-p'}, regime-3
                             // stratum cubes, per block
  double r_rhodecay = 0.0;   // max rho(Q) 2^{i_T/2} / rho(T), same cubes
  double r_holder = 0.0;     // max <sigma>_Q / (bump_p * bump_pc)
  double r_sw = 0.0;         // max <sigma>_Q^p <w>_Q /
                             //     (alpha^p eps(arg)^{-p} bump_p^p)
  double r_packing = 0.0;    // packing_worst_ratio of the full collection
  double worst_block_ratio = 0.0;  // max r_basic over non-degenerate blocks
};

inline LemmaReport lemma_report(const CoronaDecomposition& d,
                                const AlphaStratum& stratum,
                                const Weight& sigma, const Weight& w,
                                const YoungFunction& A,
                                const EpsilonFunction& eps) {
  if (stratum.members.empty())
    throw std::invalid_argument("lemma_report: empty stratum");
  if (&sigma.grid() != &w.grid() || &sigma.grid() != &d.grid())
    throw std::invalid_argument("lemma_report: grid mismatch");
  const auto& grid = d.grid();
  const double p = d.p;
  const double pc = p / (p - 1.0);
  const YoungFunction Abar = dual_young(A);
  const auto pow_p = detail::power_cells(sigma, 1.0 / p);
  const auto pow_pc = detail::power_cells(sigma, 1.0 / pc);

  LemmaReport rep;
  rep.stratum_index = stratum.index;
  rep.alpha = stratum.alpha;
  rep.t_sharp_failures = d.t_sharp_failures;

  // Stratum cubes resolved to decomposition rows and their bump data.
  struct Entry {
    int row;
    double rho;
    double bump_p;   // <sigma^{1/p}>_{A,Q}
    double bump_pc;  // <sigma^{1/p'}>_{Abar,Q}
    double eps_at;   // eps evaluated at the stratum argument
  };
  std::vector<Entry> entries;
  entries.reserve(stratum.members.size());
  for (std::size_t i = 0; i < stratum.members.size(); ++i) {
    const int row = d.row_of(stratum.members[i]);
    if (row < 0)
      throw std::invalid_argument(
          "lemma_report: stratum cube is not in the decomposition");
    Entry e;
    e.row = row;
    e.rho = stratum.rho[i];
    e.bump_p = orlicz_average(grid, pow_p, A, stratum.members[i]);
    e.bump_pc = orlicz_average(grid, pow_pc, Abar, stratum.members[i]);
    const double at = stratum.arg == EntangleArg::one_plus_rho
                          ? 1.0 + e.rho
                          : e.rho;
    e.eps_at = e.rho > 0.0 ? eps(at) : 0.0;
    entries.push_back(e);
  }

  const auto ratio = [](double lhs, double rhs) {
    if (lhs == 0.0) return 0.0;
    return rhs > 0.0 ? lhs / rhs
                     : std::numeric_limits<double>::infinity();
  };

  std::vector<double> eps_stack(grid.cell_count(), 0.0);
  for (std::size_t ti = 0; ti < d.rows.size(); ++ti) {
    if (!d.rows[ti].in_t) continue;
    const auto& t = d.rows[ti];

    LemmaBlockRow blk;
    blk.t_cube = t.cube;
    blk.w_sharp_fraction = t.w_sharp_fraction;
    double lhs_all = 0.0, lhs1 = 0.0, lhs2 = 0.0, lhs3 = 0.0;
    double core_p = 0.0, core_1 = 0.0;
    for (const Entry& e : entries) {
      const auto& q = d.rows[e.row];
      if (q.t_anchor != static_cast<int>(ti)) continue;
      blk.member_count += 1;
      const double m = grid.measure(q.cube);
      const double term = q.sigma_avg * q.w_avg * m;
      lhs_all += term;
      (q.regime == 1 ? lhs1 : q.regime == 2 ? lhs2 : lhs3) += term;
      core_p += std::pow(e.bump_p, p) * m;
      core_1 += e.bump_p * m;
    }
    if (blk.member_count == 0) continue;

    const double wt = w.mass(t.cube);
    if (!(wt > 0.0) || !(core_p > 0.0)) {
      blk.degenerate = true;
      rep.degenerate_blocks += 1;
      rep.blocks.push_back(blk);
      continue;
    }
    const double rhs =
        rep.alpha * std::pow(core_p, 1.0 / p) * std::pow(wt, 1.0 / pc);
    const double rhs_alt =
        rep.alpha * std::pow(core_1, 1.0 / p) * std::pow(wt, 1.0 / p);
    blk.r_basic = ratio(lhs_all, rhs);
    blk.r_regime1 = ratio(lhs1, rhs);
    blk.r_regime2 = ratio(lhs2, rhs);
    blk.r_regime3 = ratio(lhs3, rhs);
    blk.r_regime3_alt = ratio(lhs3, rhs_alt);
    rep.worst_block_ratio = std::max(rep.worst_block_ratio, blk.r_basic);
    rep.blocks.push_back(blk);

    // Regime-3 penalty diagnostics, per block so nested anchors never mix.
    double block_max = 0.0;
    for (const Entry& e : entries) {
      const auto& q = d.rows[e.row];
      if (q.t_anchor != static_cast<int>(ti)) continue;
      if (q.regime != 3 || !(e.rho > 0.0)) continue;
      const double term = std::pow(e.eps_at, -pc);
      for (std::uint64_t c : grid.cells_of(q.cube)) {
        eps_stack[c] += term;
        block_max = std::max(block_max, eps_stack[c]);
      }
    }
    for (const Entry& e : entries) {
      const auto& q = d.rows[e.row];
      if (q.t_anchor != static_cast<int>(ti)) continue;
      if (q.regime != 3 || !(e.rho > 0.0)) continue;
      for (std::uint64_t c : grid.cells_of(q.cube)) eps_stack[c] = 0.0;
    }
    rep.r_epssum = std::max(rep.r_epssum, block_max);
  }

  // Geometric decay of rho toward the anchor needs the anchor's own rho,
  // which lives outside the stratum in general.
  const auto rho_of_row = [&](int row) {
    const auto& q = d.rows[row];
    if (!(q.sigma_avg > 0.0)) return 0.0;
    const double bumped = orlicz_average(grid, pow_pc, Abar, q.cube);
    return bumped / std::pow(q.sigma_avg, 1.0 / pc);
  };
  for (const Entry& e : entries) {
    const auto& q = d.rows[e.row];
    if (q.regime != 3 || !(e.rho > 0.0)) continue;
    const double t_rho = rho_of_row(q.t_anchor);
    if (t_rho > 0.0)
      rep.r_rhodecay = std::max(
          rep.r_rhodecay, e.rho * std::exp2(0.5 * q.i_t) / t_rho);
  }

  for (const Entry& e : entries) {
    const auto& q = d.rows[e.row];
    if (e.bump_p > 0.0 && e.bump_pc > 0.0)
      rep.r_holder =
          std::max(rep.r_holder, q.sigma_avg / (e.bump_p * e.bump_pc));
    if (e.rho > 0.0 && e.bump_p > 0.0 && rep.alpha > 0.0)
      rep.r_sw = std::max(
          rep.r_sw, std::pow(q.sigma_avg, p) * q.w_avg /
                        (std::pow(rep.alpha, p) *
                         std::pow(e.eps_at, -p) * std::pow(e.bump_p, p)));
  }

  // Quasi-orthogonality of the stopping averages; a property of the whole
  // decomposition, independent of the stratum.
  double stop_sum = 0.0, g_norm = 0.0;
  const double cell = std::ldexp(1.0, -grid.depth() * grid.dimension());
  for (const auto& row : d.rows)
    if (row.in_t)
      stop_sum += std::pow(row.g_wavg, pc) * w.mass(row.cube);
  for (std::size_t c = 0; c < d.g.size(); ++c)
    g_norm += std::pow(d.g[c], pc) * w.cells()[c] * cell;
  rep.r_quasiorth = g_norm > 0.0 ? stop_sum / g_norm : 0.0;

  rep.r_packing = packing_worst_ratio(grid, d.member_cubes(), p);
  return rep;
}

}  // namespace bumplab

#endif  // BUMPLAB_CORONA_HPP

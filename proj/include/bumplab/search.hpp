#pragma once

// Randomized laboratory for extremal weight pairs.  An Instance bundles a
// weight pair, a half-sparse cube family, the exponent p, the two Young
// bumps and the two penalty profiles.  The objective is the ratio of the
// sparse-form norm to a bump-sum denominator:
//
//   theorem-ratio     norm / (entangled(sigma,w) + entangled(w,sigma))
//   conjecture-ratio  norm / (separated(sigma,w) + separated(w,sigma))
//
// generate_instance builds seeded starting pairs (lognormal cells, power
// spikes, lacunary branches), local_search anneals over multiplicative
// single-cell moves and family toggles, and ObjectiveEvaluator keeps the
// per-cube bumped averages cached so a one-cell move only recomputes the
// ancestor chain.  Everything is deterministic given the seeds.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bumplab/bumps.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/orlicz.hpp"
#include "bumplab/sparse.hpp"

namespace bumplab {

enum class ObjectiveKind { theorem_ratio, conjecture_ratio };
enum class GeneratorKind { lognormal, power_spike, lacunary };

struct Instance {
  std::shared_ptr<const DyadicGrid> grid;
  Weight sigma;
  Weight w;
  std::vector<Cube> family;  // canonical and half-sparse
  double p = 2.0;
  YoungFunction A;      // bump paired with sigma; Abar = dual_young(A)
  YoungFunction B;      // bump paired with w
  EpsilonFunction eps_p;   // penalty on the sigma side, normalized against p'
  EpsilonFunction eps_pc;  // penalty on the w side, normalized against p
  std::uint64_t seed = 0;

  // Generation-split parts of the family; the union is the family itself.
  std::vector<std::vector<Cube>> parts() const {
    return split_sparse(*grid, family, p);
  }
};

inline void validate_instance(const Instance& inst) {
  if (!inst.grid) throw std::invalid_argument("instance: missing grid");
  if (&inst.sigma.grid() != inst.grid.get() ||
      &inst.w.grid() != inst.grid.get())
    throw std::invalid_argument("instance: weights must live on the grid");
  if (!(inst.p > 1.0)) throw std::invalid_argument("instance: need p > 1");
  if (inst.family.empty())
    throw std::invalid_argument("instance: family must be nonempty");
  std::vector<Cube> canon = inst.family;
  canonicalize(*inst.grid, canon);
  if (canon.size() != inst.family.size())
    throw std::invalid_argument("instance: family must be canonical");
  for (std::size_t i = 0; i < canon.size(); ++i)
    if (!(canon[i] == inst.family[i]))
      throw std::invalid_argument("instance: family must be canonical");
  if (!is_half_sparse(*inst.grid, inst.family))
    throw std::invalid_argument("instance: family must be half-sparse");
}

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

struct GeneratorConfig {
  double lognormal_spread = 1.0;  // stddev of log cells; 0 gives flat weights
  // Spike exponent; drawn uniformly from [-1.5, 1.5] per weight when unset.
  std::optional<double> spike_exponent;
  double lacunary_factor = 2.0;  // geometric step along the branch
  int extra_cubes = 8;           // random additions tried on the base chain
  double eta = 1.0;              // log-bump parameter for both A and B
};

namespace detail {

inline std::vector<double> lognormal_cells(const DyadicGrid& grid,
                                           std::mt19937_64& rng, double s) {
  std::vector<double> cells(grid.cell_count(), 1.0);
  if (!(s > 0.0)) return cells;
  std::normal_distribution<double> gauss(0.0, s);
  for (auto& c : cells) c = std::exp(gauss(rng));
  return cells;
}

inline std::vector<double> spike_cells(const DyadicGrid& grid,
                                       std::mt19937_64& rng,
                                       std::optional<double> fixed_a) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double x0 = unit(rng);
  const double y0 = unit(rng);
  const double a = fixed_a ? *fixed_a : -1.5 + 3.0 * unit(rng);
  const int L = grid.depth();
  const double h = std::ldexp(1.0, -L);
  std::vector<double> cells(grid.cell_count());
  for (std::uint64_t c = 0; c < cells.size(); ++c) {
    const Cube cell = grid.cell_cube(c);
    const double cx = (cell.ix + 0.5) * h;
    double dist;
    if (grid.dimension() == 1) {
      dist = std::abs(cx - x0);
    } else {
      const double cy = (cell.iy + 0.5) * h;
      dist = std::hypot(cx - x0, cy - y0);
    }
    // The cell resolution floors the distance: keeps negative exponents
    // finite without changing any cell whose center is farther than h/2.
    cells[c] = std::pow(std::max(dist, 0.5 * h), a);
  }
  return cells;
}

inline std::vector<double> lacunary_cells(const DyadicGrid& grid,
                                          std::mt19937_64& rng,
                                          double factor) {
  if (!(factor > 0.0))
    throw std::invalid_argument("generate_instance: lacunary factor <= 0");
  const double r = (rng() & 1u) ? factor : 1.0 / factor;
  const int L = grid.depth();
  std::vector<double> cells(grid.cell_count());
  for (std::uint64_t c = 0; c < cells.size(); ++c) {
    const Cube cell = grid.cell_cube(c);
    // Depth at which the cell's ancestry leaves the 0-branch; the cell at
    // the origin stays on it to the end.
    const int bw = std::max(std::bit_width(std::uint64_t{cell.ix}),
                            std::bit_width(std::uint64_t{cell.iy}));
    cells[c] = std::pow(r, static_cast<double>(L - bw));
  }
  return cells;
}

}  // namespace detail

// Seeded starting pair: cells per the requested family, the 0-branch chain
// as the base cube family plus random additions that keep it half-sparse,
// and log-bump A, B with matched power-law penalties.
inline Instance generate_instance(GeneratorKind kind, int d, int L, double p,
                                  std::uint64_t seed,
                                  const GeneratorConfig& cfg = {}) {
  if (!(p > 1.0)) throw std::invalid_argument("generate_instance: need p > 1");
  auto grid = std::make_shared<const DyadicGrid>(d, L);
  std::mt19937_64 rng(seed);
  const auto make_cells = [&]() {
    switch (kind) {
      case GeneratorKind::lognormal:
        return detail::lognormal_cells(*grid, rng, cfg.lognormal_spread);
      case GeneratorKind::power_spike:
        return detail::spike_cells(*grid, rng, cfg.spike_exponent);
      case GeneratorKind::lacunary:
        return detail::lacunary_cells(*grid, rng, cfg.lacunary_factor);
    }
    throw std::invalid_argument("generate_instance: unknown kind");
  };
  Weight sigma(*grid, make_cells());
  Weight w(*grid, make_cells());

  std::vector<Cube> family;
  for (int k = 0; k <= L; ++k) family.push_back({k, 0, 0});
  for (int t = 0; t < cfg.extra_cubes; ++t) {
    const int level = L >= 1 ? 1 + static_cast<int>(rng() % L) : 0;
    const Cube q = grid->cube_from_linear(
        level, rng() % grid->cubes_at(level));
    if (std::find(family.begin(), family.end(), q) != family.end()) continue;
    std::vector<Cube> candidate = family;
    candidate.push_back(q);
    canonicalize(*grid, candidate);
    if (is_half_sparse(*grid, candidate)) family = std::move(candidate);
  }
  canonicalize(*grid, family);

  const double pc = p / (p - 1.0);
  Instance inst{std::move(grid),
                std::move(sigma),
                std::move(w),
                std::move(family),
                p,
                YoungFunction::log_bump(p, cfg.eta),
                YoungFunction::log_bump(pc, cfg.eta),
                EpsilonFunction::power_law(0.5 * cfg.eta / pc).normalized(pc),
                EpsilonFunction::power_law(0.5 * cfg.eta / p).normalized(p),
                seed};
  validate_instance(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

struct ObjectiveBreakdown {
  double norm = 0.0;          // sparse-form norm of the family
  double term_sigma_w = 0.0;  // sigma-side bump constant
  double term_w_sigma = 0.0;  // w-side bump constant
  double value = 0.0;         // norm / (term_sigma_w + term_w_sigma)
  bool infinite = false;      // denominator vanished
};

inline ObjectiveBreakdown evaluate_objective(const Instance& inst,
                                             ObjectiveKind kind) {
  validate_instance(inst);
  const double pc = inst.p / (inst.p - 1.0);
  const YoungFunction Abar = dual_young(inst.A);
  const YoungFunction Bbar = dual_young(inst.B);
  ObjectiveBreakdown out;
  if (kind == ObjectiveKind::theorem_ratio) {
    out.term_sigma_w =
        entangled_bump(inst.sigma, inst.w, Abar, inst.eps_p, inst.p);
    out.term_w_sigma =
        entangled_bump(inst.w, inst.sigma, Bbar, inst.eps_pc, pc);
  } else {
    out.term_sigma_w = separated_bump(inst.sigma, inst.w, Abar, inst.p);
    out.term_w_sigma = separated_bump(inst.w, inst.sigma, Bbar, pc);
  }
  out.norm = norm_oracle(inst.sigma, inst.w, inst.family, inst.p).value;
  const double denom = out.term_sigma_w + out.term_w_sigma;
  if (denom > 0.0) {
    out.value = out.norm / denom;
  } else {
    out.value = std::numeric_limits<double>::infinity();
    out.infinite = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Incremental evaluator
// ---------------------------------------------------------------------------

// Caches the per-cube bumped averages of sigma^{1/p'} under Abar and w^{1/p}
// under Bbar.  A single-cell move recomputes only the L+1 ancestor cubes of
// that cell; a family toggle recomputes only the norm.  One level of undo.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(Instance& inst, ObjectiveKind kind)
      : inst_(&inst),
        kind_(kind),
        pc_(inst.p / (inst.p - 1.0)),
        Abar_(dual_young(inst.A)),
        Bbar_(dual_young(inst.B)) {
    validate_instance(inst);
    offsets_.assign(static_cast<std::size_t>(grid().depth()) + 2, 0);
    for (int k = 0; k <= grid().depth(); ++k)
      offsets_[static_cast<std::size_t>(k) + 1] =
          offsets_[static_cast<std::size_t>(k)] + grid().cubes_at(k);
    recompute_full();
  }

  double value() const { return breakdown_.value; }
  bool infinite() const { return breakdown_.infinite; }
  const ObjectiveBreakdown& breakdown() const { return breakdown_; }

  double recompute_full() {
    const std::uint64_t n = grid().cell_count();
    powered_s_.resize(n);
    powered_w_.resize(n);
    for (std::uint64_t c = 0; c < n; ++c) {
      powered_s_[c] = std::pow(inst_->sigma.cells()[c], 1.0 / pc_);
      powered_w_[c] = std::pow(inst_->w.cells()[c], 1.0 / inst_->p);
    }
    bump_s_.assign(offsets_.back(), 0.0);
    bump_w_.assign(offsets_.back(), 0.0);
    for (int k = 0; k <= grid().depth(); ++k)
      for (std::uint64_t i = 0; i < grid().cubes_at(k); ++i) {
        const Cube q = grid().cube_from_linear(k, i);
        const std::size_t gi = global_index(q);
        bump_s_[gi] = orlicz_average(grid(), powered_s_, Abar_, q);
        bump_w_[gi] = orlicz_average(grid(), powered_w_, Bbar_, q);
      }
    refreshNorm();
    return compose();
  }

  // Multiply one cell of sigma or w by `factor` and return the new
  // objective.  The instance is mutated in place.
  double perturb_cell(bool on_sigma, std::uint64_t cell, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor))
      throw std::invalid_argument("evaluator: factor must be positive");
    Weight& wt = on_sigma ? inst_->sigma : inst_->w;
    auto& powered = on_sigma ? powered_s_ : powered_w_;
    auto& bump = on_sigma ? bump_s_ : bump_w_;
    const YoungFunction& F = on_sigma ? Abar_ : Bbar_;
    undo_ = Undo{};
    undo_.kind = Undo::Kind::cell;
    undo_.on_sigma = on_sigma;
    undo_.cell = cell;
    undo_.old_cell = wt.cells().at(cell);
    undo_.old_powered = powered[cell];
    undo_.old_breakdown = breakdown_;
    wt.set_cell(cell, undo_.old_cell * factor);
    powered[cell] =
        std::pow(wt.cells()[cell], on_sigma ? 1.0 / pc_ : 1.0 / inst_->p);
    Cube q = grid().cell_cube(cell);
    for (int k = grid().depth();; --k) {
      const std::size_t gi = global_index(q);
      undo_.touched.push_back({gi, bump[gi]});
      bump[gi] = orlicz_average(grid(), powered, F, q);
      if (k == 0) break;
      q = grid().parent(q);
    }
    refreshNorm();
    return compose();
  }

  void undo_cell() {
    if (undo_.kind != Undo::Kind::cell)
      throw std::logic_error("evaluator: no cell move to undo");
    Weight& wt = undo_.on_sigma ? inst_->sigma : inst_->w;
    auto& powered = undo_.on_sigma ? powered_s_ : powered_w_;
    auto& bump = undo_.on_sigma ? bump_s_ : bump_w_;
    wt.set_cell(undo_.cell, undo_.old_cell);
    powered[undo_.cell] = undo_.old_powered;
    for (const auto& [gi, v] : undo_.touched) bump[gi] = v;
    breakdown_ = undo_.old_breakdown;
    undo_.kind = Undo::Kind::none;
  }

  // Replace the cube family (canonicalized); only the norm changes.
  double set_family(std::vector<Cube> family) {
    canonicalize(grid(), family);
    if (family.empty())
      throw std::invalid_argument("evaluator: family must be nonempty");
    undo_ = Undo{};
    undo_.kind = Undo::Kind::family;
    undo_.old_family = std::move(inst_->family);
    undo_.old_breakdown = breakdown_;
    inst_->family = std::move(family);
    refreshNorm();
    return compose();
  }

  void undo_family() {
    if (undo_.kind != Undo::Kind::family)
      throw std::logic_error("evaluator: no family move to undo");
    inst_->family = std::move(undo_.old_family);
    breakdown_ = undo_.old_breakdown;
    undo_.kind = Undo::Kind::none;
  }

 private:
  struct Undo {
    enum class Kind { none, cell, family } kind = Kind::none;
    bool on_sigma = false;
    std::uint64_t cell = 0;
    double old_cell = 0.0;
    double old_powered = 0.0;
    std::vector<std::pair<std::size_t, double>> touched;
    std::vector<Cube> old_family;
    ObjectiveBreakdown old_breakdown;
  };

  const DyadicGrid& grid() const { return *inst_->grid; }

  std::size_t global_index(const Cube& q) const {
    return offsets_[static_cast<std::size_t>(q.level)] +
           grid().linear_index(q);
  }

  void refreshNorm() {
    breakdown_.norm =
        norm_oracle(inst_->sigma, inst_->w, inst_->family, inst_->p).value;
  }

  // Mirrors the skip rules of the standalone bump constants: the entangled
  // sup skips cubes where its Luxembourg weight has no mass, the separated
  // sup skips cubes where either weight has none.
  double compose() {
    double t_sw = 0.0, t_ws = 0.0;
    const bool entangled = kind_ == ObjectiveKind::theorem_ratio;
    for (int k = 0; k <= grid().depth(); ++k)
      for (std::uint64_t i = 0; i < grid().cubes_at(k); ++i) {
        const Cube q = grid().cube_from_linear(k, i);
        const std::size_t gi = global_index(q);
        const double smass = inst_->sigma.mass(q);
        const double wmass = inst_->w.mass(q);
        const double savg = inst_->sigma.average(q);
        const double wavg = inst_->w.average(q);
        if (entangled) {
          if (smass > 0.0) {
            const double rho = bump_s_[gi] / std::pow(savg, 1.0 / pc_);
            t_sw = std::max(t_sw, inst_->eps_p(1.0 + rho) * bump_s_[gi] *
                                      std::pow(wavg, 1.0 / inst_->p));
          }
          if (wmass > 0.0) {
            const double rho = bump_w_[gi] / std::pow(wavg, 1.0 / inst_->p);
            t_ws = std::max(t_ws, inst_->eps_pc(1.0 + rho) * bump_w_[gi] *
                                      std::pow(savg, 1.0 / pc_));
          }
        } else if (smass > 0.0 && wmass > 0.0) {
          t_sw = std::max(t_sw,
                          bump_s_[gi] * std::pow(wavg, 1.0 / inst_->p));
          t_ws = std::max(t_ws, bump_w_[gi] * std::pow(savg, 1.0 / pc_));
        }
      }
    breakdown_.term_sigma_w = t_sw;
    breakdown_.term_w_sigma = t_ws;
    const double denom = t_sw + t_ws;
    breakdown_.infinite = !(denom > 0.0);
    breakdown_.value = breakdown_.infinite
                           ? std::numeric_limits<double>::infinity()
                           : breakdown_.norm / denom;
    return breakdown_.value;
  }

  Instance* inst_;
  ObjectiveKind kind_;
  double pc_;
  YoungFunction Abar_, Bbar_;
  std::vector<std::size_t> offsets_;
  std::vector<double> powered_s_, powered_w_;
  std::vector<double> bump_s_, bump_w_;
  ObjectiveBreakdown breakdown_;
  Undo undo_;
};

// ---------------------------------------------------------------------------
// Denominator relation audit
// ---------------------------------------------------------------------------

// When both dual bumps dominate their conjugate powers pointwise, every
// entangled term is at least eps(2) times its separated counterpart (the
// penalty argument 1 + rho is then >= 2 and eps is increasing).  Summing:
// theorem-ratio <= conjecture-ratio / min(eps_p(2), eps_pc(2)).
struct RatioRelationAudit {
  double theorem_ratio = 0.0;
  double conjecture_ratio = 0.0;
  double eps_floor = 0.0;
  bool dominance = false;       // Abar >= t^{p'} and Bbar >= t^p on a probe grid
  bool term_sigma_w_ok = false;  // entangled >= eps_p(2) * separated
  bool term_w_sigma_ok = false;
  bool holds = false;
};

inline RatioRelationAudit audit_ratio_relation(const Instance& inst) {
  const double pc = inst.p / (inst.p - 1.0);
  const YoungFunction Abar = dual_young(inst.A);
  const YoungFunction Bbar = dual_young(inst.B);
  RatioRelationAudit audit;
  audit.dominance = true;
  for (double t = 1e-6; t <= 1e8; t *= 1.2589254117941673) {
    if (Abar.eval(t) < std::pow(t, pc) * (1.0 - 1e-9) ||
        Bbar.eval(t) < std::pow(t, inst.p) * (1.0 - 1e-9)) {
      audit.dominance = false;
      break;
    }
  }
  const auto theorem = evaluate_objective(inst, ObjectiveKind::theorem_ratio);
  const auto conjecture =
      evaluate_objective(inst, ObjectiveKind::conjecture_ratio);
  audit.theorem_ratio = theorem.value;
  audit.conjecture_ratio = conjecture.value;
  audit.eps_floor = std::min(inst.eps_p(2.0), inst.eps_pc(2.0));
  audit.term_sigma_w_ok =
      theorem.term_sigma_w >=
      inst.eps_p(2.0) * conjecture.term_sigma_w * (1.0 - 1e-9);
  audit.term_w_sigma_ok =
      theorem.term_w_sigma >=
      inst.eps_pc(2.0) * conjecture.term_w_sigma * (1.0 - 1e-9);
  audit.holds = theorem.infinite ||
                theorem.value <=
                    conjecture.value / audit.eps_floor * (1.0 + 1e-9);
  return audit;
}

// ---------------------------------------------------------------------------
// Annealing search
// ---------------------------------------------------------------------------

struct AnnealSchedule {
  // Initial temperature; <= 0 calibrates it so the median deteriorating
  // probe move is accepted with probability 0.3.
  double t0 = 0.0;
  double t_end_factor = 1e-3;  // geometric cooling target t0 * factor
  int calibration_probes = 32;
};

struct TraceStep {
  int step = 0;
  int move = 0;  // 0 sigma cell, 1 w cell, 2 family toggle
  bool accepted = false;
  double objective = 0.0;  // current value after the accept/reject decision
  double best = 0.0;       // running best; nondecreasing
  double temperature = 0.0;
};

struct SearchResult {
  Instance best;
  double best_objective = 0.0;
  double start_objective = 0.0;
  double t0 = 0.0;
  int accepted_moves = 0;
  int rejected_infinite = 0;
  std::vector<TraceStep> trace;
};

inline SearchResult local_search(const Instance& start, ObjectiveKind kind,
                                 int steps, AnnealSchedule sched = {},
                                 std::uint64_t seed = 0) {
  if (steps < 0) throw std::invalid_argument("local_search: steps < 0");
  if (!(sched.t_end_factor > 0.0) || !(sched.t_end_factor <= 1.0))
    throw std::invalid_argument("local_search: bad cooling factor");
  validate_instance(start);
  Instance work = start;
  ObjectiveEvaluator eval(work, kind);

  SearchResult res{start, eval.value(), eval.value(), 0.0, 0, 0, {}};
  if (steps == 0) return res;
  res.trace.reserve(static_cast<std::size_t>(steps));

  std::mt19937_64 rng(seed != 0
                          ? seed
                          : start.seed * 0x9e3779b97f4a7c15ULL + 0x6b79ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kFactors[4] = {2.0, 0.5, 10.0, 0.1};
  const std::uint64_t n = start.grid->cell_count();
  const int L = start.grid->depth();

  // Temperature calibration: sample cell moves, collect the deteriorations,
  // and pick t0 so the median one is accepted with probability 0.3.
  double t0 = sched.t0;
  if (!(t0 > 0.0)) {
    std::vector<double> drops;
    for (int probe = 0; probe < sched.calibration_probes; ++probe) {
      const bool on_sigma = (rng() & 1u) != 0;
      const std::uint64_t cell = rng() % n;
      const double before = eval.value();
      const double after =
          eval.perturb_cell(on_sigma, cell, kFactors[rng() % 4]);
      if (std::isfinite(before) && std::isfinite(after) && after < before)
        drops.push_back(before - after);
      eval.undo_cell();
    }
    if (drops.empty()) {
      const double v = std::isfinite(res.start_objective)
                           ? std::abs(res.start_objective)
                           : 1.0;
      t0 = std::max(1e-12, 0.01 * v);
    } else {
      std::nth_element(drops.begin(), drops.begin() + drops.size() / 2,
                       drops.end());
      t0 = drops[drops.size() / 2] / std::log(1.0 / 0.3);
    }
  }
  res.t0 = t0;

  double cur = eval.value();
  for (int step = 0; step < steps; ++step) {
    const double temp =
        t0 * std::pow(sched.t_end_factor,
                      steps > 1 ? static_cast<double>(step) / (steps - 1)
                                : 1.0);
    const std::uint64_t pick = rng() % 10;
    TraceStep ts;
    ts.step = step;
    ts.temperature = temp;

    bool evaluated = false;
    bool family_move = false;
    double proposed = cur;
    if (pick < 8) {
      const bool on_sigma = pick < 4;
      ts.move = on_sigma ? 0 : 1;
      proposed = eval.perturb_cell(on_sigma, rng() % n,
                                   kFactors[rng() % 4]);
      evaluated = true;
    } else {
      ts.move = 2;
      family_move = true;
      if ((rng() & 1u) != 0 && L >= 1) {
        // Add a random cube when the family stays half-sparse.
        const int level = 1 + static_cast<int>(rng() % L);
        const Cube q = work.grid->cube_from_linear(
            level, rng() % work.grid->cubes_at(level));
        if (std::find(work.family.begin(), work.family.end(), q) ==
            work.family.end()) {
          std::vector<Cube> candidate = work.family;
          candidate.push_back(q);
          canonicalize(*work.grid, candidate);
          if (is_half_sparse(*work.grid, candidate)) {
            proposed = eval.set_family(std::move(candidate));
            evaluated = true;
          }
        }
      } else if (work.family.size() > 1) {
        // Removal can only shrink submember coverage, so sparseness holds.
        std::vector<Cube> candidate = work.family;
        candidate.erase(candidate.begin() +
                        static_cast<std::ptrdiff_t>(rng() % candidate.size()));
        proposed = eval.set_family(std::move(candidate));
        evaluated = true;
      }
    }

    if (evaluated) {
      if (eval.infinite()) {
        family_move ? eval.undo_family() : eval.undo_cell();
        ++res.rejected_infinite;
      } else {
        const bool was_infinite = !std::isfinite(cur);
        const double delta = proposed - cur;
        const bool accept =
            was_infinite || delta >= 0.0 ||
            unit(rng) < std::exp(delta / std::max(temp, 1e-300));
        if (accept) {
          cur = proposed;
          ++res.accepted_moves;
          ts.accepted = true;
          if (std::isfinite(cur) && (!std::isfinite(res.best_objective) ||
                                     cur > res.best_objective)) {
            res.best_objective = cur;
            res.best = work;
          }
        } else {
          family_move ? eval.undo_family() : eval.undo_cell();
        }
      }
    }
    ts.objective = cur;
    ts.best = res.best_objective;
    res.trace.push_back(ts);
  }
  return res;
}

}  // namespace bumplab

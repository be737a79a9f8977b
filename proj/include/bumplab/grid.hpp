#ifndef BUMPLAB_GRID_HPP
#define BUMPLAB_GRID_HPP

// Dyadic lattice of the unit cube in dimension 1 or 2, with weights stored
// as piecewise-constant cell values at the finest level.
//
// Cell measure is 2^{-L d}, a power of two, so measures are exact doubles
// and per-level totals add to 1 without rounding.  Weight masses live in a
// full per-level tree where every parent is the sum of its children taken
// in a fixed order; updates recompute the ancestor path the same way, so
// an incrementally maintained tree is bit-identical to a rebuilt one.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bumplab/orlicz.hpp"

namespace bumplab {

// Dyadic cube at `level` with corner (ix, iy) * 2^{-level}.  In dimension
// 1 iy is always 0.  level 0 is the unit cube itself.
struct Cube {
  int level = 0;
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;

  friend bool operator==(const Cube&, const Cube&) = default;
};

class DyadicGrid {
 public:
  DyadicGrid(int dimension, int depth) : dim_(dimension), depth_(depth) {
    if (dimension != 1 && dimension != 2)
      throw std::invalid_argument("grid: dimension must be 1 or 2");
    if (depth < 0 || depth > 16)
      throw std::invalid_argument("grid: depth must be in [0, 16]");
    if (dimension == 2 && depth > 12)
      throw std::invalid_argument("grid: dimension 2 caps depth at 12");
  }

  int dimension() const { return dim_; }
  int depth() const { return depth_; }

  // Number of cubes on one side at `level`.
  std::uint32_t side(int level) const {
    requireLevel(level);
    return static_cast<std::uint32_t>(1u) << level;
  }

  std::uint64_t cubes_at(int level) const {
    requireLevel(level);
    return std::uint64_t{1} << (static_cast<std::uint64_t>(level) * dim_);
  }

  std::uint64_t cell_count() const { return cubes_at(depth_); }

  std::uint64_t total_cubes() const {
    std::uint64_t n = 0;
    for (int k = 0; k <= depth_; ++k) n += cubes_at(k);
    return n;
  }

  // |Q| = 2^{-level * d}, exact.
  double measure(const Cube& q) const {
    requireCube(q);
    return std::ldexp(1.0, -q.level * dim_);
  }

  // Number of finest cells inside Q, exact integer.
  std::uint64_t cells_in(const Cube& q) const {
    requireCube(q);
    return std::uint64_t{1}
           << (static_cast<std::uint64_t>(depth_ - q.level) * dim_);
  }

  // Linear index of a cube within its level, row-major in (iy, ix).
  std::uint64_t linear_index(const Cube& q) const {
    requireCube(q);
    return dim_ == 1 ? q.ix
                     : (static_cast<std::uint64_t>(q.iy) << q.level) + q.ix;
  }

  Cube cube_from_linear(int level, std::uint64_t idx) const {
    requireLevel(level);
    if (idx >= cubes_at(level))
      throw std::out_of_range("grid: linear index out of range");
    if (dim_ == 1) return {level, static_cast<std::uint32_t>(idx), 0};
    const std::uint32_t s = side(level);
    return {level, static_cast<std::uint32_t>(idx % s),
            static_cast<std::uint32_t>(idx / s)};
  }

  Cube parent(const Cube& q) const {
    requireCube(q);
    if (q.level == 0) throw std::logic_error("grid: unit cube has no parent");
    return {q.level - 1, q.ix >> 1, q.iy >> 1};
  }

  // Children in fixed order: x fastest, then y.  Dimension 1 has two.
  std::vector<Cube> children(const Cube& q) const {
    requireCube(q);
    if (q.level == depth_) return {};
    std::vector<Cube> out;
    if (dim_ == 1) {
      out = {{q.level + 1, q.ix * 2, 0}, {q.level + 1, q.ix * 2 + 1, 0}};
    } else {
      out.reserve(4);
      for (std::uint32_t dy = 0; dy < 2; ++dy)
        for (std::uint32_t dx = 0; dx < 2; ++dx)
          out.push_back({q.level + 1, q.ix * 2 + dx, q.iy * 2 + dy});
    }
    return out;
  }

  // Ancestor of Q at `level` <= Q.level.
  Cube ancestor(const Cube& q, int level) const {
    requireCube(q);
    if (level < 0 || level > q.level)
      throw std::invalid_argument("grid: ancestor level out of range");
    const int shift = q.level - level;
    return {level, q.ix >> shift, q.iy >> shift};
  }

  bool contains(const Cube& outer, const Cube& inner) const {
    requireCube(outer);
    requireCube(inner);
    return inner.level >= outer.level &&
           ancestor(inner, outer.level) == outer;
  }

  // Finest-level cells under Q, row-major, as linear cell indices.
  std::vector<std::uint64_t> cells_of(const Cube& q) const {
    requireCube(q);
    const std::uint32_t span = std::uint32_t{1} << (depth_ - q.level);
    std::vector<std::uint64_t> out;
    out.reserve(cells_in(q));
    if (dim_ == 1) {
      const std::uint64_t base = std::uint64_t{q.ix} * span;
      for (std::uint32_t i = 0; i < span; ++i) out.push_back(base + i);
    } else {
      const std::uint32_t s = side(depth_);
      for (std::uint32_t dy = 0; dy < span; ++dy) {
        const std::uint64_t row =
            (std::uint64_t{q.iy} * span + dy) * s + std::uint64_t{q.ix} * span;
        for (std::uint32_t dx = 0; dx < span; ++dx) out.push_back(row + dx);
      }
    }
    return out;
  }

  // Cell containing a cube-free linear cell index, viewed as a Cube at the
  // finest level.
  Cube cell_cube(std::uint64_t cell) const {
    return cube_from_linear(depth_, cell);
  }

  void requireCube(const Cube& q) const {
    requireLevel(q.level);
    const std::uint32_t s = side(q.level);
    if (q.ix >= s || (dim_ == 2 ? q.iy >= s : q.iy != 0))
      throw std::out_of_range("grid: cube index out of range");
  }

 private:
  void requireLevel(int level) const {
    if (level < 0 || level > depth_)
      throw std::out_of_range("grid: level out of range");
  }

  int dim_;
  int depth_;
};

// A nonnegative weight with its full dyadic mass tree.  mass(Q) is the
// integral of the weight over Q; average(Q) = mass(Q) / |Q|.
class Weight {
 public:
  Weight(const DyadicGrid& grid, std::vector<double> cells)
      : grid_(&grid), cells_(std::move(cells)) {
    if (cells_.size() != grid.cell_count())
      throw std::invalid_argument("weight: cell vector size mismatch");
    for (double v : cells_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("weight: cells must be finite and >= 0");
    rebuild();
  }

  static Weight uniform(const DyadicGrid& grid, double value = 1.0) {
    return Weight(grid, std::vector<double>(grid.cell_count(), value));
  }

  const DyadicGrid& grid() const { return *grid_; }
  const std::vector<double>& cells() const { return cells_; }
  double cell_value(std::uint64_t cell) const { return cells_.at(cell); }

  double mass(const Cube& q) const {
    return mass_[static_cast<std::size_t>(q.level)]
                [grid_->linear_index(q)];
  }

  double total_mass() const { return mass_[0][0]; }

  double average(const Cube& q) const { return mass(q) / grid_->measure(q); }

  // Replace one cell value and recompute the ancestor path.  Each ancestor
  // mass is re-derived as the sum of its children in tree order, so the
  // result is bit-identical to a full rebuild.
  void set_cell(std::uint64_t cell, double value) {
    if (!(value >= 0.0) || !std::isfinite(value))
      throw std::invalid_argument("weight: cells must be finite and >= 0");
    cells_.at(cell) = value;
    const int L = grid_->depth();
    Cube q = grid_->cell_cube(cell);
    mass_[static_cast<std::size_t>(L)][cell] =
        value * grid_->measure(q);
    for (int k = L - 1; k >= 0; --k) {
      q = grid_->parent(q);
      double acc = 0.0;
      for (const Cube& c : grid_->children(q))
        acc += mass_[static_cast<std::size_t>(k + 1)][grid_->linear_index(c)];
      mass_[static_cast<std::size_t>(k)][grid_->linear_index(q)] = acc;
    }
  }

  // Average of g over Q against this weight's measure:
  // (sum_cells g w |cell|) / w(Q).  Throws when w(Q) = 0.
  // Zero-mass cubes average to 0 by convention so downstream threshold
  // rules can never select them.
  double weighted_average(const std::vector<double>& g, const Cube& q) const {
    if (g.size() != cells_.size())
      throw std::invalid_argument("weighted_average: size mismatch");
    const double wq = mass(q);
    if (!(wq > 0.0)) return 0.0;
    const double cell_measure = std::ldexp(1.0, -grid_->depth() *
                                                     grid_->dimension());
    double acc = 0.0;
    for (std::uint64_t c : grid_->cells_of(q))
      acc += g[c] * cells_[c] * cell_measure;
    return acc / wq;
  }

 private:
  void rebuild() {
    const int L = grid_->depth();
    mass_.assign(static_cast<std::size_t>(L + 1), {});
    const double cell_measure =
        std::ldexp(1.0, -L * grid_->dimension());
    auto& leaf = mass_[static_cast<std::size_t>(L)];
    leaf.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
      leaf[i] = cells_[i] * cell_measure;
    for (int k = L - 1; k >= 0; --k) {
      auto& row = mass_[static_cast<std::size_t>(k)];
      row.resize(grid_->cubes_at(k));
      for (std::uint64_t i = 0; i < row.size(); ++i) {
        const Cube q = grid_->cube_from_linear(k, i);
        double acc = 0.0;
        for (const Cube& c : grid_->children(q))
          acc += mass_[static_cast<std::size_t>(k + 1)]
                      [grid_->linear_index(c)];
        row[i] = acc;
      }
    }
  }

  const DyadicGrid* grid_;
  std::vector<double> cells_;
  std::vector<std::vector<double>> mass_;
};

// Uniform probability samples of a function restricted to Q: each finest
// cell inside Q carries mass 1 / cells_in(Q).  This is the sample space on
// which per-cube Orlicz averages are taken.
inline std::vector<Sample> cube_samples(const DyadicGrid& grid,
                                        const std::vector<double>& values,
                                        const Cube& q) {
  if (values.size() != grid.cell_count())
    throw std::invalid_argument("cube_samples: size mismatch");
  const auto cells = grid.cells_of(q);
  const double m = 1.0 / static_cast<double>(cells.size());
  std::vector<Sample> out;
  out.reserve(cells.size());
  for (std::uint64_t c : cells) out.push_back({values[c], m});
  return out;
}

}  // namespace bumplab

#endif  // BUMPLAB_GRID_HPP

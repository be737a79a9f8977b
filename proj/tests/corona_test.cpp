#include "bumplab/corona.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace {

using namespace bumplab;

std::vector<Cube> chain_plus(const DyadicGrid& g, std::uint64_t seed,
                             int extra) {
  std::vector<Cube> m;
  for (int k = 0; k <= g.depth(); ++k) m.push_back({k, 0, 0});
  std::mt19937_64 rng(seed);
  for (int i = 0; i < extra; ++i) {
    const int k = 1 + static_cast<int>(rng() % g.depth());
    m.push_back({k, static_cast<std::uint32_t>(rng() % g.cubes_at(k)), 0});
  }
  canonicalize(g, m);
  return m;
}

std::vector<double> random_cells(const DyadicGrid& g, std::uint64_t seed,
                                 double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  std::vector<double> cells(g.cell_count());
  for (auto& c : cells) c = std::exp(n(rng));
  return cells;
}

TEST(BuildCorona, UniformGKeepsOnlyRoot) {
  const DyadicGrid g(1, 5);
  const Weight sigma(g, random_cells(g, 7, 1.0));
  const Weight w(g, random_cells(g, 8, 1.0));
  const std::vector<double> ones(g.cell_count(), 1.0);
  const auto d = build_corona(sigma, w, ones, chain_plus(g, 9, 6), 2.0);
  EXPECT_EQ(d.t_count(), 1u);
  EXPECT_TRUE(d.rows[0].in_t);
  EXPECT_EQ(d.rows[0].cube, (Cube{0, 0, 0}));
}

TEST(BuildCorona, UniformSigmaMakesSEqualT) {
  const DyadicGrid g(1, 5);
  const Weight sigma = Weight::uniform(g);
  const Weight w(g, random_cells(g, 21, 1.5));
  const auto members = chain_plus(g, 22, 8);
  std::vector<double> gf = random_cells(g, 23, 2.0);
  const auto d = build_corona(sigma, w, gf, members, 2.0);
  for (const auto& row : d.rows) {
    EXPECT_EQ(row.in_s, row.in_t);
    EXPECT_EQ(row.s_anchor, row.t_anchor);
    EXPECT_EQ(row.i_s, row.i_t);
  }
}

// One deep spike of w-average 20 over a background of 1 stops exactly once:
// intermediate chain averages 1 + 19*2^{k-5} never clear 10x the root
// average 51/32, the leaf value 20 does.
TEST(BuildCorona, SpikeHandTrace) {
  const DyadicGrid g(1, 5);
  const Weight sigma(g, random_cells(g, 31, 1.0));
  const Weight w = Weight::uniform(g);
  std::vector<Cube> members;
  for (int k = 0; k <= 5; ++k) members.push_back({k, 0, 0});
  std::vector<double> gf(g.cell_count(), 1.0);
  gf[0] = 20.0;

  const auto d = build_corona(sigma, w, gf, members, 2.0);
  ASSERT_EQ(d.rows.size(), 6u);
  EXPECT_EQ(d.t_count(), 2u);
  for (int k = 0; k <= 5; ++k) {
    const auto& row = d.rows[k];
    EXPECT_EQ(row.cube, (Cube{k, 0, 0}));
    EXPECT_EQ(row.q_generation, k);
    EXPECT_NEAR(row.g_wavg, 1.0 + 19.0 * std::ldexp(1.0, k - 5), 1e-12);
    if (k == 0 || k == 5) {
      EXPECT_TRUE(row.in_t);
      EXPECT_EQ(row.t_anchor, k == 0 ? 0 : 5);
      EXPECT_EQ(row.i_t, 0);
    } else {
      EXPECT_FALSE(row.in_t);
      EXPECT_EQ(row.t_anchor, 0);
      EXPECT_EQ(row.i_t, k);
    }
  }
  ASSERT_EQ(d.t_children(0).size(), 1u);
  EXPECT_EQ(d.rows[d.t_children(0)[0]].cube, (Cube{5, 0, 0}));
  EXPECT_NEAR(d.rows[0].w_sharp_fraction, 31.0 / 32.0, 1e-12);
  EXPECT_EQ(d.t_sharp_failures, 0);
}

TEST(BuildCorona, StoppingFactorIsConfigurable) {
  const DyadicGrid g(1, 3);
  const Weight sigma = Weight::uniform(g);
  const Weight w = Weight::uniform(g);
  std::vector<Cube> members;
  for (int k = 0; k <= 3; ++k) members.push_back({k, 0, 0});
  // Averages down the left chain: 10, 20, 40, 80.
  std::vector<double> gf(g.cell_count(), 0.0);
  gf[0] = 80.0;

  const auto strict = build_corona(sigma, w, gf, members, 2.0);
  EXPECT_EQ(strict.t_count(), 1u);

  CoronaOptions opts;
  opts.stopping_factor = 1.5;
  const auto loose = build_corona(sigma, w, gf, members, 2.0, opts);
  EXPECT_EQ(loose.t_count(), 4u);
  for (const auto& row : loose.rows) EXPECT_EQ(row.i_t, 0);
}

TEST(BuildCorona, SigmaStoppingViaOrClause) {
  const DyadicGrid g(1, 4);
  std::vector<double> sc(g.cell_count(), 1.0);
  sc[0] = 1e6;
  const Weight sigma(g, sc);
  const Weight w = Weight::uniform(g);
  const std::vector<double> ones(g.cell_count(), 1.0);
  const std::vector<Cube> members{{0, 0, 0}, {4, 0, 0}};

  const auto d = build_corona(sigma, w, ones, members, 2.0);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.t_count(), 1u);
  EXPECT_EQ(d.s_count(), 2u);
  const auto& leaf = d.rows[1];
  EXPECT_FALSE(leaf.in_t);
  EXPECT_TRUE(leaf.in_s);
  EXPECT_EQ(leaf.t_anchor, 0);
  EXPECT_EQ(leaf.s_anchor, 1);
  EXPECT_EQ(leaf.i_t, 1);
  EXPECT_EQ(leaf.i_s, 0);
  ASSERT_EQ(d.s_children(0).size(), 1u);
  EXPECT_TRUE(d.t_children(0).empty());
}

TEST(BuildCorona, RootMustBeMember) {
  const DyadicGrid g(1, 3);
  const Weight u = Weight::uniform(g);
  const std::vector<double> ones(g.cell_count(), 1.0);
  const std::vector<Cube> no_root{{1, 0, 0}, {2, 0, 0}};
  EXPECT_THROW(build_corona(u, u, ones, no_root, 2.0),
               std::invalid_argument);

  CoronaOptions opts;
  opts.root = Cube{1, 0, 0};
  const std::vector<Cube> mixed{{1, 0, 0}, {2, 0, 0}, {1, 1, 0}};
  const auto d = build_corona(u, u, ones, mixed, 2.0, opts);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[0].cube, (Cube{1, 0, 0}));
  EXPECT_EQ(d.rows[0].parent, -1);

  opts.root = Cube{2, 1, 0};
  EXPECT_THROW(build_corona(u, u, ones, mixed, 2.0, opts),
               std::invalid_argument);
}

TEST(BuildCorona, ValidatesInput) {
  const DyadicGrid g(1, 3);
  const Weight u = Weight::uniform(g);
  const std::vector<Cube> members{{0, 0, 0}};
  const std::vector<double> ones(g.cell_count(), 1.0);
  EXPECT_THROW(build_corona(u, u, ones, members, 1.0),
               std::invalid_argument);
  EXPECT_THROW(build_corona(u, u, {1.0, 1.0}, members, 2.0),
               std::invalid_argument);
  std::vector<double> neg(g.cell_count(), 1.0);
  neg[2] = -0.5;
  EXPECT_THROW(build_corona(u, u, neg, members, 2.0),
               std::invalid_argument);
  CoronaOptions opts;
  opts.stopping_factor = 1.0;
  EXPECT_THROW(build_corona(u, u, ones, members, 2.0, opts),
               std::invalid_argument);
  const DyadicGrid g2(1, 3);
  const Weight other = Weight::uniform(g2);
  EXPECT_THROW(build_corona(u, other, ones, members, 2.0),
               std::invalid_argument);
}

// Stopping children each carry average mass above factor times the parent,
// so they can never eat more than 1/factor of the block.
TEST(BuildCorona, TSharpMassBound) {
  const DyadicGrid g(1, 6);
  for (std::uint64_t seed : {101, 202, 303, 404, 505}) {
    const Weight sigma(g, random_cells(g, seed, 1.5));
    const Weight w(g, random_cells(g, seed + 1, 1.5));
    const auto gf = random_cells(g, seed + 2, 2.5);
    const auto d =
        build_corona(sigma, w, gf, chain_plus(g, seed + 3, 12), 2.0);
    EXPECT_EQ(d.t_sharp_failures, 0);
    for (const auto& row : d.rows)
      if (row.in_t) EXPECT_GE(row.w_sharp_fraction, 0.9 - 1e-9);
  }
}

TEST(BuildCorona, RandomizedStructureInvariants) {
  const DyadicGrid g(1, 6);
  for (std::uint64_t seed : {11, 22, 33}) {
    for (double p : {1.5, 2.0}) {
      const Weight sigma(g, random_cells(g, seed, 1.6));
      const Weight w(g, random_cells(g, seed + 7, 1.6));
      const auto gf = random_cells(g, seed + 13, 2.0);
      const auto members = chain_plus(g, seed + 19, 10);
      const auto d = build_corona(sigma, w, gf, members, p);

      ASSERT_EQ(d.rows.size(), members.size());
      int counts[4] = {0, 0, 0, 0};
      for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto& row = d.rows[i];
        // Restart clause: every T member is an S member.
        if (row.in_t) EXPECT_TRUE(row.in_s);
        EXPECT_LE(row.i_s, row.i_t);
        EXPECT_GE(row.i_s, 0);
        ASSERT_GE(row.regime, 1);
        ASSERT_LE(row.regime, 3);
        counts[row.regime] += 1;
        if (row.in_t) EXPECT_EQ(row.regime, 3);

        // Anchor is the deepest T member containing the cube.
        int best = -1;
        for (std::size_t j = 0; j < d.rows.size(); ++j)
          if (d.rows[j].in_t &&
              g.contains(d.rows[j].cube, row.cube) &&
              (best < 0 || d.rows[j].cube.level > d.rows[best].cube.level))
            best = static_cast<int>(j);
        EXPECT_EQ(row.t_anchor, best);

        // Collection generation agrees with the standalone counter.
        EXPECT_EQ(row.q_generation, generation(g, members, row.cube));
      }
      EXPECT_EQ(counts[1] + counts[2] + counts[3],
                static_cast<int>(d.rows.size()));
    }
  }
}

TEST(CoronaGFunction, PiecewiseEnvelope) {
  const DyadicGrid g(1, 2);
  const Weight sigma = Weight::uniform(g);
  const Weight w(g, {1.0, 1.0, 100.0, 100.0});
  const std::vector<double> gf{84.0, 0.0, 0.0, 0.0};
  const std::vector<Cube> members{{0, 0, 0}, {1, 0, 0}};
  const auto d = build_corona(sigma, w, gf, members, 2.0);
  ASSERT_EQ(d.t_count(), 2u);

  const auto env = corona_g_function(d, 0);
  EXPECT_NEAR(env[0], 42.0, 1e-12);
  EXPECT_NEAR(env[1], 42.0, 1e-12);
  EXPECT_NEAR(env[2], 21.0 / 50.5, 1e-12);
  EXPECT_NEAR(env[3], 21.0 / 50.5, 1e-12);
  EXPECT_THROW(corona_g_function(d, 1u + 5u), std::invalid_argument);
}

TEST(AlphaStrata, ConstantWeightsSingleStratum) {
  const DyadicGrid g(1, 5);
  const Weight u = Weight::uniform(g);
  std::vector<Cube> members;
  for (int k = 0; k <= 5; ++k) members.push_back({k, 0, 0});
  const auto strata =
      alpha_strata(u, u, members, 2.0, YoungFunction::power(2.0),
                   EpsilonFunction::power_law(0.25));
  ASSERT_EQ(strata.size(), 1u);
  EXPECT_EQ(strata[0].index, 0);
  EXPECT_EQ(strata[0].members.size(), members.size());
  const double expected = std::pow(2.0, 0.25);  // eps(1 + rho), rho = 1
  EXPECT_NEAR(strata[0].alpha, expected, 1e-12);
  for (double r : strata[0].rho) EXPECT_NEAR(r, 1.0, 1e-12);
}

TEST(AlphaStrata, FloorIndexTable) {
  EXPECT_EQ(detail::stratum_index(8.0, 8.0), 0);
  EXPECT_EQ(detail::stratum_index(8.0, 5.0), 0);
  EXPECT_EQ(detail::stratum_index(8.0, 3.0), 1);
  EXPECT_EQ(detail::stratum_index(8.0, 1.6), 2);
  EXPECT_EQ(detail::stratum_index(8.0, 0.9), 3);
  EXPECT_EQ(detail::stratum_index(8.0, 0.0), -1);
}

TEST(AlphaStrata, WithinStratumSpreadAtMostTwo) {
  const DyadicGrid g(1, 6);
  std::vector<double> sc = random_cells(g, 41, 1.8);
  // A dead sigma region produces null-stratum cubes.
  for (std::uint64_t c = 48; c < 64; ++c) sc[c] = 0.0;
  const Weight sigma(g, sc);
  const Weight w(g, random_cells(g, 42, 1.8));
  auto members = chain_plus(g, 43, 10);
  members.push_back({2, 3, 0});  // entirely inside the dead region
  canonicalize(g, members);

  const auto strata = alpha_strata(sigma, w, members, 2.0,
                                   YoungFunction::log_bump(2.0, 1.0),
                                   EpsilonFunction::log_power(1.0),
                                   EntangleArg::rho);
  std::size_t total = 0;
  bool saw_null = false;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const auto& st = strata[s];
    ASSERT_FALSE(st.members.empty());
    total += st.members.size();
    if (st.index < 0) {
      saw_null = true;
      EXPECT_EQ(s + 1, strata.size());  // null stratum sorts last
      EXPECT_EQ(st.alpha, 0.0);
      for (double v : st.psi) EXPECT_EQ(v, 0.0);
      continue;
    }
    double lo = st.psi[0], hi = st.psi[0];
    for (double v : st.psi) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      EXPECT_LE(v, st.alpha * (1.0 + 1e-12));
      EXPECT_GT(v, 0.5 * st.alpha * (1.0 - 1e-12));
    }
    EXPECT_LE(hi / lo, 2.0 + 1e-9);
  }
  EXPECT_EQ(total, members.size());
  EXPECT_TRUE(saw_null);
}

TEST(LemmaReport, SingleCubeUnitInstance) {
  const DyadicGrid g(1, 2);
  const Weight u = Weight::uniform(g);
  const std::vector<double> ones(g.cell_count(), 1.0);
  const std::vector<Cube> members{{0, 0, 0}};
  const auto A = YoungFunction::power(2.0);
  const auto eps = EpsilonFunction::power_law(0.25);
  const auto d = build_corona(u, u, ones, members, 2.0);

  const auto strata =
      alpha_strata(u, u, members, 2.0, A, eps, EntangleArg::one_plus_rho);
  ASSERT_EQ(strata.size(), 1u);
  const auto rep = lemma_report(d, strata[0], u, u, A, eps);
  ASSERT_EQ(rep.blocks.size(), 1u);
  // Left side and right-side core are both 1, so the ratio is 1/alpha.
  EXPECT_NEAR(rep.blocks[0].r_basic, 1.0 / rep.alpha, 1e-12);
  EXPECT_NEAR(rep.alpha, std::pow(2.0, 0.25), 1e-12);
  EXPECT_NEAR(rep.blocks[0].r_regime3, rep.blocks[0].r_basic, 1e-15);
  EXPECT_EQ(rep.blocks[0].r_regime1, 0.0);
  EXPECT_EQ(rep.blocks[0].r_regime2, 0.0);

  const auto bare =
      alpha_strata(u, u, members, 2.0, A, eps, EntangleArg::rho);
  const auto rep_bare = lemma_report(d, bare[0], u, u, A, eps);
  EXPECT_NEAR(rep_bare.alpha, 1.0, 1e-12);
  EXPECT_NEAR(rep_bare.blocks[0].r_basic, 1.0, 1e-12);
}

TEST(LemmaReport, TwoBlockHandComputed) {
  const DyadicGrid g(1, 2);
  const Weight sigma = Weight::uniform(g);
  const Weight w(g, {1.0, 1.0, 100.0, 100.0});
  const std::vector<double> gf{84.0, 0.0, 0.0, 0.0};
  const std::vector<Cube> members{{0, 0, 0}, {1, 0, 0}};
  const auto A = YoungFunction::power(2.0);
  const auto eps = EpsilonFunction::power_law(0.25);

  const auto d = build_corona(sigma, w, gf, members, 2.0);
  ASSERT_EQ(d.t_count(), 2u);
  EXPECT_NEAR(d.rows[0].w_sharp_fraction, 100.0 / 101.0, 1e-12);

  const auto strata =
      alpha_strata(sigma, w, members, 2.0, A, eps, EntangleArg::rho);
  ASSERT_EQ(strata.size(), 2u);
  EXPECT_EQ(strata[0].index, 0);
  EXPECT_EQ(strata[1].index, 2);
  EXPECT_NEAR(strata[0].alpha, std::sqrt(50.5), 1e-12);

  const auto rep0 = lemma_report(d, strata[0], sigma, w, A, eps);
  ASSERT_EQ(rep0.blocks.size(), 1u);
  EXPECT_EQ(rep0.blocks[0].t_cube, (Cube{0, 0, 0}));
  EXPECT_NEAR(rep0.blocks[0].r_basic, 1.0, 1e-12);
  EXPECT_NEAR(rep0.blocks[0].r_regime3, 1.0, 1e-12);
  EXPECT_NEAR(rep0.blocks[0].r_regime3_alt, 1.0, 1e-12);
  EXPECT_EQ(rep0.degenerate_blocks, 0);
  EXPECT_NEAR(rep0.r_quasiorth, (441.0 / 50.5 + 882.0) / 1764.0, 1e-12);
  EXPECT_NEAR(rep0.r_epssum, 1.0, 1e-12);
  EXPECT_NEAR(rep0.r_rhodecay, 1.0, 1e-12);
  EXPECT_NEAR(rep0.r_holder, 1.0, 1e-12);
  EXPECT_NEAR(rep0.r_sw, 1.0, 1e-12);

  const auto rep2 = lemma_report(d, strata[1], sigma, w, A, eps);
  ASSERT_EQ(rep2.blocks.size(), 1u);
  EXPECT_EQ(rep2.blocks[0].t_cube, (Cube{1, 0, 0}));
  EXPECT_NEAR(rep2.blocks[0].r_basic, 4.0 / std::sqrt(50.5), 1e-12);
  EXPECT_NEAR(rep2.r_epssum, 1.0, 1e-12);
}

// Uniform weights on a chain: only the root is regime 3, everything deeper
// is regime 1, and the penalty stack reduces to the root contribution.
TEST(LemmaReport, ChainPointwisePenaltySum) {
  const DyadicGrid g(1, 5);
  const Weight u = Weight::uniform(g);
  const std::vector<double> ones(g.cell_count(), 1.0);
  std::vector<Cube> members;
  for (int k = 0; k <= 5; ++k) members.push_back({k, 0, 0});
  const auto A = YoungFunction::power(2.0);
  const auto eps = EpsilonFunction::power_law(0.25);

  const auto d = build_corona(u, u, ones, members, 2.0);
  for (const auto& row : d.rows)
    EXPECT_EQ(row.regime, row.q_generation == 0 ? 3 : 1);

  const auto strata =
      alpha_strata(u, u, members, 2.0, A, eps, EntangleArg::one_plus_rho);
  ASSERT_EQ(strata.size(), 1u);
  const auto rep = lemma_report(d, strata[0], u, u, A, eps);

  const double alpha = std::pow(2.0, 0.25);
  const double core = 2.0 - std::ldexp(1.0, -5);  // sum of member measures
  ASSERT_EQ(rep.blocks.size(), 1u);
  EXPECT_NEAR(rep.alpha, alpha, 1e-12);
  EXPECT_NEAR(rep.blocks[0].r_basic, std::sqrt(core) / alpha, 1e-12);
  EXPECT_NEAR(rep.blocks[0].r_regime1,
              (core - 1.0) / (alpha * std::sqrt(core)), 1e-12);
  EXPECT_NEAR(rep.blocks[0].r_regime3, 1.0 / (alpha * std::sqrt(core)),
              1e-12);
  EXPECT_EQ(rep.blocks[0].r_regime2, 0.0);

  // Only the root is regime 3, so the stack is one term of eps(2)^{-2};
  // the trivial upper bound is one term per containing member.
  const double term = std::pow(alpha, -2.0);
  EXPECT_NEAR(rep.r_epssum, term, 1e-12);
  EXPECT_LE(rep.r_epssum, 6.0 * term);
  EXPECT_NEAR(rep.r_rhodecay, 1.0, 1e-12);
  // An unsplit chain fails strict packing; the report must still agree
  // with the standalone computation.
  EXPECT_NEAR(rep.r_packing, packing_worst_ratio(g, members, 2.0), 1e-12);
  EXPECT_GT(rep.r_packing, 1.0);
}

TEST(LemmaReport, DegenerateBlocksCountedNotCrashed) {
  const DyadicGrid g(1, 3);
  const Weight sigma = Weight::uniform(g);
  const Weight w(g, std::vector<double>(g.cell_count(), 0.0));
  const std::vector<double> ones(g.cell_count(), 1.0);
  std::vector<Cube> members;
  for (int k = 0; k <= 3; ++k) members.push_back({k, 0, 0});
  const auto A = YoungFunction::power(2.0);
  const auto eps = EpsilonFunction::power_law(0.25);

  const auto d = build_corona(sigma, w, ones, members, 2.0);
  const auto strata = alpha_strata(sigma, w, members, 2.0, A, eps);
  ASSERT_EQ(strata.size(), 1u);
  EXPECT_EQ(strata[0].index, -1);  // psi = 0 everywhere

  const auto rep = lemma_report(d, strata[0], sigma, w, A, eps);
  ASSERT_EQ(rep.blocks.size(), 1u);
  EXPECT_TRUE(rep.blocks[0].degenerate);
  EXPECT_EQ(rep.degenerate_blocks, 1);
  EXPECT_EQ(rep.blocks[0].r_basic, 0.0);
  EXPECT_EQ(rep.r_quasiorth, 0.0);
}

TEST(LemmaReport, RejectsBadStrata) {
  const DyadicGrid g(1, 3);
  const Weight u = Weight::uniform(g);
  const std::vector<double> ones(g.cell_count(), 1.0);
  const std::vector<Cube> members{{0, 0, 0}, {1, 0, 0}};
  const auto A = YoungFunction::power(2.0);
  const auto eps = EpsilonFunction::power_law(0.25);
  const auto d = build_corona(u, u, ones, members, 2.0);

  AlphaStratum empty;
  EXPECT_THROW(lemma_report(d, empty, u, u, A, eps),
               std::invalid_argument);

  // A stratum over cubes the decomposition has never seen.
  const std::vector<Cube> other{{0, 0, 0}, {2, 2, 0}};
  auto strata = alpha_strata(u, u, other, 2.0, A, eps);
  EXPECT_THROW(lemma_report(d, strata[0], u, u, A, eps),
               std::invalid_argument);
}

TEST(LemmaReport, RandomizedRatiosStayTame) {
  const DyadicGrid g(1, 6);
  const auto A = YoungFunction::log_bump(2.0, 1.0);
  const auto eps = EpsilonFunction::log_power(1.0).normalized(2.0);
  const double holder_cap = holder_audit_constant(A) * (1.0 + 1e-9);

  for (std::uint64_t seed : {51, 52, 53}) {
    const Weight sigma(g, random_cells(g, seed, 1.5));
    const Weight w(g, random_cells(g, seed + 5, 1.5));
    const auto gf = random_cells(g, seed + 9, 2.0);
    const auto members = chain_plus(g, seed + 14, 10);
    const auto d = build_corona(sigma, w, gf, members, 2.0);
    const auto strata =
        alpha_strata(sigma, w, members, 2.0, A, eps, EntangleArg::rho);

    std::size_t covered = 0;
    for (const auto& st : strata) {
      covered += st.members.size();
      const auto rep = lemma_report(d, st, sigma, w, A, eps);
      for (const auto& blk : rep.blocks) {
        if (blk.degenerate) continue;
        EXPECT_TRUE(std::isfinite(blk.r_basic));
        EXPECT_GE(blk.r_basic, 0.0);
        EXPECT_LE(blk.r_regime1 + blk.r_regime2 + blk.r_regime3,
                  blk.r_basic * (1.0 + 1e-12) + 1e-15);
      }
      EXPECT_TRUE(std::isfinite(rep.r_epssum));
      EXPECT_TRUE(std::isfinite(rep.r_rhodecay));
      EXPECT_LE(rep.r_holder, holder_cap);
      EXPECT_LE(rep.r_quasiorth, 6.0);
      EXPECT_EQ(rep.t_sharp_failures, 0);
      EXPECT_NEAR(rep.r_packing,
                  packing_worst_ratio(g, d.member_cubes(), 2.0), 1e-12);
    }
    EXPECT_EQ(covered, members.size());
  }
}

}  // namespace

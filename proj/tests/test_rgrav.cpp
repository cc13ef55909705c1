#include <gtest/gtest.h>

#include "gravnet/chebfilter.hpp"
#include "gravnet/rgrav.hpp"
#include "oracles.hpp"

using namespace gravnet;

namespace {

struct Problem {
  std::vector<Matrix> mats;
  std::vector<StiefelBasis> bases;
  Matrix p_bar;
  StiefelBasis u0;
};

Problem make_problem(int n, int k, int m, double eps, unsigned seed) {
  std::mt19937 gen(seed);
  const Matrix c = oracle::random_stiefel(n, k, gen);
  Problem p{{}, {}, Matrix(), StiefelBasis(oracle::random_stiefel(n, k, gen))};
  for (int i = 0; i < m; ++i) {
    p.mats.push_back(oracle::perturbed(c, eps, gen));
    p.bases.emplace_back(p.mats.back());
  }
  p.p_bar = oracle::mean_projector(p.mats);
  return p;
}

// Dense f~_t(P) u0 from the recursion coefficients.
Matrix dense_tilde(const Matrix& p, const Matrix& u0, int t, double alpha) {
  Matrix f_prev = u0;
  Matrix f = p * u0;
  if (t == 0) return f_prev;
  for (int s = 2; s <= t; ++s) {
    const ChebRecurrence rec = chebyshev_coefficients(s, alpha);
    Matrix next = rec.a * (p * f + rec.b * f + rec.c * f_prev);
    f_prev = std::move(f);
    f = std::move(next);
  }
  return f;
}

}  // namespace

TEST(AveragedProjection, MatchesDense) {
  const Problem p = make_problem(12, 3, 5, 0.5, 1);
  OpTally tally;
  const Matrix a = averaged_projection(p.bases, p.u0.matrix(), &tally);
  EXPECT_LT((a - p.p_bar * p.u0.matrix()).norm(), 1e-13);
  EXPECT_EQ(tally.matmuls, 10);
}

TEST(RgravFinite, NoOrthonormalizationIsTheOptimalPolynomial) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Problem p = make_problem(20, 3, 8, 0.6, 100 + seed);
    for (int T = 1; T <= 6; ++T) {
      const auto roots = oracle::f_star_roots(T, 0.15);
      std::vector<Matrix> seen;
      rgrav_finite(p.bases, p.u0, 0.15, T, OrthoSchedule::never(),
                   {[&](int, const Matrix& it) { seen.push_back(it); }, nullptr});
      ASSERT_EQ(seen.size(), static_cast<std::size_t>(T));
      for (int t = 1; t <= T; ++t) {
        const std::vector<long double> head(roots.begin(), roots.begin() + t);
        const Matrix ref = oracle::apply_roots(p.p_bar, head, p.u0.matrix());
        EXPECT_LT(oracle::chordal_sq(oracle::span_basis(seen[t - 1]), oracle::span_basis(ref)),
                  1e-20);
      }
    }
  }
}

TEST(RgravFinite, ScheduleDoesNotChangeSpan) {
  const Problem p = make_problem(20, 3, 8, 0.6, 2);
  const AverageResult never = rgrav_finite(p.bases, p.u0, 0.15, 6, OrthoSchedule::never());
  const AverageResult every = rgrav_finite(p.bases, p.u0, 0.15, 6, OrthoSchedule::every(1));
  const AverageResult third = rgrav_finite(p.bases, p.u0, 0.15, 6, OrthoSchedule::every(3));
  EXPECT_LT(squared_chordal_distance(never.mean.matrix(), every.mean.matrix()), 1e-20);
  EXPECT_LT(squared_chordal_distance(third.mean.matrix(), every.mean.matrix()), 1e-20);
}

TEST(RgravAsymptotic, FollowsRecursionPolynomial) {
  const Problem p = make_problem(20, 3, 8, 0.6, 3);
  RGravConfig cfg;
  cfg.ortho = OrthoSchedule::never();
  cfg.max_iter = 6;
  cfg.tol = 0.0;
  std::vector<Matrix> seen;
  rgrav_asymptotic(p.bases, p.u0, cfg,
                   {[&](int, const Matrix& it) { seen.push_back(it); }, nullptr});
  ASSERT_EQ(seen.size(), 6u);
  for (int t = 1; t <= 6; ++t) {
    const Matrix ref = dense_tilde(p.p_bar, p.u0.matrix(), t, cfg.alpha);
    EXPECT_LT(oracle::chordal_sq(oracle::span_basis(seen[t - 1]), oracle::span_basis(ref)),
              1e-20);
  }
}

TEST(RgravAsymptotic, OrthonormalizedMatchesUnnormalized) {
  const Problem p = make_problem(20, 3, 8, 0.6, 4);
  RGravConfig a;
  a.max_iter = 8;
  a.tol = 0.0;
  RGravConfig b = a;
  b.ortho = OrthoSchedule::never();
  RGravConfig c = a;
  c.ortho = OrthoSchedule::every(4);
  const auto ra = rgrav_asymptotic(p.bases, p.u0, a);
  const auto rb = rgrav_asymptotic(p.bases, p.u0, b);
  const auto rc = rgrav_asymptotic(p.bases, p.u0, c);
  EXPECT_LT(squared_chordal_distance(ra.mean.matrix(), rb.mean.matrix()), 1e-20);
  EXPECT_LT(squared_chordal_distance(ra.mean.matrix(), rc.mean.matrix()), 1e-20);
}

TEST(RgravAsymptotic, ConvergesToIam) {
  const Problem p = make_problem(30, 4, 12, 0.3, 5);
  const AverageResult r = rgrav_asymptotic(p.bases, p.u0, RGravConfig{});
  const Matrix truth = oracle::top_eigvecs(p.p_bar, 4);
  EXPECT_LT(oracle::chordal_sq(r.mean.matrix(), truth), 1e-12);
  EXPECT_LT(r.iterations, RGravConfig{}.max_iter);
}

TEST(RgravAsymptotic, TallyPerIteration) {
  const Problem p = make_problem(15, 2, 5, 0.3, 6);
  RGravConfig cfg;
  cfg.max_iter = 4;
  cfg.tol = 0.0;
  OpTally every;
  rgrav_asymptotic(p.bases, p.u0, cfg, {{}, &every});
  EXPECT_EQ(every.matmuls, 4 * (2 * 5 + 1));
  EXPECT_EQ(every.decompositions, 4);
  cfg.ortho = OrthoSchedule::never();
  OpTally never;
  rgrav_asymptotic(p.bases, p.u0, cfg, {{}, &never});
  EXPECT_EQ(never.matmuls, 4 * (2 * 5 + 2));
  EXPECT_EQ(never.decompositions, 0);
}

TEST(PowerMethod, MatchesDensePowers) {
  const Problem p = make_problem(20, 3, 8, 0.6, 7);
  for (int T = 1; T <= 6; ++T) {
    Matrix ref = p.u0.matrix();
    for (int t = 0; t < T; ++t) ref = p.p_bar * ref;
    const AverageResult r = power_method(p.bases, p.u0, T);
    EXPECT_EQ(r.iterations, T);
    EXPECT_LT(oracle::chordal_sq(r.mean.matrix(), oracle::span_basis(ref)), 1e-20);
  }
}

TEST(PowerMethod, StopRuleConverges) {
  const Problem p = make_problem(30, 4, 12, 0.3, 8);
  const AverageResult r = power_method(p.bases, p.u0, 500, 1e-24);
  EXPECT_LT(oracle::chordal_sq(r.mean.matrix(), oracle::top_eigvecs(p.p_bar, 4)), 1e-20);
}

TEST(Averaging, SinglePointIsFixedPoint) {
  const Problem p = make_problem(10, 2, 1, 0.0, 9);
  EXPECT_LT(squared_chordal_distance(power_method(p.bases, p.u0, 1).mean.matrix(),
                                     p.bases[0].matrix()),
            1e-28);
  const AverageResult r = rgrav_finite(p.bases, p.u0, 0.15, 1);
  EXPECT_LT(squared_chordal_distance(r.mean.matrix(), p.bases[0].matrix()), 1e-28);
}

TEST(Averaging, RepresentativeInvariance) {
  Problem p = make_problem(16, 3, 6, 0.5, 10);
  std::mt19937 gen(11);
  std::vector<StiefelBasis> rotated;
  for (const auto& m : p.mats) rotated.emplace_back(m * oracle::random_stiefel(3, 3, gen));
  const auto a = rgrav_finite(p.bases, p.u0, 0.15, 5);
  const auto b = rgrav_finite(rotated, p.u0, 0.15, 5);
  EXPECT_LT(squared_chordal_distance(a.mean.matrix(), b.mean.matrix()), 1e-24);
}

TEST(Averaging, RankDeficiencyNamesIteration) {
  const Matrix e = Matrix::Identity(4, 4);
  const std::vector<StiefelBasis> data{StiefelBasis(e.col(0))};
  try {
    power_method(data, StiefelBasis(e.col(1)), 3);
    FAIL() << "expected RankDeficient";
  } catch (const RankDeficient& err) {
    EXPECT_NE(std::string(err.what()).find("iteration 1"), std::string::npos);
  }
}

TEST(Averaging, InputValidation) {
  const Problem p = make_problem(10, 2, 3, 0.3, 12);
  EXPECT_THROW(rgrav_finite(p.bases, p.u0, 1.5, 3), InvalidArgument);
  EXPECT_THROW(rgrav_finite(p.bases, p.u0, 0.15, 0), InvalidArgument);
  EXPECT_THROW(rgrav_finite({}, p.u0, 0.15, 3), InvalidArgument);
  const StiefelBasis wrong(Matrix::Identity(10, 3));
  EXPECT_THROW(rgrav_finite(p.bases, wrong, 0.15, 3), DimensionMismatch);
  RGravConfig bad;
  bad.max_iter = 0;
  EXPECT_THROW(rgrav_asymptotic(p.bases, p.u0, bad), InvalidArgument);
}

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sparse_polyak/core.h"
#include "sparse_polyak/datagen.h"
#include "sparse_polyak/errors.h"
#include "sparse_polyak/objectives.h"
#include "sparse_polyak/random.h"

namespace sp = sparse_polyak;
using sp::DenseMatrix;
using sp::DenseVector;
using sp::Index;

namespace {

sp::GenSpec spec_for(sp::ModelKind model, std::uint64_t seed, double noise = 0.25) {
  sp::GenSpec spec;
  spec.d = 100;
  spec.s_star = 10;
  spec.alpha = 5.0;
  spec.omega = 0.5;
  spec.noise_var = noise;
  spec.model = model;
  spec.seed = seed;
  return spec;
}

double variance(const std::vector<double>& v) {
  oracle::KahanSum sum, sq;
  for (double x : v) sum.add(x);
  const double mean = sum.value() / static_cast<double>(v.size());
  for (double x : v) sq.add((x - mean) * (x - mean));
  return sq.value() / static_cast<double>(v.size() - 1);
}

TEST(Rng, DeterministicAndStreamsDiffer) {
  sp::Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(sp::Rng(42).next_u64(), c.next_u64());
  EXPECT_NE(sp::Rng::substream(1, 1).next_u64(), sp::Rng::substream(1, 2).next_u64());
  EXPECT_EQ(sp::Rng::substream(1, 3).next_u64(), sp::Rng::substream(1, 3).next_u64());
}

TEST(Rng, UniformAndNormalMoments) {
  sp::Rng rng(7);
  std::vector<double> u, z;
  for (int i = 0; i < 20000; ++i) {
    const double x = rng.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    u.push_back(x);
    z.push_back(rng.normal());
    ASSERT_LT(rng.uniform_below(7), 7u);
  }
  EXPECT_NEAR(variance(u), 1.0 / 12.0, 0.005);
  EXPECT_NEAR(variance(z), 1.0, 0.04);
}

TEST(SampleSize, NaturalLogWithBudget) {
  EXPECT_EQ(sp::sample_size(5.0, 20, 100), static_cast<Index>(std::ceil(5.0 * 20 * std::log(100.0))));
  EXPECT_EQ(sp::sample_size(5.0, 20, 100), 461);
  EXPECT_EQ(sp::sample_size(5.0, 140, 1000), 4836);
  sp::GenSpec spec = spec_for(sp::ModelKind::kLeastSquares, 1);
  EXPECT_EQ(sp::generate(spec, 20).problem.samples(), 461);
  spec.alpha.reset();
  spec.n = 37;
  EXPECT_EQ(sp::generate(spec, 20).problem.samples(), 37);
}

TEST(Ar1Design, IndependentWhenOmegaIsZero) {
  sp::Rng rng(1);
  const DenseMatrix x = sp::gen_ar1_design(5, 10000, 0.0, rng);
  for (Index j = 0; j < 5; ++j) {
    const std::vector<double> col(x.col(j).data(), x.col(j).data() + 10000);
    const double v = variance(col);
    EXPECT_GE(v, 0.94);
    EXPECT_LE(v, 1.06);
  }
}

TEST(Ar1Design, StationaryVarianceAndCorrelation) {
  sp::Rng rng(2);
  const DenseMatrix x = sp::gen_ar1_design(60, 10000, 0.5, rng);
  const std::vector<double> c50(x.col(50).data(), x.col(50).data() + 10000);
  const double v = variance(c50);
  EXPECT_GE(v, 1.25);
  EXPECT_LE(v, 1.42);
  const std::vector<double> c0(x.col(0).data(), x.col(0).data() + 10000);
  EXPECT_NEAR(variance(c0), 4.0 / 3.0, 0.08);

  oracle::KahanSum cov, var;
  for (Index i = 0; i < 10000; ++i) {
    cov.add(x(i, 50) * x(i, 51));
    var.add(x(i, 50) * x(i, 50));
  }
  const double rho = cov.value() / var.value();
  EXPECT_GE(rho, 0.45);
  EXPECT_LE(rho, 0.55);
}

TEST(ThetaStar, SupportSizeAndDensity) {
  sp::Rng a(3), b(4);
  const sp::GroundTruth t = sp::gen_theta_star(50, 7, a, b);
  EXPECT_EQ(sp::count_nonzeros(t.theta_star), 7u);
  EXPECT_EQ(t.support_star, sp::support(t.theta_star));
  const sp::GroundTruth full = sp::gen_theta_star(12, 12, a, b);
  EXPECT_EQ(sp::count_nonzeros(full.theta_star), 12u);
}

TEST(ThetaStar, SupportIsUniform) {
  sp::Rng a(5), b(6);
  std::vector<int> hits(100, 0);
  for (int draw = 0; draw < 10000; ++draw) {
    for (Index i : sp::gen_theta_star(100, 10, a, b).support_star) ++hits[static_cast<std::size_t>(i)];
  }
  for (int h : hits) {
    EXPECT_GE(h, 900);
    EXPECT_LE(h, 1100);
  }
}

TEST(Responses, NoiselessLinearIsExact) {
  const sp::GeneratedInstance inst = sp::generate(spec_for(sp::ModelKind::kLeastSquares, 7, 0.0), 20);
  EXPECT_EQ(inst.truth.f_star, 0.0);
  EXPECT_EQ(inst.problem.responses(), sp::linear_predictor(inst.problem.design(), inst.truth.theta_star));
}

TEST(Responses, LogisticFairCoinAndSaturation) {
  sp::Rng rng(8);
  const DenseMatrix x = DenseMatrix::Ones(10000, 1);
  const DenseVector zero = DenseVector::Zero(1);
  const DenseVector y0 = sp::gen_responses(sp::ModelKind::kLogistic, x, zero, 0.0, rng);
  EXPECT_GE(y0.mean(), 0.48);
  EXPECT_LE(y0.mean(), 0.52);
  const DenseVector four = DenseVector::Constant(1, 4.0);
  const DenseVector y4 = sp::gen_responses(sp::ModelKind::kLogistic, x, four, 0.0, rng);
  EXPECT_GE(y4.mean(), 0.96);
  EXPECT_LE(y4.mean(), 1.0);
  for (Index i = 0; i < y4.size(); ++i) EXPECT_TRUE(y4[i] == 0.0 || y4[i] == 1.0);
}

TEST(Generate, Reproducible) {
  for (sp::ModelKind model : {sp::ModelKind::kLeastSquares, sp::ModelKind::kLogistic}) {
    const sp::GeneratedInstance a = sp::generate(spec_for(model, 9), 20);
    const sp::GeneratedInstance b = sp::generate(spec_for(model, 9), 20);
    EXPECT_EQ(a.problem.design(), b.problem.design());
    EXPECT_EQ(a.problem.responses(), b.problem.responses());
    EXPECT_EQ(a.truth.theta_star, b.truth.theta_star);
    const sp::GeneratedInstance c = sp::generate(spec_for(model, 10), 20);
    EXPECT_NE(a.problem.design(), c.problem.design());
  }
}

TEST(Generate, NoiseLevelLeavesDesignAndTruthUnchanged) {
  const sp::GeneratedInstance a = sp::generate(spec_for(sp::ModelKind::kLeastSquares, 11, 0.25), 20);
  const sp::GeneratedInstance b = sp::generate(spec_for(sp::ModelKind::kLeastSquares, 11, 1.0), 20);
  EXPECT_EQ(a.problem.design(), b.problem.design());
  EXPECT_EQ(a.truth.theta_star, b.truth.theta_star);
  EXPECT_NE(a.problem.responses(), b.problem.responses());
  EXPECT_NEAR(a.truth.f_star, sp::value(a.problem, a.truth.theta_star), 0.0);
}

TEST(Generate, ValidationNamesField) {
  sp::GenSpec spec = spec_for(sp::ModelKind::kLeastSquares, 1);
  spec.s_star = 101;
  try {
    sp::generate(spec, 20);
    FAIL() << "expected ParameterError";
  } catch (const sp::ParameterError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("s_star:", 0), 0u) << e.what();
  }
  spec = spec_for(sp::ModelKind::kLeastSquares, 1);
  spec.omega = 1.0;
  EXPECT_THROW(sp::generate(spec, 20), sp::ParameterError);
  spec = spec_for(sp::ModelKind::kLeastSquares, 1);
  spec.n = 50;
  EXPECT_THROW(sp::generate(spec, 20), sp::ParameterError);
  spec = spec_for(sp::ModelKind::kLeastSquares, 1);
  spec.noise_var = -1.0;
  EXPECT_THROW(sp::generate(spec, 20), sp::ParameterError);
}

TEST(MatrixInstance, LowRankTruth) {
  const sp::GeneratedInstance inst = sp::gen_matrix_instance(10, 2, 300, 0.0, 12);
  const DenseMatrix theta = sp::unflatten(inst.truth.theta_star, 10, 10);
  EXPECT_EQ(sp::numerical_rank(theta), 2);
  EXPECT_EQ(inst.truth.f_star, 0.0);
  EXPECT_EQ(inst.problem.samples(), 300);
  EXPECT_EQ(inst.problem.dim(), 100);

  const sp::GeneratedInstance one = sp::gen_matrix_instance(6, 1, 50, 0.1, 13);
  const DenseMatrix t1 = sp::unflatten(one.truth.theta_star, 6, 6);
  EXPECT_LT((sp::rank_project(t1, 1) - t1).norm(), 1e-10 * t1.norm());

  sp::GenSpec spec;
  spec.d = 8;
  spec.s_star = 2;
  spec.n = 100;
  spec.model = sp::ModelKind::kMatrixRegression;
  spec.seed = 14;
  EXPECT_EQ(sp::generate(spec, 2).problem.param_rows(), 8);
}

}  // namespace

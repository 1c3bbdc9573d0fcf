#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dualest/observation.hpp"
#include "helpers.hpp"

using namespace dualest;

TEST_CASE("observation model validation") {
  Matrix h = Matrix::Zero(2, 1);
  Matrix r_bad(1, 1);
  r_bad << 0.0;
  CHECK_THROWS_AS((ObservationModel{h, r_bad}), std::invalid_argument);

  Matrix r2(2, 2);
  r2 << 1.0, 0.9, 0.2, 1.0;  // not symmetric
  CHECK_THROWS_AS((ObservationModel{Matrix::Zero(2, 2), r2}), std::invalid_argument);

  Matrix r_neg(2, 2);
  r_neg << 1.0, 2.0, 2.0, 1.0;  // symmetric, indefinite
  CHECK_THROWS_AS((ObservationModel{Matrix::Zero(2, 2), r_neg}), std::invalid_argument);
}

TEST_CASE("zero observation map gives pure noise") {
  const JumpPath path(2, 1.0, {0.3}, {0, 1});
  const ObservationModel model(Matrix::Zero(2, 1), Matrix::Identity(1, 1));
  const TimeGrid grid(1.0, 100);
  const ObservationRecord rec = simulate_observation(path, model, grid, 5u);
  CHECK(rec.z.values == rec.w.values);
}

TEST_CASE("horizon mismatch is rejected") {
  const JumpPath path(2, 1.0, {}, {0});
  const ObservationModel model(Matrix::Zero(2, 1), Matrix::Identity(1, 1));
  CHECK_THROWS_AS(simulate_observation(path, model, TimeGrid(2.0, 10), 1u),
                  std::invalid_argument);
}

TEST_CASE("identity read-out of a constant path: mean and variance of Z_T") {
  const JumpPath path(2, 1.0, {}, {0});
  const ObservationModel model(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  const TimeGrid grid(1.0, 100);

  const int trials = 10000;
  Vector sum = Vector::Zero(2), sum_sq = Vector::Zero(2);
  for (int t = 0; t < trials; ++t) {
    const Vector z_t = simulate_observation(path, model, grid, derive_seed(9u, t)).z.at(100);
    sum += z_t;
    sum_sq += z_t.cwiseProduct(z_t);
  }
  const Vector mean = sum / trials;
  Vector expected(2);
  expected << 1.0, 0.0;  // e_1 * T
  for (int i = 0; i < 2; ++i) {
    const double var = sum_sq[i] / trials - mean[i] * mean[i];
    const double se_mean = std::sqrt(var / trials);
    CHECK(std::abs(mean[i] - expected[i]) <= 3.0 * se_mean);
    const double se_var = var * std::sqrt(2.0 / (trials - 1));
    CHECK(std::abs(var - 1.0) <= 3.0 * se_var);
  }
}

TEST_CASE("drift uses exact occupation times across a mid-cell jump") {
  // Jump at T/2 inside a cell: Z - W telescopes the exact drift integral.
  const JumpPath path(2, 1.0, {0.5}, {0, 1});
  Matrix h(2, 1);
  h << 1.0, 0.0;
  const ObservationModel model(h, Matrix::Identity(1, 1));
  const TimeGrid grid(1.0, 3);  // cells of 1/3: the jump is interior to cell 2
  const ObservationRecord rec = simulate_observation(path, model, grid, 21u);
  const double drift = rec.z.at(3)[0] - rec.w.at(3)[0];
  CHECK(drift == doctest::Approx(0.5).epsilon(1e-12));

  // And the expected value over seeds matches T/2 statistically.
  const int trials = 4000;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double z_t = simulate_observation(path, model, grid, derive_seed(13u, t)).z.at(3)[0];
    sum += z_t;
    sum_sq += z_t * z_t;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum_sq / trials - mean * mean) / (trials - 1));
  CHECK(std::abs(mean - 0.5) <= 3.0 * se);
}

TEST_CASE("normalized increments match the noise covariance") {
  const JumpPath path(2, 1.0, {}, {0});
  Rng model_rng(3u);
  Matrix r(2, 2);
  r << 0.8, 0.3, 0.3, 0.5;
  const ObservationModel model(Matrix::Zero(2, 2), r);
  const TimeGrid grid(1.0, 1000);
  const double dt = grid.dt();

  const int seeds = 100;  // 100 * 1000 increments
  const long n = static_cast<long>(seeds) * grid.steps();
  Vector sum = Vector::Zero(2), sum_sq = Vector::Zero(2);
  for (int s = 0; s < seeds; ++s) {
    const ObservationRecord rec = simulate_observation(path, model, grid, derive_seed(17u, s));
    for (int k = 0; k < grid.steps(); ++k) {
      const Vector inc = (rec.w.at(k + 1) - rec.w.at(k)) / std::sqrt(dt);
      sum += inc;
      sum_sq += inc.cwiseProduct(inc);
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double mean = sum[i] / n;
    const double var = sum_sq[i] / n - mean * mean;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(r(i, i) / n));
    CHECK(std::abs(var - r(i, i)) <= 4.0 * r(i, i) * std::sqrt(2.0 / (n - 1.0)));
  }
}

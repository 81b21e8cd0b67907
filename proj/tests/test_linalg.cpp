#include "hcre/linalg.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hcre;
using test::random_psd;
using test::random_spd;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("harmonic mean of equal inputs is the input") {
  std::mt19937_64 rng(7);
  const SpdMatrix p = random_spd(rng, 3);
  const VectorXd w = (VectorXd(2) << 0.5, 0.5).finished();
  const SpdMatrix hm = harmonic_mean(w, std::vector<SpdMatrix>{p, p});
  CHECK((hm.mat() - p.mat()).norm() == doctest::Approx(0.0).epsilon(0).scale(1e-12));
}

TEST_CASE("degenerate weight picks one matrix; the other slot may be null") {
  std::mt19937_64 rng(8);
  const SpdMatrix p1 = random_spd(rng, 2);
  const VectorXd w = (VectorXd(2) << 1.0, 0.0).finished();
  const SpdMatrix hm = harmonic_mean(w, std::vector<const SpdMatrix*>{&p1, nullptr});
  CHECK((hm.mat() - p1.mat()).norm() < 1e-12);
}

TEST_CASE("scalar harmonic mean") {
  const SpdMatrix p1(2.0 * MatrixXd::Ones(1, 1)), p2(4.0 * MatrixXd::Ones(1, 1));
  const VectorXd w = (VectorXd(2) << 0.5, 0.5).finished();
  const double got = harmonic_mean(w, std::vector<SpdMatrix>{p1, p2}).mat()(0, 0);
  CHECK(got == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("harmonic mean rejects bad input") {
  std::mt19937_64 rng(9);
  const SpdMatrix p2 = random_spd(rng, 2);
  const SpdMatrix p3 = random_spd(rng, 3);
  const VectorXd w = (VectorXd(2) << 0.5, 0.5).finished();
  CHECK_THROWS_AS(harmonic_mean(w, std::vector<SpdMatrix>{p2, p3}), PreconditionError);
  CHECK_THROWS_AS(harmonic_mean(VectorXd::Zero(2), std::vector<SpdMatrix>{p2, p2}),
                  PreconditionError);
  CHECK_THROWS_AS(harmonic_mean((VectorXd(2) << -0.5, 1.5).finished(),
                                std::vector<SpdMatrix>{p2, p2}),
                  PreconditionError);
}

TEST_CASE("harmonic mean is below the arithmetic mean and monotone") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int count = 2 + static_cast<int>(rng() % 3);
    std::vector<SpdMatrix> mats;
    VectorXd w(count);
    for (int j = 0; j < count; ++j) {
      mats.push_back(random_spd(rng, n));
      w[j] = 0.1 + static_cast<double>(rng() % 1000) / 1000.0;
    }
    w /= w.sum();
    const SpdMatrix hm = harmonic_mean(w, mats);
    MatrixXd arith = MatrixXd::Zero(n, n);
    for (int j = 0; j < count; ++j) arith += w[j] * mats[static_cast<size_t>(j)].mat();
    CHECK(loewner_leq(hm.mat(), arith, 1e-10));

    // Grow every input and re-compare.
    std::vector<SpdMatrix> grown;
    for (int j = 0; j < count; ++j) {
      grown.emplace_back(mats[static_cast<size_t>(j)].mat() + random_psd(rng, n, 0.7));
    }
    CHECK(loewner_leq(hm.mat(), harmonic_mean(w, grown).mat(), 1e-10));
  }
}

TEST_CASE("primitivity examples") {
  CHECK_FALSE(is_primitive(NonnegativeMatrix(MatrixXd::Identity(3, 3))));
  CHECK(is_primitive(NonnegativeMatrix(MatrixXd::Constant(3, 3, 1.0 / 3.0))));
  MatrixXd perm(2, 2);
  perm << 0, 1, 1, 0;
  CHECK_FALSE(is_primitive(NonnegativeMatrix(perm)));
  CHECK(is_primitive(NonnegativeMatrix(MatrixXd::Ones(1, 1))));
}

TEST_CASE("primitivity agrees with brute-force powers on random 4x4 patterns") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution edge(0.35);
  for (int trial = 0; trial < 300; ++trial) {
    MatrixXd m(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = edge(rng) ? 1.0 : 0.0;

    bool brute = false;
    MatrixXd power = MatrixXd::Identity(4, 4);
    for (int k = 1; k <= 10 && !brute; ++k) {  // (4-1)^2 + 1 = 10
      power = power * m;
      brute = (power.array() > 0.0).all();
    }
    CHECK(is_primitive(NonnegativeMatrix(m)) == brute);

    const int expo = primitivity_exponent(NonnegativeMatrix(m));
    CHECK((expo > 0) == brute);
  }
}

TEST_CASE("perron vector examples") {
  MatrixXd doubly(3, 3);
  doubly << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  const VectorXd q1 = perron_left_vector(NonnegativeMatrix(doubly));
  CHECK((q1 - VectorXd::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-10);

  MatrixXd path(3, 3);
  path << 0.5, 0.5, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0.5, 0.5;
  const NonnegativeMatrix lm(path);
  const VectorXd q2 = perron_left_vector(lm);
  CHECK(q2(0) == doctest::Approx(2.0 / 7.0).epsilon(1e-9));
  CHECK(q2(1) == doctest::Approx(3.0 / 7.0).epsilon(1e-9));
  CHECK(q2(2) == doctest::Approx(2.0 / 7.0).epsilon(1e-9));
  CHECK(q2.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((q2.transpose() * lm.mat() - q2.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(perron_left_vector(NonnegativeMatrix(MatrixXd::Ones(1, 1)))(0) == 1.0);

  CHECK_THROWS_AS(perron_left_vector(NonnegativeMatrix(MatrixXd::Identity(2, 2))),
                  PreconditionError);
}

TEST_CASE("collective observability") {
  MatrixXd c10(1, 2);
  c10 << 1, 0;
  CHECK_FALSE(is_collectively_observable(MatrixXd::Identity(2, 2), {c10}));

  MatrixXd shear(2, 2);
  shear << 1, 1, 0, 1;
  CHECK(is_collectively_observable(shear, {c10}));

  CHECK(is_collectively_observable(MatrixXd::Identity(3, 3), {MatrixXd::Identity(3, 3)}));

  // Empty blocks contribute nothing but are accepted.
  CHECK(is_collectively_observable(shear, {MatrixXd::Zero(0, 2), c10}));
  CHECK_FALSE(is_collectively_observable(shear, {MatrixXd::Zero(0, 2)}));
}

TEST_CASE("spectral radius") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = -0.9;
  CHECK(spectral_radius(d) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(spectral_radius(MatrixXd::Zero(3, 3)) == 0.0);
  MatrixXd rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK(spectral_radius(rot) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral radius power-iteration branch matches the dense branch") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd m = test::random_matrix(rng, 12, 12, 0.4);
    const double dense = spectral_radius(m);
    const double power = spectral_radius(m, /*dense_cutoff=*/0, 1e-12);
    CHECK(power == doctest::Approx(dense).epsilon(1e-6));
  }
}

TEST_CASE("lyapunov solver base cases") {
  std::mt19937_64 rng(13);
  const SpdMatrix w = random_spd(rng, 3);
  const MatrixXd x = solve_dle(MatrixXd::Zero(3, 3), w.mat());
  CHECK((x - w.mat()).norm() < 1e-12);

  const MatrixXd f = 0.5 * MatrixXd::Ones(1, 1);
  CHECK(solve_dle(f, MatrixXd::Ones(1, 1))(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));

  CHECK_THROWS_AS(solve_dle(1.1 * MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1)), NumericalError);
}

TEST_CASE("lyapunov solver agrees with the vectorized oracle on small instances") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MatrixXd f = test::random_matrix(rng, n, n);
    f *= 0.9 / std::max(1.0, spectral_radius(f));
    const MatrixXd w = random_psd(rng, n) + 0.1 * MatrixXd::Identity(n, n);
    const MatrixXd x = solve_dle(f, w, 1e-12);
    const MatrixXd oracle = test::dle_kron_oracle(f, w);
    CHECK((x - oracle).norm() < 1e-8 * std::max(1.0, oracle.norm()));
    CHECK((x - x.transpose()).norm() < 1e-12);
    CHECK(min_eigenvalue(x) > -1e-10);
    const double resid = (x - f * x * f.transpose() - w).norm() / w.norm();
    CHECK(resid < 1e-10);
  }
}

TEST_SUITE_END();

#include <doctest.h>

#include <cmath>
#include <limits>

#include "bfcs/model.hpp"
#include "bfcs/rng.hpp"

using namespace bfcs;

TEST_CASE("sign_elementwise maps zero to -1") {
  Matrix z(1, 3);
  z << 0.5, 0.0, -2.0;
  Matrix s = sign_elementwise(z);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == -1.0);
  CHECK(s(0, 2) == -1.0);
}

TEST_CASE("sign_elementwise rejects non-finite input") {
  Matrix z(1, 1);
  z << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sign_elementwise(z), InvalidInput);
}

TEST_CASE("measure noiseless cases") {
  SUBCASE("identity") {
    Matrix a = Matrix::Identity(1, 1);
    Matrix x(1, 1);
    x << 3.0;
    CHECK(measure(a, x, {0.0}, 7)(0, 0) == 1.0);
  }
  SUBCASE("hand evaluation") {
    Matrix a(1, 2);
    a << 1.0, -1.0;
    Matrix x(2, 1);
    x << 1.0, 2.0;
    CHECK(measure(a, x, {0.0}, 7)(0, 0) == -1.0);
  }
  SUBCASE("zero signal gives all -1") {
    Matrix a = Matrix::Random(3, 2);
    Matrix x = Matrix::Zero(2, 4);
    CHECK((measure(a, x, {0.0}, 7).array() == -1.0).all());
  }
}

TEST_CASE("measure equals sign(AX) exactly when variance is zero") {
  auto eng = make_engine(11);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix a = gaussian_sensing_matrix(6, 4, 100 + rep);
    Matrix x = gaussian_sensing_matrix(4, 3, 200 + rep);
    CHECK(measure(a, x, {0.0}, rep) == sign_elementwise(a * x));
  }
}

TEST_CASE("measure dimension mismatch") {
  CHECK_THROWS_AS(measure(Matrix::Ones(2, 3), Matrix::Ones(2, 2), {0.0}, 0),
                  DimensionMismatch);
}

TEST_CASE("measure is deterministic given seed") {
  Matrix a = gaussian_sensing_matrix(5, 4, 1);
  Matrix x = gaussian_sensing_matrix(4, 3, 2);
  CHECK(measure(a, x, {0.5}, 42) == measure(a, x, {0.5}, 42));
}

TEST_CASE("group signal: empty spec gives the zero matrix") {
  GroupSignalSpec spec{4, 4, 0, 3, 10.0, 1};
  CHECK(generate_group_signal(spec).isZero(0.0));
}

TEST_CASE("group signal: single group") {
  GroupSignalSpec spec{20, 5, 1, 9, 10.0, 3};
  Signal2D x = generate_group_signal(spec);
  CHECK((x.array() != 0.0).count() == 9);
  CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("group signal: reference configuration has 90 nonzeros") {
  GroupSignalSpec spec{400, 100, 10, 9, 10.0, 5};
  Signal2D x = generate_group_signal(spec);
  CHECK((x.array() != 0.0).count() == 90);
  CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("group signal: bit-reproducible and horizontal orientation") {
  GroupSignalSpec spec{15, 30, 4, 6, 2.0, 9, GroupOrientation::Horizontal};
  Signal2D a = generate_group_signal(spec);
  Signal2D b = generate_group_signal(spec);
  CHECK(a == b);
  CHECK((a.array() != 0.0).count() == 24);
  // Each run is contiguous within a row for the horizontal orientation.
  for (int i = 0; i < 15; ++i) {
    int transitions = 0;
    bool inside = false;
    for (int j = 0; j < 30; ++j) {
      const bool nz = a(i, j) != 0.0;
      if (nz && !inside) ++transitions;
      inside = nz;
    }
    CHECK(transitions <= 4);
  }
}

TEST_CASE("group signal: infeasible placement errors") {
  GroupSignalSpec spec{4, 1, 2, 2, 1.0, 1};  // two runs cannot fit with a gap
  CHECK_THROWS_AS(generate_group_signal(spec), InvalidInput);
}

TEST_CASE("gaussian sensing matrix") {
  CHECK(gaussian_sensing_matrix(1, 1, 77) == gaussian_sensing_matrix(1, 1, 77));
  Matrix a = gaussian_sensing_matrix(200, 400, 3);
  CHECK(a.rows() == 200);
  CHECK(a.cols() == 400);
  Matrix big = gaussian_sensing_matrix(1000, 1000, 8);
  CHECK(std::abs(big.mean()) < 5.0 / std::sqrt(1e6));
}

TEST_CASE("snr_db") {
  Matrix x = gaussian_sensing_matrix(4, 3, 21);
  x /= x.norm();
  CHECK(std::isinf(snr_db(x, x)));
  CHECK(snr_db(x, x) > 0);
  CHECK(snr_db(x, -x) == doctest::Approx(20.0 * std::log10(0.5)).epsilon(1e-12));
  CHECK(snr_db(x, Matrix::Zero(4, 3)) ==
        -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(snr_db(x, Matrix::Zero(2, 2)), DimensionMismatch);
}

TEST_CASE("snr_db decreases with error") {
  Matrix x = gaussian_sensing_matrix(5, 5, 31);
  x /= x.norm();
  Matrix d = gaussian_sensing_matrix(5, 5, 32);
  d /= d.norm();
  double previous = std::numeric_limits<double>::infinity();
  for (double t : {1e-3, 1e-2, 1e-1, 0.5}) {
    const double snr = snr_db(x, x + t * d);
    CHECK(snr < previous);
    previous = snr;
  }
}

TEST_CASE("sign consistency error") {
  Matrix a = gaussian_sensing_matrix(6, 4, 41);
  Matrix x = gaussian_sensing_matrix(4, 3, 42);
  Matrix y = measure(a, x, {0.0}, 0);
  CHECK(sign_consistency_error(y, a, x) == 0.0);
  CHECK(sign_consistency_error(y, a, -x) == 1.0);
}

TEST_CASE("sign consistency error of random estimates is near one half") {
  Matrix a = gaussian_sensing_matrix(100, 40, 51);
  Matrix x = gaussian_sensing_matrix(40, 100, 52);
  Matrix y = measure(a, gaussian_sensing_matrix(40, 100, 53), {0.0}, 0);
  const double err = sign_consistency_error(y, a, x);
  CHECK(err > 0.45);
  CHECK(err < 0.55);
}

TEST_CASE("support f1") {
  Matrix ref = Matrix::Zero(2, 2);
  Matrix est = Matrix::Zero(2, 2);
  CHECK(support_f1(ref, est) == 1.0);  // both supports empty
  ref(0, 0) = 1.0;
  est(1, 1) = 1.0;
  CHECK(support_f1(ref, est) == 0.0);  // disjoint
  ref(0, 1) = 1.0;  // ref {a,b}
  est(0, 1) = 1.0;  // est {b,c}
  CHECK(support_f1(ref, est) == 0.5);
  CHECK(support_f1(ref, ref) == 1.0);
}

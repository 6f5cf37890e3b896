#include <doctest.h>

#include <cmath>

#include "bhvmc/errors.hpp"
#include "bhvmc/linalg.hpp"
#include "bhvmc/rng.hpp"

using namespace bhvmc;

namespace {

Matrix random_spd(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform() - 0.5;
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = (i == j) ? 0.5 : 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      s(i, j) = acc;
    }
  return s;
}

}  // namespace

TEST_CASE("cholesky solves SPD systems") {
  Rng rng(1, 0);
  const auto s = random_spd(12, rng);
  std::vector<double> b(12), x(12);
  for (auto& v : b) v = rng.uniform();
  const double res = cholesky_solve(s, b, x);
  CHECK(res < 1e-10);

  SUBCASE("indefinite matrix is rejected") {
    Matrix bad(2, 2);
    bad(0, 0) = 1.0;
    bad(1, 1) = -1.0;
    std::vector<double> rhs{1.0, 1.0}, sol(2);
    CHECK_THROWS_AS(cholesky_solve(bad, rhs, sol), SolverError);
  }
}

TEST_CASE("conjugate gradient agrees with cholesky") {
  Rng rng(2, 0);
  const auto s = random_spd(20, rng);
  std::vector<double> b(20), x_cg(20), x_ch(20);
  for (auto& v : b) v = rng.uniform() - 0.5;
  cholesky_solve(s, b, x_ch);
  const auto info = cg_solve(
      [&](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < 20; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < 20; ++j) acc += s(i, j) * in[j];
          out[i] = acc;
        }
      },
      b, x_cg, 1e-12, 500);
  CHECK(info.converged);
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(x_cg[i] == doctest::Approx(x_ch[i]).epsilon(1e-8));
}

TEST_CASE("symmetric eigensolver") {
  SUBCASE("known 2x2") {
    Matrix a(2, 2);
    a(0, 0) = 0.0;
    a(0, 1) = a(1, 0) = -1.0;
    a(1, 1) = 0.0;
    const auto ed = symmetric_eigen(a);
    CHECK(ed.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ed.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("residuals and orthogonality on random matrices") {
    Rng rng(3, 0);
    for (std::size_t n : {5, 23, 60}) {
      Matrix a(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform() - 0.5;
      const auto ed = symmetric_eigen(a);
      for (std::size_t k = 0; k + 1 < n; ++k) CHECK(ed.values[k] <= ed.values[k + 1]);
      for (std::size_t k = 0; k < n; ++k) {
        double res = 0.0, norm = 0.0, ortho = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double av = 0.0;
          for (std::size_t j = 0; j < n; ++j) av += a(i, j) * ed.vectors(j, k);
          const double r = av - ed.values[k] * ed.vectors(i, k);
          res += r * r;
          norm += ed.vectors(i, k) * ed.vectors(i, k);
          if (k > 0) ortho += ed.vectors(i, k) * ed.vectors(i, k - 1);
        }
        CHECK(std::sqrt(res) < 1e-10);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
        if (k > 0) CHECK(std::fabs(ortho) < 1e-9);
      }
    }
  }
}

TEST_CASE("lanczos finds the lowest eigenpair") {
  Rng rng(4, 0);
  const std::size_t n = 200;
  // sparse-ish symmetric operator: tridiagonal plus a few long-range couplings
  std::vector<double> diag(n), off(n - 1);
  for (auto& d : diag) d = 2.0 * rng.uniform();
  for (auto& o : off) o = rng.uniform() - 0.5;
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = diag[i] * x[i];
      if (i > 0) acc += off[i - 1] * x[i - 1];
      if (i + 1 < n) acc += off[i] * x[i + 1];
      y[i] = acc;
    }
  };
  const auto lz = lanczos_ground_state(n, apply, 1e-11);
  CHECK(lz.converged);

  Matrix dense(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    dense(i, i) = diag[i];
    if (i + 1 < n) dense(i, i + 1) = dense(i + 1, i) = off[i];
  }
  const auto ed = symmetric_eigen(dense);
  CHECK(lz.eigenvalue == doctest::Approx(ed.values[0]).epsilon(1e-10));
}

TEST_CASE("sparse matvec") {
  SparseSym s;
  s.dim = 2;
  s.row_ptr = {0, 2, 3};
  s.col = {0, 1, 1};
  s.val = {2.0, 1.0, 3.0};
  std::vector<double> x{1.0, 2.0}, y(2);
  s.multiply(x, y);
  CHECK(y[0] == doctest::Approx(4.0));
  CHECK(y[1] == doctest::Approx(6.0));
}

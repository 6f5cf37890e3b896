#include "bhvmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bhvmc/errors.hpp"
#include "bhvmc/rng.hpp"

namespace bhvmc {

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double cholesky_solve(Matrix a, std::span<const double> b, std::span<double> x) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n || x.size() != n)
    throw SolverError("cholesky_solve: shape mismatch");
  Matrix orig = a;

  // a <- L (lower triangle)
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0 || !std::isfinite(d))
      throw SolverError("cholesky_solve: matrix not positive definite");
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  // forward: L y = b
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * y[k];
    y[i] = s / a(i, i);
  }
  // backward: L^T x = y
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * x[k];
    x[ii] = s / a(ii, ii);
  }
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = -b[i];
    for (std::size_t j = 0; j < n; ++j) r += orig(i, j) * x[j];
    res = std::max(res, std::fabs(r));
  }
  return res;
}

CgResult cg_solve(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                  std::span<const double> b, std::span<double> x, double tol,
                  int max_iter) {
  const std::size_t n = b.size();
  CgResult out;
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  std::vector<double> ap(n);

  const double bnorm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  for (int it = 0; it < max_iter; ++it) {
    apply(p, ap);
    const double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    if (pap <= 0.0) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    out.iterations = it + 1;
    out.residual = std::sqrt(rr_new) / bnorm;
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return out;
}

namespace {

// Householder reduction of a real symmetric matrix to tridiagonal form,
// with accumulation of the orthogonal transform in `a`.
void tred2(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);

  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
        for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

double pythag(double a, double b) {
  const double absa = std::fabs(a), absb = std::fabs(b);
  if (absa > absb) {
    const double r = absb / absa;
    return absa * std::sqrt(1.0 + r * r);
  }
  if (absb == 0.0) return 0.0;
  const double r = absa / absb;
  return absb * std::sqrt(1.0 + r * r);
}

// Implicit-shift QL on a tridiagonal matrix, updating eigenvectors in z.
void tqli(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (++iter == 60) throw SolverError("tqli: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = pythag(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = pythag(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && m - l > 1) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

EigenDecomposition symmetric_eigen(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw SolverError("symmetric_eigen: not square");
  EigenDecomposition out;
  if (n == 1) {
    out.values = {a(0, 0)};
    out.vectors = Matrix(1, 1, 1.0);
    return out;
  }
  Matrix z = a;
  std::vector<double> d, e;
  tred2(z, d, e);
  tqli(d, e, z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return d[i] < d[j];
  });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = z(i, order[k]);
  }
  return out;
}

void SparseSym::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < dim; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      s += val[k] * x[col[k]];
    y[i] = s;
  }
}

LanczosResult lanczos_ground_state(
    std::size_t dim,
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    double tol, int max_basis, int max_restarts, std::uint64_t seed) {
  LanczosResult out;
  out.eigenvector.assign(dim, 0.0);
  if (dim == 0) return out;
  if (dim == 1) {
    std::vector<double> e1{1.0}, y(1);
    apply(e1, y);
    out.eigenvalue = y[0];
    out.eigenvector = {1.0};
    out.converged = true;
    return out;
  }

  Rng rng(seed, 0);
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.uniform() - 0.5;

  const int m_max = std::min<std::size_t>(max_basis, dim);
  std::vector<std::vector<double>> basis;
  std::vector<double> w(dim), alpha, beta;

  auto normalize = [](std::vector<double>& u) {
    double s = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    if (s > 0.0)
      for (auto& x : u) x /= s;
    return s;
  };

  for (int restart = 0; restart <= max_restarts; ++restart) {
    basis.clear();
    alpha.clear();
    beta.clear();
    normalize(v);
    basis.push_back(v);

    for (int k = 0; k < m_max; ++k) {
      apply(basis[k], w);
      const double a = std::inner_product(w.begin(), w.end(), basis[k].begin(), 0.0);
      alpha.push_back(a);
      for (std::size_t i = 0; i < dim; ++i) w[i] -= a * basis[k][i];
      if (k > 0)
        for (std::size_t i = 0; i < dim; ++i) w[i] -= beta[k - 1] * basis[k - 1][i];
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) {
          const double c = std::inner_product(w.begin(), w.end(), u.begin(), 0.0);
          for (std::size_t i = 0; i < dim; ++i) w[i] -= c * u[i];
        }
      }
      const double b = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
      if (b < 1e-14 || k == m_max - 1 || basis.size() == dim) {
        break;
      }
      beta.push_back(b);
      std::vector<double> next(dim);
      for (std::size_t i = 0; i < dim; ++i) next[i] = w[i] / b;
      basis.push_back(std::move(next));
      out.iterations++;
    }

    // Eigen decomposition of the tridiagonal Rayleigh matrix.
    const std::size_t m = alpha.size();
    Matrix t(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    const auto ed = symmetric_eigen(t);
    out.eigenvalue = ed.values[0];
    std::fill(out.eigenvector.begin(), out.eigenvector.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double c = ed.vectors(k, 0);
      for (std::size_t i = 0; i < dim; ++i) out.eigenvector[i] += c * basis[k][i];
    }
    normalize(out.eigenvector);
    apply(out.eigenvector, w);
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = w[i] - out.eigenvalue * out.eigenvector[i];
      res += r * r;
    }
    out.residual = std::sqrt(res);
    if (out.residual < tol * std::max(1.0, std::fabs(out.eigenvalue))) {
      out.converged = true;
      return out;
    }
    v = out.eigenvector;  // restart from the current Ritz vector
  }
  return out;
}

}  // namespace bhvmc

#ifndef BHVMC_LINALG_HPP
#define BHVMC_LINALG_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bhvmc {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Solves (A) x = b for symmetric positive-definite A by in-place Cholesky.
// Returns the residual max-norm |A x - b|_inf. Throws SolverError if a pivot
// is not positive.
double cholesky_solve(Matrix a, std::span<const double> b, std::span<double> x);

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  // |A x - b|_2 / |b|_2
  bool converged = false;
};

// Conjugate gradient for symmetric positive semi-definite systems.
CgResult cg_solve(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                  std::span<const double> b, std::span<double> x, double tol,
                  int max_iter);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k is the eigenvector of values[k]
};

// Full eigendecomposition of a symmetric matrix (Householder tridiagonal
// reduction followed by implicit-shift QL).
EigenDecomposition symmetric_eigen(const Matrix& a);

// Sparse symmetric matrix in CSR form (both triangles stored).
struct SparseSym {
  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
};

struct LanczosResult {
  double eigenvalue = 0.0;
  std::vector<double> eigenvector;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Lowest eigenpair of a symmetric operator using Lanczos with full
// reorthogonalization and restarts.
LanczosResult lanczos_ground_state(
    std::size_t dim,
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    double tol = 1e-10, int max_basis = 250, int max_restarts = 8,
    std::uint64_t seed = 7);

}  // namespace bhvmc

#endif

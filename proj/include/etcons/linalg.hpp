#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace etcons {

using Vector = std::vector<double>;

// Small dense row-major matrix. Sizes here are tiny (state dimension, agent
// count), so storage is a flat std::vector and every operation is a plain loop.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  std::vector<Vector> to_rows() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double squared_norm(std::span<const double> a);
// xᵀ A y
double bilinear(std::span<const double> x, const Matrix& a, std::span<const double> y);
double quadratic_form(std::span<const double> x, const Matrix& a);

void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector subtract(std::span<const double> a, std::span<const double> b);

bool is_symmetric(const Matrix& a, double tol = 0.0);
bool all_finite(std::span<const double> v);

struct JacobiOptions {
  int max_sweeps = 100;
  double tolerance = 1e-15;  // relative off-diagonal Frobenius norm
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotation sweeps, sorted
// ascending. The rotation order is fixed so results are reproducible bit-for-bit.
// Throws NumericsError when the input is not symmetric or not finite.
Vector symmetric_eigenvalues(const Matrix& a, JacobiOptions options = {});

double lambda_min(const Matrix& symmetric);
double lambda_max(const Matrix& symmetric);

// Largest singular value, via the eigenvalues of AᵀA.
double spectral_norm(const Matrix& a);

}  // namespace etcons

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rislab {

using cdouble = std::complex<double>;

/// Thrown when operand dimensions do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an argument lies outside the operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using CVector = std::vector<cdouble>;

/// Dense complex matrix, row-major storage.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::initializer_list<std::initializer_list<cdouble>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  cdouble& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cdouble> data() { return data_; }
  std::span<const cdouble> data() const { return data_; }

  std::span<const cdouble> row(std::size_t r) const {
    return std::span<const cdouble>(data_).subspan(r * cols_, cols_);
  }

  CMatrix& operator*=(cdouble s);
  bool all_finite() const;

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> data_;
};

CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cdouble s, const CMatrix& m);

/// Standard complex product a·b.
CMatrix matmul(const CMatrix& a, const CMatrix& b);

/// Diag(v)·m without materialising the diagonal matrix.
CMatrix diag_times(std::span<const cdouble> v, const CMatrix& m);

/// vᵀ·m with a plain transpose (no conjugation).
CVector row_vec_mat(std::span<const cdouble> v, const CMatrix& m);

double sq_norm(std::span<const cdouble> v);

/// Σ|m_ij|², i.e. tr(m·mᴴ).
double trace_gram(const CMatrix& m);

}  // namespace rislab

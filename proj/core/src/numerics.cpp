#include "rislab/numerics.hpp"

#include <cmath>
#include <string>

namespace rislab {

namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cdouble{0.0, 0.0}) {}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cdouble>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("CMatrix: ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix& CMatrix::operator*=(cdouble s) {
  for (auto& x : data_) x *= s;
  return *this;
}

bool CMatrix::all_finite() const {
  for (const auto& x : data_) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  }
  return true;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("add: " + dims(a.rows(), a.cols()) + " vs " + dims(b.rows(), b.cols()));
  }
  CMatrix out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

CMatrix operator*(cdouble s, const CMatrix& m) {
  CMatrix out = m;
  out *= s;
  return out;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + dims(a.rows(), a.cols()) + " x " + dims(b.rows(), b.cols()));
  }
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const cdouble aip = a(i, p);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aip * b(p, j);
    }
  }
  return out;
}

CMatrix diag_times(std::span<const cdouble> v, const CMatrix& m) {
  if (v.size() != m.rows()) {
    throw ShapeError("diag_times: vector length " + std::to_string(v.size()) + " vs " +
                     dims(m.rows(), m.cols()));
  }
  CMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) *= v[i];
  }
  return out;
}

CVector row_vec_mat(std::span<const cdouble> v, const CMatrix& m) {
  if (v.size() != m.rows()) {
    throw ShapeError("row_vec_mat: vector length " + std::to_string(v.size()) + " vs " +
                     dims(m.rows(), m.cols()));
  }
  CVector out(m.cols(), cdouble{0.0, 0.0});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  }
  return out;
}

double sq_norm(std::span<const cdouble> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

double trace_gram(const CMatrix& m) { return sq_norm(m.data()); }

}  // namespace rislab

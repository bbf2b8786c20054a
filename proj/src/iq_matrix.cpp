#include "fhqr/iq_matrix.hpp"

#include <cmath>
#include <string>

#include "fhqr/error.hpp"

namespace fhqr {

namespace {

void require_shape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InvalidInput("IQMatrix dimensions must be at least 1x1, got " + std::to_string(rows) +
                       "x" + std::to_string(cols));
  }
}

void require_same_shape(const IQMatrix& a, const IQMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput(std::string(op) + ": dimension mismatch");
  }
}

}  // namespace

IQMatrix::IQMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  require_shape(rows, cols);
}

IQMatrix::IQMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_shape(rows, cols);
  if (data_.size() != rows * cols) {
    throw InvalidInput("IQMatrix data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

IQMatrix IQMatrix::identity(std::size_t n) {
  IQMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<cplx> IQMatrix::column(std::size_t c) const {
  std::vector<cplx> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void IQMatrix::set_column(std::size_t c, std::span<const cplx> values) {
  if (values.size() != rows_) throw InvalidInput("set_column: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

bool IQMatrix::all_finite() const noexcept {
  for (const auto& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double IQMatrix::frobenius_norm() const noexcept {
  double acc = 0.0;
  for (const auto& v : data_) acc += std::norm(v);
  return std::sqrt(acc);
}

IQMatrix matmul(const IQMatrix& a, const IQMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("matmul: inner dimension mismatch");
  IQMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

IQMatrix adjoint(const IQMatrix& a) {
  IQMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

IQMatrix operator-(const IQMatrix& a, const IQMatrix& b) {
  require_same_shape(a, b, "subtract");
  IQMatrix out = a;
  auto d = out.data();
  auto s = b.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s[i];
  return out;
}

IQMatrix operator+(const IQMatrix& a, const IQMatrix& b) {
  require_same_shape(a, b, "add");
  IQMatrix out = a;
  auto d = out.data();
  auto s = b.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
  return out;
}

}  // namespace fhqr

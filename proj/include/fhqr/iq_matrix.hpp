#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fhqr {

using cplx = std::complex<double>;

/// Dense row-major matrix of complex baseband samples.
///
/// Rows index time samples or subcarriers, columns index antennas. A
/// default-constructed matrix is empty (0x0); every other constructor
/// requires at least one row and one column.
class IQMatrix {
 public:
  IQMatrix() = default;
  IQMatrix(std::size_t rows, std::size_t cols);
  IQMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

  static IQMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<cplx> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const cplx> values);

  bool all_finite() const noexcept;
  double frobenius_norm() const noexcept;

  friend bool operator==(const IQMatrix&, const IQMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

IQMatrix matmul(const IQMatrix& a, const IQMatrix& b);
IQMatrix adjoint(const IQMatrix& a);
IQMatrix operator-(const IQMatrix& a, const IQMatrix& b);
IQMatrix operator+(const IQMatrix& a, const IQMatrix& b);

}  // namespace fhqr

#include "fhqr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fhqr/error.hpp"

namespace fhqr {

namespace {

constexpr double kDeficiencyThreshold = 1e-14;

using Column = std::vector<cplx>;

cplx dot(const Column& x, const Column& y) {  // x^H y
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double norm2(const Column& x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return std::sqrt(acc);
}

// Two modified Gram-Schmidt passes against the accepted basis.
void orthogonalize(Column& v, const std::vector<Column>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const cplx c = dot(q, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
}

Column synthetic_basis_vector(std::size_t rows, const std::vector<Column>& basis) {
  // Residual energy of e_t outside span(basis) is 1 - sum_j |q_j[t]|^2.
  std::size_t best = 0;
  double best_energy = -1.0;
  for (std::size_t t = 0; t < rows; ++t) {
    double inside = 0.0;
    for (const auto& q : basis) inside += std::norm(q[t]);
    if (1.0 - inside > best_energy) {
      best_energy = 1.0 - inside;
      best = t;
    }
  }
  Column e(rows);
  e[best] = 1.0;
  orthogonalize(e, basis);
  const double n = norm2(e);
  for (auto& x : e) x /= n;
  return e;
}

void require_finite(const IQMatrix& a, const char* op) {
  if (a.empty()) throw InvalidInput(std::string(op) + ": empty matrix");
  if (!a.all_finite()) throw InvalidInput(std::string(op) + ": non-finite input");
}

}  // namespace

std::vector<double> column_norms(const IQMatrix& a) {
  require_finite(a, "column_norms");
  std::vector<double> sq(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) sq[j] += std::norm(row[j]);
  }
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

QrFactors pivoted_qr_approx(const IQMatrix& a, std::size_t l, const QrOptions& options) {
  require_finite(a, "pivoted_qr_approx");
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (l < 1 || l > std::min(rows, cols)) {
    throw InvalidInput("pivoted_qr_approx: rank " + std::to_string(l) + " outside [1, " +
                       std::to_string(std::min(rows, cols)) + "]");
  }

  const std::vector<double> norms = column_norms(a);
  const double largest = *std::max_element(norms.begin(), norms.end());
  const double floor = kDeficiencyThreshold * largest;

  std::vector<Column> columns(cols);
  for (std::size_t c = 0; c < cols; ++c) columns[c] = a.column(c);

  QrFactors f;
  f.l_u = l;
  std::vector<std::size_t> selected;
  std::vector<Column> basis;
  selected.reserve(l);
  basis.reserve(l);

  auto accept = [&](std::size_t step, std::size_t col, Column v) {
    const double n = norm2(v);
    if (!(n > floor)) {
      if (options.deficiency == DeficiencyPolicy::kThrow) {
        throw RankDeficient(step, n,
                            "pivoted_qr_approx: pivot column " + std::to_string(col) +
                                " at step " + std::to_string(step) +
                                " is numerically dependent; rank " + std::to_string(l) +
                                " exceeds the numerical rank");
      }
      f.completed_steps.push_back(step);
      v = synthetic_basis_vector(rows, basis);
    } else {
      for (auto& x : v) x /= n;
    }
    basis.push_back(std::move(v));
    selected.push_back(col);
  };

  if (options.pivot == PivotRule::kOriginalNorm) {
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });
    for (std::size_t step = 0; step < l; ++step) {
      Column v = columns[order[step]];
      orthogonalize(v, basis);
      accept(step, order[step], std::move(v));
    }
  } else {
    std::vector<Column> residual = columns;
    std::vector<bool> taken(cols, false);
    for (std::size_t step = 0; step < l; ++step) {
      std::size_t best = cols;
      double best_norm = -1.0;
      for (std::size_t c = 0; c < cols; ++c) {
        if (taken[c]) continue;
        const double n = norm2(residual[c]);
        if (n > best_norm) {
          best_norm = n;
          best = c;
        }
      }
      taken[best] = true;
      Column v = residual[best];
      orthogonalize(v, basis);
      accept(step, best, std::move(v));
      const Column& q = basis.back();
      for (std::size_t c = 0; c < cols; ++c) {
        if (taken[c]) continue;
        const cplx proj = dot(q, residual[c]);
        for (std::size_t i = 0; i < rows; ++i) residual[c][i] -= proj * q[i];
      }
    }
  }

  f.perm = selected;
  std::vector<bool> in_basis(cols, false);
  for (auto c : selected) in_basis[c] = true;
  for (std::size_t c = 0; c < cols; ++c) {
    if (!in_basis[c]) f.perm.push_back(c);
  }

  f.q = IQMatrix(rows, l);
  for (std::size_t j = 0; j < l; ++j) f.q.set_column(j, basis[j]);

  // Coefficients of every original column on the basis, accumulated row by
  // row of A (contiguous in memory), then permuted.
  IQMatrix coeff(l, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    auto a_row = a.row(i);
    for (std::size_t j = 0; j < l; ++j) {
      const cplx cq = std::conj(f.q(i, j));
      auto c_row = coeff.row(j);
      for (std::size_t c = 0; c < cols; ++c) c_row[c] += cq * a_row[c];
    }
  }
  f.r = IQMatrix(l, cols);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t c = 0; c < cols; ++c) f.r(j, c) = coeff(j, f.perm[c]);
  }
  return f;
}

IQMatrix qr_reconstruct(const QrFactors& f) {
  const std::size_t l = f.q.cols();
  const std::size_t cols = f.r.cols();
  if (f.q.empty() || f.r.empty() || f.r.rows() != l || f.perm.size() != cols) {
    throw InvalidInput("qr_reconstruct: inconsistent factor dimensions");
  }
  std::vector<bool> seen(cols, false);
  for (auto p : f.perm) {
    if (p >= cols || seen[p]) throw InvalidInput("qr_reconstruct: perm is not a permutation");
    seen[p] = true;
  }
  IQMatrix out(f.q.rows(), cols);
  for (std::size_t i = 0; i < f.q.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t j = 0; j < l; ++j) {
      const cplx qij = f.q(i, j);
      auto r_row = f.r.row(j);
      for (std::size_t c = 0; c < cols; ++c) out_row[f.perm[c]] += qij * r_row[c];
    }
  }
  return out;
}

double frobenius_error(const IQMatrix& a, const IQMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("frobenius_error: dimension mismatch");
  }
  double diff = 0.0;
  double ref = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff += std::norm(x[i] - y[i]);
    ref += std::norm(x[i]);
  }
  return ref == 0.0 ? std::sqrt(diff) : std::sqrt(diff / ref);
}

}  // namespace fhqr

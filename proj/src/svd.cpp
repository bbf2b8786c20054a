#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fhqr/error.hpp"
#include "fhqr/linalg.hpp"

namespace fhqr {

namespace {

// Column-major scratch matrix; the Jacobi sweeps touch whole columns.
struct ColMajor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> data;

  ColMajor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  cplx* col(std::size_t j) { return data.data() + j * rows; }
  const cplx* col(std::size_t j) const { return data.data() + j * rows; }
  cplx& at(std::size_t i, std::size_t j) { return data[j * rows + i]; }
};

cplx dot(const cplx* x, const cplx* y, std::size_t n) {
  cplx acc{};
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double sq_norm(const cplx* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(x[i]);
  return acc;
}

struct Householder {
  ColMajor r;                        // n x n upper triangular
  std::vector<std::vector<cplx>> v;  // reflector k acts on rows k..m-1
};

// A = H_0 H_1 ... H_{n-1} [R; 0] with H_k = I - 2 v_k v_k^H.
Householder householder_qr(ColMajor a) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  Householder out{ColMajor(n, n), std::vector<std::vector<cplx>>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    cplx* x = a.col(k) + k;
    const std::size_t len = m - k;
    const double xnorm = std::sqrt(sq_norm(x, len));
    std::vector<cplx> v(len);
    if (xnorm > 0.0) {
      const cplx phase = std::abs(x[0]) > 0.0 ? x[0] / std::abs(x[0]) : cplx{1.0, 0.0};
      const cplx alpha = -phase * xnorm;
      std::copy(x, x + len, v.begin());
      v[0] -= alpha;
      const double vnorm = std::sqrt(sq_norm(v.data(), len));
      if (vnorm > 0.0) {
        for (auto& e : v) e /= vnorm;
        for (std::size_t j = k; j < n; ++j) {
          cplx* col = a.col(j) + k;
          const cplx s = 2.0 * dot(v.data(), col, len);
          for (std::size_t i = 0; i < len; ++i) col[i] -= s * v[i];
        }
      } else {
        std::fill(v.begin(), v.end(), cplx{});
      }
    }
    out.v[k] = std::move(v);
    for (std::size_t i = 0; i <= k; ++i) out.r.at(i, k) = a.at(i, k);
  }
  return out;
}

// Extend columns [0, filled) of `u` (orthonormal) into columns [filled, target).
void complete_orthonormal(ColMajor& u, std::size_t filled, std::size_t target) {
  const std::size_t m = u.rows;
  std::size_t e = 0;
  for (std::size_t j = filled; j < target; ++j) {
    for (; e < m; ++e) {
      cplx* c = u.col(j);
      std::fill(c, c + m, cplx{});
      c[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < j; ++p) {
          const cplx proj = dot(u.col(p), c, m);
          const cplx* q = u.col(p);
          for (std::size_t i = 0; i < m; ++i) c[i] -= proj * q[i];
        }
      }
      const double n = std::sqrt(sq_norm(c, m));
      if (n > 0.5) {
        for (std::size_t i = 0; i < m; ++i) c[i] /= n;
        ++e;
        break;
      }
    }
  }
}

SvdFactors tall_svd(const IQMatrix& a, std::size_t k, const SvdOptions& options) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  ColMajor work(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) work.at(i, j) = a(i, j);
  }
  Householder hh = householder_qr(std::move(work));

  ColMajor w = std::move(hh.r);
  ColMajor v(n, n);
  for (std::size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

  const double tol = options.tolerance > 0.0
                        ? options.tolerance
                        : static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  std::vector<double> norms(n);
  bool converged = false;
  double worst = 0.0;
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    for (std::size_t j = 0; j < n; ++j) norms[j] = sq_norm(w.col(j), n);
    converged = true;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norms[p];
        const double beta = norms[q];
        if (alpha == 0.0 || beta == 0.0) continue;
        const cplx gamma = dot(w.col(p), w.col(q), n);
        const double g = std::abs(gamma);
        const double ratio = g / std::sqrt(alpha * beta);
        worst = std::max(worst, ratio);
        if (ratio <= tol) continue;
        converged = false;

        // Rotate column q by the phase of gamma so the pair is real, then apply
        // the real Jacobi rotation that zeroes the inner product.
        const cplx phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        auto rotate = [&](cplx* xp, cplx* xq, std::size_t len) {
          for (std::size_t i = 0; i < len; ++i) {
            const cplx a_p = xp[i];
            const cplx a_q = xq[i] * phase;
            xp[i] = c * a_p - s * a_q;
            xq[i] = s * a_p + c * a_q;
          }
        };
        rotate(w.col(p), w.col(q), n);
        rotate(v.col(p), v.col(q), n);
        norms[p] = alpha - t * g;
        norms[q] = beta + t * g;
      }
    }
  }
  if (!converged) {
    throw ConvergenceError(worst, "truncated_svd: no convergence after " +
                                      std::to_string(options.max_sweeps) +
                                      " sweeps, worst off-diagonal ratio " + std::to_string(worst));
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(sq_norm(w.col(j), n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = sigma[order[0]];
  const double floor = smax * 1e-14;
  ColMajor ur(n, k);
  std::size_t filled = 0;
  for (; filled < k; ++filled) {
    const std::size_t j = order[filled];
    if (!(sigma[j] > floor)) break;
    const cplx* src = w.col(j);
    cplx* dst = ur.col(filled);
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] / sigma[j];
  }
  complete_orthonormal(ur, filled, k);

  // U = H_0 ... H_{n-1} [Ur; 0]
  ColMajor u(m, k);
  for (std::size_t j = 0; j < k; ++j) std::copy(ur.col(j), ur.col(j) + n, u.col(j));
  for (std::size_t kk = n; kk-- > 0;) {
    const auto& hv = hh.v[kk];
    const std::size_t len = m - kk;
    for (std::size_t j = 0; j < k; ++j) {
      cplx* col = u.col(j) + kk;
      const cplx s = 2.0 * dot(hv.data(), col, len);
      if (s == cplx{}) continue;
      for (std::size_t i = 0; i < len; ++i) col[i] -= s * hv[i];
    }
  }

  SvdFactors f;
  f.k = k;
  f.u = IQMatrix(m, k);
  f.v = IQMatrix(n, k);
  f.s.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    f.s[j] = j < filled ? sigma[order[j]] : 0.0;
    for (std::size_t i = 0; i < m; ++i) f.u(i, j) = u.at(i, j);
    for (std::size_t i = 0; i < n; ++i) f.v(i, j) = v.at(i, order[j]);
  }
  return f;
}

}  // namespace

SvdFactors truncated_svd(const IQMatrix& a, std::size_t k, const SvdOptions& options) {
  if (a.empty() || !a.all_finite()) throw InvalidInput("truncated_svd: empty or non-finite input");
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw InvalidInput("truncated_svd: rank " + std::to_string(k) + " outside [1, " +
                       std::to_string(std::min(a.rows(), a.cols())) + "]");
  }
  if (a.rows() >= a.cols()) return tall_svd(a, k, options);
  // A^H = V S U^H
  SvdFactors t = tall_svd(adjoint(a), k, options);
  std::swap(t.u, t.v);
  return t;
}

IQMatrix svd_reconstruct(const SvdFactors& f) {
  if (f.u.empty() || f.v.empty() || f.u.cols() != f.k || f.v.cols() != f.k || f.s.size() != f.k) {
    throw InvalidInput("svd_reconstruct: inconsistent factor dimensions");
  }
  IQMatrix us = f.u;
  for (std::size_t i = 0; i < us.rows(); ++i) {
    for (std::size_t j = 0; j < f.k; ++j) us(i, j) *= f.s[j];
  }
  return matmul(us, adjoint(f.v));
}

}  // namespace fhqr

#pragma once

#include <cstddef>
#include <vector>

#include "fhqr/iq_matrix.hpp"

namespace fhqr {

/// Euclidean norm of every column. Throws InvalidInput on non-finite data.
std::vector<double> column_norms(const IQMatrix& a);

enum class PivotRule {
  /// Rank columns once by their original norms and keep the top `l`.
  kOriginalNorm,
  /// Classic rank-revealing order: re-pick the largest residual norm after
  /// each orthogonalization step. Kept for experiments.
  kResidualNorm,
};

enum class DeficiencyPolicy {
  kThrow,
  /// Replace a numerically dependent pivot with the standard basis vector
  /// that has the largest component outside the current basis.
  kComplete,
};

struct QrOptions {
  PivotRule pivot = PivotRule::kOriginalNorm;
  DeficiencyPolicy deficiency = DeficiencyPolicy::kThrow;
};

/// Truncated pivoted QR factors of an N_f x N_r matrix.
///
/// `q` is rows x l_u with orthonormal columns. `r` is l_u x N_r and its
/// columns follow `perm`: column j of `r` holds the coefficients of original
/// column `perm[j]`. The first l_u entries of `perm` are the basis antennas
/// in selection order; the remainder keep their original relative order.
struct QrFactors {
  IQMatrix q;
  IQMatrix r;
  std::vector<std::size_t> perm;
  std::size_t l_u = 0;
  /// Steps where DeficiencyPolicy::kComplete substituted a synthetic basis vector.
  std::vector<std::size_t> completed_steps;
};

QrFactors pivoted_qr_approx(const IQMatrix& a, std::size_t l, const QrOptions& options = {});

/// Q*R with columns returned to original antenna order.
IQMatrix qr_reconstruct(const QrFactors& f);

struct SvdFactors {
  IQMatrix u;            // rows x k
  std::vector<double> s;  // non-increasing
  IQMatrix v;            // cols x k
  std::size_t k = 0;
};

struct SvdOptions {
  int max_sweeps = 60;
  /// A column pair counts as orthogonal once |a_i^H a_j| <= tolerance * |a_i| |a_j|.
  /// Zero selects cols * machine epsilon.
  double tolerance = 0.0;
};

/// Top-k singular triplets. Householder QR reduces the matrix to a square
/// triangular factor, which one-sided Jacobi then diagonalizes.
SvdFactors truncated_svd(const IQMatrix& a, std::size_t k, const SvdOptions& options = {});

IQMatrix svd_reconstruct(const SvdFactors& f);

/// ||a - b||_F / ||a||_F, or the absolute norm when a is zero.
double frobenius_error(const IQMatrix& a, const IQMatrix& b);

}  // namespace fhqr

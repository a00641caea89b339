// Dense rank-revealing helpers on top of Eigen's SVD.
//
// Everything here is tolerance-driven: a single relative threshold on
// singular values decides rank, null spaces and the +infinity sentinel of
// cond2. All functions are pure and safe to call from multiple threads.
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace hfvc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative singular-value cutoff: sigma_i counts toward the rank iff
/// sigma_i > relative * sigma_max.
struct RankTol {
  double relative = 1e-9;

  double threshold(double sigma_max) const { return relative * sigma_max; }
};

/// Thrown by min_norm_solve when the system has no solution at all; carries
/// the least-squares residual that proves it.
class InconsistentSystem : public std::runtime_error {
 public:
  explicit InconsistentSystem(double residual_norm)
      : std::runtime_error("linear system is inconsistent, residual " +
                           std::to_string(residual_norm)),
        residual(residual_norm) {}
  double residual;
};

struct SvdResult {
  Mat u;       // left singular vectors, full
  Vec sigma;   // descending, size min(rows, cols)
  Mat v;       // right singular vectors, full
};

// Throws std::invalid_argument if the matrix contains NaN or Inf.
void ensure_finite(const Mat& a, const char* where);

/// Full SVD, singular values descending. Rejects non-finite input.
SvdResult svd(const Mat& a);

/// Number of singular values above tol relative to the largest one.
/// A matrix with no rows, no cols, or all-zero entries has rank 0.
int rank(const Mat& a, RankTol tol = {});

/// Orthonormal rows spanning the null space of `a`; (cols - rank) rows,
/// ordered like the trailing right singular vectors. For a matrix with zero
/// rank the identity is returned.
Mat null_rows(const Mat& a, RankTol tol = {});

/// Orthonormal rows spanning the row space of `a`; rank rows.
Mat row_basis(const Mat& a, RankTol tol = {});

/// Two-norm condition number sigma_max / sigma_min over all min(rows, cols)
/// singular values. Returns +infinity when sigma_min falls below
/// tol.threshold(sigma_max). An all-zero or empty matrix is rejected.
double cond2(const Mat& a, RankTol tol = {});

/// Minimum-norm solution of a x = b via rank-truncated SVD. Throws
/// InconsistentSystem when the residual exceeds 1e-8 * (1 + |b|).
Vec min_norm_solve(const Mat& a, const Vec& b, RankTol tol = {});

/// Rows of `a` stacked on top of rows of `b` (either side may be empty).
Mat vstack(const Mat& a, const Mat& b);

/// 3x3 cross-product matrix: skew(w) * p == w x p. Requires size 3.
Mat skew(const Vec& w);

}  // namespace hfvc

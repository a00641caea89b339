#include "hfvc/linalg.hpp"

#include <Eigen/SVD>

namespace hfvc {

void ensure_finite(const Mat& a, const char* where) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": non-finite entries");
  }
}

SvdResult svd(const Mat& a) {
  ensure_finite(a, "svd");
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("svd: empty matrix");
  }
  Eigen::JacobiSVD<Mat> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

namespace {

// Rank from a precomputed singular value vector.
int rank_of(const Vec& sigma, RankTol tol) {
  if (sigma.size() == 0) return 0;
  const double cut = tol.threshold(sigma(0));
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cut) ++r;
  }
  return r;
}

}  // namespace

int rank(const Mat& a, RankTol tol) {
  ensure_finite(a, "rank");
  if (a.rows() == 0 || a.cols() == 0 || a.isZero(0.0)) return 0;
  Eigen::JacobiSVD<Mat> dec(a);
  return rank_of(dec.singularValues(), tol);
}

Mat null_rows(const Mat& a, RankTol tol) {
  ensure_finite(a, "null_rows");
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || a.isZero(0.0)) {
    return Mat::Identity(n, n);
  }
  const SvdResult s = svd(a);
  const int r = rank_of(s.sigma, tol);
  // Trailing right singular vectors span the null space.
  return s.v.rightCols(n - r).transpose();
}

Mat row_basis(const Mat& a, RankTol tol) {
  ensure_finite(a, "row_basis");
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || a.isZero(0.0)) {
    return Mat(0, n);
  }
  const SvdResult s = svd(a);
  const int r = rank_of(s.sigma, tol);
  return s.v.leftCols(r).transpose();
}

double cond2(const Mat& a, RankTol tol) {
  ensure_finite(a, "cond2");
  if (a.rows() == 0 || a.cols() == 0 || a.isZero(0.0)) {
    throw std::invalid_argument("cond2: zero or empty matrix");
  }
  Eigen::JacobiSVD<Mat> dec(a);
  const Vec& sigma = dec.singularValues();
  const double smax = sigma(0);
  const double smin = sigma(sigma.size() - 1);
  if (smin <= tol.threshold(smax)) return kInf;
  return smax / smin;
}

Vec min_norm_solve(const Mat& a, const Vec& b, RankTol tol) {
  ensure_finite(a, "min_norm_solve");
  if (b.size() != a.rows()) {
    throw std::invalid_argument("min_norm_solve: size mismatch");
  }
  if (a.rows() == 0) return Vec::Zero(a.cols());
  Vec x = Vec::Zero(a.cols());
  if (!a.isZero(0.0)) {
    const SvdResult s = svd(a);
    const double cut = tol.threshold(s.sigma(0));
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i) {
      if (s.sigma(i) > cut) {
        x += s.v.col(i) * (s.u.col(i).dot(b) / s.sigma(i));
      }
    }
  }
  const double residual = (a * x - b).norm();
  if (residual > 1e-8 * (1.0 + b.norm())) {
    throw InconsistentSystem(residual);
  }
  return x;
}

Mat skew(const Vec& w) {
  if (w.size() != 3) {
    throw std::invalid_argument("skew: expected a length-3 vector");
  }
  Mat s(3, 3);
  s << 0.0, -w(2), w(1),
       w(2), 0.0, -w(0),
       -w(1), w(0), 0.0;
  return s;
}

Mat vstack(const Mat& a, const Mat& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("vstack: column mismatch");
  }
  Mat out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

}  // namespace hfvc

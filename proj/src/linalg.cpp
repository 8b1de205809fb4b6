#include "equivaria/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace equivaria {

Vec vec(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat unvec(const Vec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw Error("unvec: size mismatch");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

SpMat to_sparse(const Mat& m) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != cplx(0.0, 0.0)) t.emplace_back(i, j, m(i, j));
    }
  }
  SpMat s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SpMat sparse_vec_columns(const std::vector<SpMat>& ms) {
  std::vector<Eigen::Triplet<cplx>> t;
  Index rows = 0;
  for (size_t k = 0; k < ms.size(); ++k) {
    const SpMat& m = ms[k];
    rows = m.rows() * m.cols();
    for (Index j = 0; j < m.outerSize(); ++j) {
      for (SpMat::InnerIterator it(m, j); it; ++it) t.emplace_back(it.col() * m.rows() + it.row(), static_cast<Index>(k), it.value());
    }
  }
  SpMat s(rows, static_cast<Index>(ms.size()));
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = cplx(normal(rng), normal(rng));
  }
  return m;
}

Vec random_unit_vector(Index n, Rng& rng) {
  Vec v = random_gaussian(n, 1, rng);
  return v / v.norm();
}

Mat random_hermitian(Index n, Rng& rng) { return hermitian_part(random_gaussian(n, n, rng)); }

Mat random_unitary(Index n, Rng& rng) {
  Eigen::HouseholderQR<Mat> qr(random_gaussian(n, n, rng));
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar.
  for (Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

Mat gram_nullspace(const Mat& gram, double tol) {
  const Index n = gram.rows();
  if (n == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(gram));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = tol * std::max(1.0, ev(n - 1));
  Index k = 0;
  while (k < n && ev(k) <= cut) ++k;
  return es.eigenvectors().leftCols(k);
}

Mat nullspace(const Mat& m, double tol) {
  if (m.cols() == 0) return Mat(0, 0);
  if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
  return gram_nullspace(m.adjoint() * m, tol);
}

Mat orthonormal_span(const Mat& cols, double tol) {
  SpanBuilder sb(cols.rows(), tol);
  for (Index j = 0; j < cols.cols(); ++j) sb.add(cols.col(j));
  return sb.matrix();
}

Vec SpanBuilder::orthogonal_part(const Vec& v) const {
  Vec r = v;
  // Two passes of classical Gram-Schmidt keep the basis orthonormal to
  // machine precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& b : basis_) r -= b * b.dot(r);
  }
  return r;
}

bool SpanBuilder::add(const Vec& v) {
  if (v.size() != ambient_) throw Error("SpanBuilder::add: dimension mismatch");
  const double scale = std::max(1.0, v.norm());
  Vec r = orthogonal_part(v);
  const double rn = r.norm();
  if (rn <= tol_ * scale) return false;
  r /= rn;
  // Renormalize after a third pass if the first two lost precision.
  for (const Vec& b : basis_) r -= b * b.dot(r);
  r /= r.norm();
  basis_.push_back(std::move(r));
  return true;
}

double SpanBuilder::residual(const Vec& v) const { return orthogonal_part(v).norm(); }

Mat SpanBuilder::matrix() const {
  Mat q(ambient_, size());
  for (Index j = 0; j < size(); ++j) q.col(j) = basis_[static_cast<size_t>(j)];
  return q;
}

Mat sqrt_psd(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat inv_sqrt_pd(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.size() > 0 && ev(0) <= 0) throw NumericError("inv_sqrt_pd: matrix is not positive definite");
  Eigen::VectorXd iv = ev.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * iv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const Mat& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

std::vector<std::pair<Index, Index>> cluster_sorted(const Eigen::VectorXd& values, double gap) {
  std::vector<std::pair<Index, Index>> runs;
  Index begin = 0;
  for (Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values(i) - values(i - 1) > gap) {
      if (i > begin) runs.emplace_back(begin, i);
      begin = i;
    }
  }
  return runs;
}

double inclusion_residual(const Mat& q, const Mat& vectors) {
  double worst = 0.0;
  for (Index j = 0; j < vectors.cols(); ++j) {
    Vec v = vectors.col(j);
    if (q.cols() > 0) v -= q * (q.adjoint() * v);
    worst = std::max(worst, v.norm());
  }
  return worst;
}

std::string describe_shape(const Mat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace equivaria

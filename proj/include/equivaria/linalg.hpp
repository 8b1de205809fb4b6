// Dense complex linear algebra shared by every module: null spaces, span
// bookkeeping and a few Hermitian helpers on top of Eigen.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace equivaria {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Index = Eigen::Index;
using SpMat = Eigen::SparseMatrix<cplx>;

/// Default relative tolerance for matrix equality and rank decisions.
inline constexpr double kDefaultTol = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a structural invariant (group law, cocycle identity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A randomized numeric procedure could not reach a non-degenerate state.
class NumericError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

inline double frob(const Mat& m) { return m.norm(); }

/// Column-major flattening; vec(A X B) = (B^T kron A) vec(X).
Vec vec(const Mat& m);
Mat unvec(const Vec& v, Index rows, Index cols);

Mat kron(const Mat& a, const Mat& b);

/// Exact sparse copy (only structural zeros are dropped).
SpMat to_sparse(const Mat& m);
/// Columns vec(ms[k]) as one sparse N^2 x k matrix.
SpMat sparse_vec_columns(const std::vector<SpMat>& ms);

/// Random matrix with i.i.d. standard complex Gaussian entries.
Mat random_gaussian(Index rows, Index cols, Rng& rng);
Vec random_unit_vector(Index n, Rng& rng);
Mat random_hermitian(Index n, Rng& rng);
Mat random_unitary(Index n, Rng& rng);

/// Orthonormal basis (as columns) of the kernel of a Hermitian PSD Gram
/// matrix G = sum K_i^* K_i. Eigenvalues below tol * max(1, lambda_max) count
/// as zero, so singular values below sqrt(tol) of the stacked system vanish.
Mat gram_nullspace(const Mat& gram, double tol);

/// Orthonormal basis of ker(m), computed through m^* m.
Mat nullspace(const Mat& m, double tol);

/// Orthonormal basis of the column span of `cols`.
Mat orthonormal_span(const Mat& cols, double tol);

/// Incrementally grown orthonormal basis of a subspace of C^n. A vector is
/// accepted when its component orthogonal to the current span exceeds
/// tol * max(1, |v|).
class SpanBuilder {
 public:
  SpanBuilder(Index ambient, double tol) : ambient_(ambient), tol_(tol) {}

  bool add(const Vec& v);
  /// Residual |v - P v| of v against the current span.
  double residual(const Vec& v) const;
  Index size() const { return static_cast<Index>(basis_.size()); }
  Index ambient() const { return ambient_; }
  const std::vector<Vec>& basis() const { return basis_; }
  Mat matrix() const;

 private:
  Vec orthogonal_part(const Vec& v) const;

  Index ambient_;
  double tol_;
  std::vector<Vec> basis_;
};

/// Hermitian part (m + m^*) / 2.
inline Mat hermitian_part(const Mat& m) { return (m + m.adjoint()) / 2.0; }

/// Positive square root and inverse square root of a Hermitian PSD matrix.
Mat sqrt_psd(const Mat& h);
Mat inv_sqrt_pd(const Mat& h);

/// Smallest eigenvalue of the Hermitian part of h.
double min_eigenvalue(const Mat& h);

/// Largest singular value.
double spectral_norm(const Mat& m);

/// Groups sorted real values into runs whose consecutive gaps are <= gap.
/// Returns the run boundaries as [begin, end) index pairs.
std::vector<std::pair<Index, Index>> cluster_sorted(const Eigen::VectorXd& values, double gap);

/// Residual of a subspace inclusion: max over columns of `vectors` of the
/// distance to span(orthonormal columns of q).
double inclusion_residual(const Mat& q, const Mat& vectors);

std::string describe_shape(const Mat& m);

}  // namespace equivaria

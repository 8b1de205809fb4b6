// Finite-dimensional *-algebras of complex matrices. Every algebra the
// library builds ends up here, and the routines in this header serve as the
// brute-force oracle for the structural computations elsewhere.
#pragma once

#include "equivaria/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace equivaria {

/// A *-closed linear span of N x N matrices with a basis that is orthonormal
/// for <a|b> = trace(a^* b). The zero algebra (dim 0) is allowed.
class MatrixStarAlgebra {
 public:
  explicit MatrixStarAlgebra(Index ambient = 0);

  /// Takes a basis that is already trace-orthonormal (checked to 1e-8).
  static MatrixStarAlgebra from_orthonormal(Index ambient, std::vector<Mat> basis);
  /// Orthonormalizes the span of `elements`; closure is not enforced.
  static MatrixStarAlgebra span_of(Index ambient, const std::vector<Mat>& elements, double tol = kDefaultTol);

  Index ambient_dim() const { return n_; }
  Index dim() const { return static_cast<Index>(basis_.size()); }
  const std::vector<Mat>& basis() const { return basis_; }
  const Mat& basis(Index k) const { return basis_[static_cast<size_t>(k)]; }
  /// True when the ambient identity lies in the span.
  bool unital() const { return unital_; }

  /// Coordinates of the orthogonal projection of `a` onto the span.
  Vec coefficients(const Mat& a) const;
  Mat element(const Vec& coeffs) const;
  Mat project(const Mat& a) const { return element(coefficients(a)); }
  /// Frobenius distance from `a` to the span.
  double residual(const Mat& a) const;
  bool contains(const Mat& a, double tol = kDefaultTol) const;
  /// Distances of the vectorized matrices in `columns` (N^2 x k) to the span.
  Eigen::VectorXd residuals(const Mat& columns) const;
  Eigen::VectorXd residuals(const SpMat& columns) const;
  /// True when every matrix lies in the span, relative to max(1, |a|).
  bool contains_all(const std::vector<Mat>& as, double tol = kDefaultTol) const;

  /// Largest residual of basis products and adjoints against the span.
  double closure_residual() const;

  /// The algebra's own unit (not the ambient identity when non-unital).
  Mat unit(double tol = kDefaultTol) const;

  /// Columns are vec(basis[k]).
  const Mat& frame() const { return q_; }

 private:
  void rebuild();

  Index n_;
  std::vector<Mat> basis_;
  Mat q_;
  bool unital_ = false;
  // Rows of q_ that are not identically zero, and q_ restricted to them.
  std::vector<Index> support_;
  std::vector<Index> row_pos_;
  Mat q_support_;
};

MatrixStarAlgebra full_matrix_algebra(Index n);
MatrixStarAlgebra scalar_algebra(Index n);
MatrixStarAlgebra diagonal_algebra(Index n);
/// Block-diagonal direct sum on the direct sum of ambient spaces.
MatrixStarAlgebra direct_sum(const std::vector<MatrixStarAlgebra>& parts);
/// Block-diagonal embedding of the parts' matrices.
Mat block_diagonal(const std::vector<Mat>& parts);

/// Smallest *-closed span containing the generators.
MatrixStarAlgebra generate(const std::vector<Mat>& gens, double tol = kDefaultTol);

/// Commutant of the algebra inside the full ambient M_N.
MatrixStarAlgebra commutant(const MatrixStarAlgebra& s, double tol = kDefaultTol);
/// {x in M_N : x t = t x and x t^* = t^* x for every t in ops}.
MatrixStarAlgebra commutant_of(Index n, const std::vector<Mat>& ops, double tol = kDefaultTol);
/// Elements of `a` commuting with every operator in `ops` (and their adjoints).
MatrixStarAlgebra commutant_within(const MatrixStarAlgebra& a, const std::vector<Mat>& ops, double tol = kDefaultTol);
MatrixStarAlgebra center(const MatrixStarAlgebra& a, double tol = kDefaultTol);

/// Largest residual of either basis against the other span.
double span_distance(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b);
bool same_span(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b, double tol = kDefaultTol);
/// Largest residual of a's basis against b.
double inclusion_residual(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b);

struct Block {
  Index size = 0;          ///< n: the block is M_n
  Index multiplicity = 0;  ///< m: rank of the central projection is n * m
  Mat central_projection;
  /// N x n isometry onto an irreducible invariant subspace; a -> U^* a U is
  /// the block's irreducible representation.
  Mat irrep_basis;

  Mat represent(const Mat& a) const { return irrep_basis.adjoint() * a * irrep_basis; }
};

struct BlockStructure {
  std::vector<Block> blocks;

  std::vector<Index> sizes() const;
  /// Sum of the minimal central projections.
  Mat unit(Index ambient) const;
};

/// Wedderburn blocks via a seeded random Hermitian element of the center.
/// Degenerate draws are retried up to 8 times with fresh randomness.
BlockStructure block_decompose(const MatrixStarAlgebra& a, std::uint64_t seed = 0, double tol = kDefaultTol);

/// Largest singular value.
double operator_norm(const Mat& a);

/// a = b^* b for some b in `within`; throws if a lies outside `within`.
bool is_positive(const Mat& a, const MatrixStarAlgebra& within, double tol = kDefaultTol);

/// A linear functional phi(a) = sum_k functional[k] * coefficients(a)[k].
struct State {
  Vec functional;
};

/// phi(a) = trace(density * a) restricted to the algebra.
State state_from_density(const MatrixStarAlgebra& a, const Mat& density);
cplx evaluate(const State& phi, const MatrixStarAlgebra& a, const Mat& x);

struct GnsRepresentation {
  Index dim = 0;
  /// pi_phi(b_k) for every basis element b_k of the algebra.
  std::vector<Mat> images;
  /// dim(A) x dim(J_phi): coefficient vectors spanning the null ideal.
  Mat null_ideal;
  double inner_product_residual = 0.0;
  double homomorphism_residual = 0.0;
};

/// GNS representation of a state: quotient of A by J_phi = {a : phi(a^*a) = 0},
/// inner product <a + J | b + J> = phi(a^* b), left multiplication action.
/// Throws ValidationError if phi is not positive.
GnsRepresentation gns(const MatrixStarAlgebra& a, const State& phi, double tol = kDefaultTol, std::uint64_t seed = 0);

/// Representation matrix of a linear map on the algebra's basis.
Mat left_multiplication(const MatrixStarAlgebra& a, const Mat& x);

bool is_ideal(const MatrixStarAlgebra& ideal, const MatrixStarAlgebra& a, double tol = kDefaultTol);
MatrixStarAlgebra ideal_sum(const MatrixStarAlgebra& i, const MatrixStarAlgebra& j, double tol = kDefaultTol);
MatrixStarAlgebra ideal_intersection(const MatrixStarAlgebra& i, const MatrixStarAlgebra& j, double tol = kDefaultTol);
/// Indices of the blocks of A on which the ideal acts nontrivially.
std::vector<size_t> ideal_support(const MatrixStarAlgebra& ideal, const BlockStructure& blocks, double tol = kDefaultTol);
/// An ideal equals A iff it contains every minimal central projection of A.
bool ideal_is_whole(const MatrixStarAlgebra& ideal, const BlockStructure& blocks, double tol = kDefaultTol);
/// Ideal generated by a subset of the blocks (sum of A p_i).
MatrixStarAlgebra block_ideal(const MatrixStarAlgebra& a, const BlockStructure& blocks, const std::vector<size_t>& which,
                              double tol = kDefaultTol);

/// Space of T with T x = y T for paired representations x_k, y_k.
std::vector<Mat> intertwiners(const std::vector<Mat>& from, const std::vector<Mat>& to, double tol = kDefaultTol);

struct SeparationReport {
  struct BlockVerdict {
    Index size = 0;
    bool nonzero = false;
    Index commutant_dim = 0;
    bool irreducible = false;
  };
  struct PairVerdict {
    size_t first = 0;
    size_t second = 0;
    Index intertwiner_dim = 0;
    bool equivalent = false;
  };
  std::vector<BlockVerdict> blocks;
  std::vector<PairVerdict> pairs;
  bool separating = false;
  std::vector<std::string> failures;
};

/// Whether every irreducible block representation of A stays irreducible on
/// B and pairwise inequivalent blocks stay inequivalent.
SeparationReport is_separating(const MatrixStarAlgebra& b, const MatrixStarAlgebra& a, const BlockStructure& blocks,
                               double tol = kDefaultTol);

struct StoneWeierstrassVerdict {
  bool pass = false;
  bool separating = false;
  Index dim_b = 0;
  Index dim_a = 0;
  std::string witness;
  SeparationReport report;
};

/// A separating *-subalgebra must be the whole algebra.
StoneWeierstrassVerdict check_stone_weierstrass(const MatrixStarAlgebra& b, const MatrixStarAlgebra& a,
                                                const BlockStructure& blocks, double tol = kDefaultTol);

/// A random algebra unitarily conjugate to a direct sum of blocks M_{n_i}
/// with multiplicities, of total dimension at most max_dim.
MatrixStarAlgebra random_algebra(Rng& rng, Index max_dim);
/// A random *-subalgebra of `a`, drawn from several strategies (whole
/// algebra, commutative, diagonally embedded blocks, corners, ideals).
MatrixStarAlgebra random_subalgebra(const MatrixStarAlgebra& a, const BlockStructure& blocks, Rng& rng,
                                    double tol = kDefaultTol);

/// Residuals of a linear map defined on a basis being a *-homomorphism:
/// images[k] = f(source[k]), products and adjoints are expanded in the
/// source basis and compared after applying f.
struct HomomorphismResiduals {
  double multiplicative = 0.0;
  double star = 0.0;
  double source_membership = 0.0;
  Index source_rank = 0;
  Index image_rank = 0;
  bool injective() const { return source_rank == image_rank; }
};

HomomorphismResiduals star_homomorphism_residuals(const std::vector<Mat>& source, const std::vector<Mat>& images,
                                                  double tol = kDefaultTol);

}  // namespace equivaria

// Finite groups given by multiplication tables, their unitary
// representations, and the isotypic machinery built on irreducible
// characters. Haar measure is counting measure, so volume(W) = |W|.
#pragma once

#include "equivaria/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace equivaria {

using Table = std::vector<std::vector<int>>;

/// A finite group on the element indices 0..order-1 with 0 as the identity.
/// The table is validated on construction; an invalid group never exists.
class FiniteGroup {
 public:
  /// The trivial group.
  FiniteGroup();
  explicit FiniteGroup(Table mul, std::string name = {});

  int order() const { return static_cast<int>(mul_.size()); }
  int mul(int a, int b) const { return mul_[static_cast<size_t>(a)][static_cast<size_t>(b)]; }
  int inv(int a) const { return inv_[static_cast<size_t>(a)]; }
  static constexpr int identity() { return 0; }
  const Table& table() const { return mul_; }
  const std::string& name() const { return name_; }

  /// Conjugate w^{-1} v w.
  int conj(int w, int v) const { return mul(inv(w), mul(v, w)); }

  /// A small generating set, chosen greedily in element order.
  const std::vector<int>& generators() const { return generators_; }

  bool operator==(const FiniteGroup& other) const { return mul_ == other.mul_; }

  static FiniteGroup cyclic(int n);
  static FiniteGroup klein_four();
  static FiniteGroup symmetric3();
  /// Symmetries of a regular polygon with `order / 2` sides.
  static FiniteGroup dihedral(int order);
  static FiniteGroup quaternion8();
  /// Elements (a, b) are indexed a * |H| + b.
  static FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h);
  /// Closure of permutation generators; elements in breadth-first order from the identity.
  static FiniteGroup from_permutations(const std::vector<std::vector<int>>& gens, std::string name = {});

 private:
  Table mul_;
  std::vector<int> inv_;
  std::vector<int> generators_;
  std::string name_;
};

/// A finite group of invertible matrices together with its abstract table.
struct MatrixGroup {
  FiniteGroup group;
  std::vector<Mat> elements;
};

MatrixGroup matrix_group_closure(const std::vector<Mat>& gens, std::string name, double tol = kDefaultTol);

/// Symmetries of the square acting on R^2, generated by diag(1,-1) and the coordinate swap.
MatrixGroup square_symmetries();

/// A subgroup re-indexed as a group in its own right; to_parent[0] == 0.
struct Subgroup {
  FiniteGroup group;
  std::vector<int> to_parent;
};

/// Validates closure and re-indexes; `elements` need not be sorted.
Subgroup make_subgroup(const FiniteGroup& g, std::vector<int> elements);
bool is_normal_subgroup(const FiniteGroup& g, const std::vector<int>& elements);

struct UnitaryRep {
  FiniteGroup group;
  std::vector<Mat> matrices;
  std::string label;

  int dim() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
  const Mat& operator()(int g) const { return matrices[static_cast<size_t>(g)]; }
  Vec character() const;
};

struct RepResiduals {
  double homomorphism = 0.0;
  double unitarity = 0.0;
  double identity = 0.0;
  double max() const;
};

RepResiduals rep_residuals(const UnitaryRep& rep);
/// Throws ValidationError if a residual exceeds tol.
void validate_rep(const UnitaryRep& rep, double tol = kDefaultTol);

UnitaryRep regular_rep(const FiniteGroup& g);
UnitaryRep trivial_rep(const FiniteGroup& g, int dim = 1);
/// The representation v -> rep(phi(v)) of a subgroup.
UnitaryRep restrict_rep(const UnitaryRep& rep, const Subgroup& sub);
UnitaryRep direct_sum(const UnitaryRep& a, const UnitaryRep& b);

/// (1/|W|) sum_w a(w) conj(b(w)).
cplx character_inner(const Vec& a, const Vec& b);

/// Complete list of pairwise-inequivalent irreducible unitary representations,
/// split out of the regular representation with seeded random commutant
/// elements. Ordered by dimension, then by character read element by element
/// (larger real part first, then larger imaginary part), so the trivial
/// representation is always first. Labels are "rho<i>".
std::vector<UnitaryRep> enumerate_irreps(const FiniteGroup& g, std::uint64_t seed = 0, double tol = kDefaultTol);

/// pi(e_rho) = (dim rho / |W|) sum_w conj(trace rho(w)) pi(w).
Mat isotypic_projection(const UnitaryRep& pi, const UnitaryRep& rho);

/// Orthonormal basis (Hilbert-Schmidt inner product) of the space of
/// intertwiners s: H_rho -> H_pi with s rho(w) = pi(w) s.
std::vector<Mat> equivariant_maps(const UnitaryRep& rho, const UnitaryRep& pi, double tol = kDefaultTol);

/// The unitary H_rho (x) HS(rho, pi)^W -> H_{pi,rho}, zeta (x) s -> sqrt(dim rho) s(zeta),
/// as a dim(pi) x (dim(rho) * multiplicity) isometry. Column index is
/// zeta_index * multiplicity + s_index.
Mat mu_isometry(const UnitaryRep& pi, const UnitaryRep& rho, double tol = kDefaultTol);

struct IsotypicPart {
  int irrep = 0;
  std::string label;
  int multiplicity = 0;
  Mat projection;
};

struct IsotypicDecomposition {
  UnitaryRep rep;
  std::vector<IsotypicPart> parts;
};

/// Parts are listed for every irrep in `irreps`, including multiplicity zero.
IsotypicDecomposition isotypic_decomposition(const UnitaryRep& pi, const std::vector<UnitaryRep>& irreps,
                                             double tol = kDefaultTol);

/// Maximum deviation of the Schur orthogonality relations for matrix
/// coefficients c_{xi,eta}(w) = <rho(w) xi | eta>, under the normalized
/// average over W, on `trials` random vector quadruples.
double schur_orthogonality_residual(const UnitaryRep& rho, Rng& rng, int trials = 16);

/// Index of the irrep in `irreps` whose character matches `rep` (irreducible), or -1.
int find_irrep(const std::vector<UnitaryRep>& irreps, const UnitaryRep& rep, double tol = 1e-6);

}  // namespace equivaria

// Scalar subgroups, the ideal C(X, W, I) and the Morita reduction
// C(X, K(H))^W ~ C(X, W, I) = C(X, W', I) x| R ~ C(X/W') x| R.
#pragma once

#include "equivaria/equivariant.hpp"
#include "equivaria/hilbmod.hpp"
#include "equivaria/spectrum.hpp"

#include <optional>
#include <string>
#include <vector>

namespace equivaria {

struct PointScalars {
  int point = 0;
  std::vector<int> stabilizer;
  /// w in W_x with I_{w,x} a scalar multiple of the identity.
  std::vector<int> scalar;
  /// w in W_x with I_{w,x} = 1. Completeness and C(X, W, I) use this subgroup.
  std::vector<int> normalised;
  /// Irreps of W_x trivial on the normalised subgroup that I_x misses.
  std::vector<std::string> missing;
};

struct ScalarStructure {
  std::vector<PointScalars> points;
  /// Every scalar I_{w,x} (w in W_x) equals the identity.
  bool normalisation_ok = false;
  /// Each irrep of W_x trivial on the normalised subgroup occurs in w -> I_{w,x}.
  bool completeness_ok = false;
  /// w N_x w^-1 = N_{wx} and N_x normal in W_x.
  bool conjugation_ok = false;
  std::vector<std::string> failures;

  const std::vector<int>& subgroup(int x) const { return points[static_cast<size_t>(x)].normalised; }
};

/// A unitary counts as scalar when |I - (tr I / d) 1| < tol.
ScalarStructure scalar_subgroups(const EquivariantSystem& sys, double tol = 1e-8, std::uint64_t seed = 0);

struct CIdeal {
  CrossedProduct crossed;
  MatrixStarAlgebra ideal;
  bool is_ideal = false;
};

/// {sum f_w w : f_{nw}(x) = f_w(x) for n in N_x} inside C(X) x| W.
CIdeal c_ideal(const EquivariantSystem& sys, const ScalarStructure& scalars, double tol = kDefaultTol);
CIdeal c_ideal(const EquivariantSystem& sys, double tol = kDefaultTol);

/// Elements of C(X) x| W killed by every pi_{x, rho} o phi with rho nontrivial
/// on N_x, compared with C(X, W, I).
struct QuotientConsistency {
  Index annihilator_dim = 0;
  Index c_dim = 0;
  double residual = 0.0;
  bool ok(double tol = 1e-8) const { return annihilator_dim == c_dim && residual < tol; }
};
QuotientConsistency quotient_consistency(const EquivariantSystem& sys, std::uint64_t seed = 0, double tol = kDefaultTol);

struct MoritaTheoremVerdict {
  ScalarStructure scalars;
  bool hypotheses = false;
  MatrixStarAlgebra fixed;
  /// span of <<xi|eta>> for the Green-Julg module of C(X, H).
  MatrixStarAlgebra j;
  MatrixStarAlgebra c;
  double inclusion = 0.0;      ///< J against C
  double span_residual = 0.0;  ///< both directions
  bool equal = false;
  bool strict = false;
  /// The Green-Julg module restricted to J.
  FDHilbertModule module;
  /// fixed ~ J through that module (holds with or without the hypotheses).
  MoritaVerdict morita;
  std::vector<Index> blocks_fixed, blocks_j, blocks_c;
  bool pass = false;
  std::string summary;
};

MoritaTheoremVerdict verify_morita_theorem(const EquivariantSystem& sys, std::uint64_t seed = 0, double tol = 1e-8);

struct ReductionLink {
  std::string name;
  std::string kind;  ///< "morita" or "isomorphism"
  Index source_dim = 0;
  Index target_dim = 0;
  std::vector<Index> source_blocks, target_blocks;
  double residual = 0.0;
  bool ok = false;
  std::string detail;
};

struct ReductionReport {
  std::string system;
  std::vector<int> wprime, r;
  std::vector<ReductionLink> links;
  MatrixStarAlgebra start;  ///< C(X, K(H))^W
  MatrixStarAlgebra end;    ///< C(X)^{W'} x| R
  /// Composite fixed ~ end through E (x) dual(E'' x| R).
  MoritaVerdict composite;
  Index blocks_start = 0;
  Index blocks_end = 0;
  bool ok = false;
};

/// Throws ValidationError when W' is not normal, R is not a complement, or
/// N_x != W_x cap W' at some point (named in the message).
ReductionReport semidirect_reduction(const EquivariantSystem& sys, const std::vector<int>& wprime,
                                     const std::vector<int>& r, std::uint64_t seed = 0, double tol = 1e-8);

struct Component {
  EquivariantSystem system;
  std::vector<int> wprime;
  std::vector<int> r;
};

struct ToyDual {
  std::vector<ReductionReport> reports;
  MoritaVerdict combined;
  bool ok = false;
};

ToyDual assemble_toy_dual(const std::vector<Component>& components, std::uint64_t seed = 0, double tol = 1e-8);

}  // namespace equivaria

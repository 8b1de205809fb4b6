// Equivariant bundles (X, W, H, I) over finite point sets, the induced action
// on C(X, K(H)), fixed-point algebras and crossed products.
//
// Layout conventions: point x occupies rows x*d .. x*d + d - 1 of C^{|X| d};
// a function k: X -> M_d is stored as the block-diagonal matrix diag(k(x)).
#pragma once

#include "equivaria/grouprep.hpp"
#include "equivaria/matalg.hpp"

#include <functional>
#include <string>
#include <vector>

namespace equivaria {

class EquivariantSystem {
 public:
  /// action[w][x] = w.x; cocycle[w][x] = I_{w,x}. Throws ValidationError when
  /// the action or the cocycle identity I_{w1,w2 x} I_{w2,x} = I_{w1 w2,x} fails.
  EquivariantSystem(FiniteGroup group, std::vector<std::string> points, std::vector<std::vector<int>> action,
                    Index fiber_dim, std::vector<std::vector<Mat>> cocycle, std::string name = {},
                    double tol = 1e-8);

  const FiniteGroup& group() const { return group_; }
  const std::vector<std::string>& points() const { return points_; }
  const std::string& name() const { return name_; }
  int num_points() const { return static_cast<int>(points_.size()); }
  Index fiber_dim() const { return d_; }
  /// |X| * d, the size of the carrier C^{|X| d}.
  Index total_dim() const { return d_ * num_points(); }
  int act(int w, int x) const { return action_[static_cast<size_t>(w)][static_cast<size_t>(x)]; }
  const std::vector<std::vector<int>>& action() const { return action_; }
  const Mat& cocycle(int w, int x) const { return cocycle_[static_cast<size_t>(w)][static_cast<size_t>(x)]; }
  const std::vector<std::vector<Mat>>& cocycle() const { return cocycle_; }

 private:
  FiniteGroup group_;
  std::vector<std::string> points_;
  std::vector<std::vector<int>> action_;
  Index d_;
  std::vector<std::vector<Mat>> cocycle_;
  std::string name_;
};

/// W acting trivially on `num_points` points with the trivial cocycle.
EquivariantSystem trivial_system(const FiniteGroup& g, int num_points, Index fiber_dim);
/// Diagonal cocycle diag(e^{ix}, -e^{-ix}) of the Z/2 line family.
Mat z2_line_cocycle(double x);
/// Z/2 acting on the grid {-n, ..., n} by x -> -x with the Z/2 line cocycle.
EquivariantSystem z2_line(int n);
/// Z/2 x Z/2 = <a> x <b> on {-n, ..., n}: a acts trivially with I_a = 1,
/// b acts as in the Z/2 line family. Element (a^i, b^j) has index 2 i + j.
EquivariantSystem z2z2_line(int n);
/// Symmetries of the square on the grid {-m..m}^2 with I_{w,x} = w on C^2.
EquivariantSystem dihedral_plane(int m);
/// One point with fiber H_pi and I_w = pi(w).
EquivariantSystem point_system(const UnitaryRep& pi, std::string name = {});
/// One point, I = regular representation.
EquivariantSystem regular_point(const FiniteGroup& g);
/// One point, W = Z/2, d = 1, I_w = -1 for the generator.
EquivariantSystem anticomplete_point();
/// The same points, action and cocycle for a subgroup of W.
EquivariantSystem restrict_system(const EquivariantSystem& sys, const Subgroup& sub);
/// Same point action with fiber l^2(W) and I_{w,x} = left translation by w.
EquivariantSystem left_translation(const EquivariantSystem& sys);
/// The point action alone: d = 1 and trivial cocycle.
EquivariantSystem scalar_shadow(const EquivariantSystem& sys);
/// W acting on itself by left multiplication (one free orbit), d = 1.
EquivariantSystem free_orbit(const FiniteGroup& g);

/// Block-diagonal matrix of the function x -> values[x].
Mat function_element(const EquivariantSystem& sys, const std::vector<Mat>& values);
std::vector<Mat> function_values(const EquivariantSystem& sys, const Mat& k);
/// C(X, M_d) with its matrix-unit basis.
MatrixStarAlgebra function_algebra(const EquivariantSystem& sys);
/// U_w (delta_x (x) v) = delta_{wx} (x) I_{w,x} v.
Mat implementing_unitary(const EquivariantSystem& sys, int w);
/// (alpha_w k)(x) = I_{w,w^-1 x} k(w^-1 x) I_{w^-1,x}.
Mat alpha(const EquivariantSystem& sys, int w, const Mat& k);

/// C(X, K(H))^W via the null space of the alpha_w - id over generators.
MatrixStarAlgebra fixed_point_algebra(const EquivariantSystem& sys, double tol = kDefaultTol);
/// The same algebra as the commutant of {U_w} inside the function algebra.
MatrixStarAlgebra fixed_point_algebra_by_commutant(const EquivariantSystem& sys, double tol = kDefaultTol);

/// Orbits as sorted point lists, ordered by their lowest point.
std::vector<std::vector<int>> orbits(const EquivariantSystem& sys);
std::vector<int> stabilizer(const EquivariantSystem& sys, int x);

/// An action of W on a matrix *-algebra B by linear maps on B's basis:
/// coefficients(beta_w(b)) = maps[w] * coefficients(b).
struct StarAction {
  MatrixStarAlgebra algebra;
  FiniteGroup group;
  std::vector<Mat> maps;

  Mat apply(int w, const Mat& b) const;
  Vec apply_coefficients(int w, const Vec& c) const { return maps[static_cast<size_t>(w)] * c; }
};

/// beta_w(b) = U_w b U_w^*.
StarAction action_from_unitaries(const MatrixStarAlgebra& b, const FiniteGroup& g, const std::vector<Mat>& unitaries);
StarAction action_from_maps(const MatrixStarAlgebra& b, const FiniteGroup& g,
                            const std::function<Mat(int, const Mat&)>& beta);
/// alpha restricted to the function algebra of the system.
StarAction function_action(const EquivariantSystem& sys);
StarAction restrict_action(const StarAction& act, const Subgroup& sub);

struct ActionResiduals {
  double homomorphism = 0.0;
  double multiplicative = 0.0;
  double star = 0.0;
  double identity = 0.0;
  double max() const;
};
ActionResiduals action_residuals(const StarAction& act);
/// Throws ValidationError when beta is not an action by *-automorphisms.
void validate_action(const StarAction& act, double tol = 1e-8);

/// Formal sums sum_w f_w w with f_w in B (one matrix per group element).
using CrossedCoefficients = std::vector<Mat>;

/// (sum f_w w)(sum g_v v) = sum f_w beta_w(g_v) wv.
CrossedCoefficients crossed_multiply(const StarAction& act, const CrossedCoefficients& f, const CrossedCoefficients& g);
/// (a w)^* = beta_{w^-1}(a^*) w^-1.
CrossedCoefficients crossed_adjoint(const StarAction& act, const CrossedCoefficients& f);

/// B x| W realized by its regular embedding in M_{|W| N}: block (u, v) of the
/// image of sum f_w w is beta_{u^-1}(f_{u v^-1}).
class CrossedProduct {
 public:
  CrossedProduct(StarAction action, double tol = kDefaultTol);

  const StarAction& action() const { return action_; }
  const FiniteGroup& group() const { return action_.group; }
  const MatrixStarAlgebra& base() const { return action_.algebra; }
  const MatrixStarAlgebra& algebra() const { return algebra_; }

  Mat embed(const CrossedCoefficients& f) const;
  /// The image of b w.
  Mat embed_term(const Mat& b, int w) const;
  /// Explicit inverse of the embedding: f_w = beta_w(block(w, 1)).
  CrossedCoefficients coefficients(const Mat& x) const;
  /// Images of b_k w for every basis element b_k and every w, w-major.
  std::vector<Mat> term_images() const;

 private:
  StarAction action_;
  MatrixStarAlgebra algebra_;
};

/// Verification summary for an explicit linear map between two algebras.
struct IsomorphismReport {
  Index source_dim = 0;
  Index target_dim = 0;
  Index image_rank = 0;
  double multiplicative = 0.0;
  double star = 0.0;
  /// Residual of the image span against the declared target algebra.
  double onto = 0.0;
  bool bijective = false;
  bool ok(double tol) const { return bijective && multiplicative < tol && star < tol && onto < tol; }
};

IsomorphismReport check_isomorphism(const std::vector<Mat>& source, const std::vector<Mat>& images,
                                    const MatrixStarAlgebra& target, double tol = kDefaultTol);

/// phi: C(X) x| W -> C(X, K(l^2 W))^W with phi(f w)(x): delta_v -> f(w v^-1 x) delta_{v w^-1}.
struct PhiIso {
  EquivariantSystem scalar;
  EquivariantSystem translated;
  CrossedProduct source;
  MatrixStarAlgebra target;
  std::vector<Mat> source_terms;
  std::vector<Mat> images;
  IsomorphismReport report;
};
PhiIso phi_iso(const EquivariantSystem& sys, double tol = kDefaultTol);
/// phi(f w) as a function in C(X, K(l^2 W)), f a function on X.
Mat phi_term(const EquivariantSystem& scalar, const std::vector<cplx>& f, int w);

/// (B x| U) x| V -> B x| W for W = U x| V with U normal, via (a u) v -> a (uv).
struct IteratedIso {
  Subgroup u;
  Subgroup v;
  CrossedProduct inner;
  CrossedProduct outer;
  CrossedProduct whole;
  std::vector<Mat> source_terms;
  std::vector<Mat> images;
  IsomorphismReport report;
};
/// Throws ValidationError when U is not normal, V is not a complement or U V != W.
IteratedIso iterated_crossed_iso(const StarAction& beta, const std::vector<int>& u, const std::vector<int>& v,
                                 double tol = kDefaultTol);
/// The V-action alpha_v(a u) = beta_v(a) v u v^-1 on B x| U.
StarAction conjugation_action(const StarAction& beta, const CrossedProduct& inner, const Subgroup& u, const Subgroup& v);

/// C(X)^W for a scalar system together with the isomorphism onto C(X/W):
/// the indicator of an orbit maps to the corresponding diagonal unit.
struct QuotientAlgebra {
  MatrixStarAlgebra fixed;
  MatrixStarAlgebra orbit_functions;
  std::vector<Mat> orbit_indicators;
  std::vector<Mat> images;
  IsomorphismReport report;
};
QuotientAlgebra quotient_algebra(const EquivariantSystem& sys, double tol = kDefaultTol);

}  // namespace equivaria

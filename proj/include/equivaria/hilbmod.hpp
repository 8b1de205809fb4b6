// Finite-dimensional Hilbert C*-modules over matrix *-algebras.
//
// A module E = C^m over B with basis b_1..b_K is stored by two tensors:
//   xi . b_k = R_k xi             (right action)
//   <xi|eta> = sum_k (xi^* G_k eta) b_k   (inner product, conjugate-linear in xi)
// The scalar product (xi|eta) = tau(<xi|eta>) = xi^* T eta, tau the normalized
// trace, defines adjoints of module operators. Conjugating by the frame
// S = T^{1/2} turns those adjoints into conjugate transposes ("frame
// coordinates"); operators in carrier coordinates are called raw.
#pragma once

#include "equivaria/equivariant.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace equivaria {

class FDHilbertModule {
 public:
  FDHilbertModule() = default;
  /// Throws ValidationError on shape mismatch or a degenerate scalar product.
  FDHilbertModule(MatrixStarAlgebra algebra, Index carrier_dim, std::vector<Mat> right_action, std::vector<Mat> inner,
                  std::string name = {});

  /// Builds the inner tensor from the inner products of carrier basis vectors.
  static FDHilbertModule from_pairing(MatrixStarAlgebra algebra, Index carrier_dim, std::vector<Mat> right_action,
                                      const std::function<Mat(Index, Index)>& basis_inner, std::string name = {});

  /// E realized as a space of p x N matrices: xi . b = xi b and <xi|eta> = xi^* eta.
  static FDHilbertModule from_matrices(MatrixStarAlgebra algebra, const std::vector<Mat>& elements,
                                       std::string name = {}, double tol = 1e-8);

  const MatrixStarAlgebra& algebra() const { return algebra_; }
  Index carrier_dim() const { return m_; }
  const std::string& name() const { return name_; }
  const std::vector<Mat>& right_action() const { return right_; }
  const std::vector<Mat>& inner_tensor() const { return inner_; }

  /// Matrix of xi -> xi . b on the carrier.
  Mat act(const Mat& b) const;
  Mat act_coefficients(const Vec& c) const;
  Vec act(const Vec& xi, const Mat& b) const { return act(b) * xi; }
  Mat inner(const Vec& xi, const Vec& eta) const;
  Vec inner_coefficients(const Vec& xi, const Vec& eta) const;
  /// <e_i|e_j> for carrier basis vectors.
  Mat basis_inner(Index i, Index j) const;
  /// |xi|_E = |<xi|xi>|^{1/2}.
  double norm(const Vec& xi) const;

  const Mat& metric() const { return metric_; }
  const Mat& frame() const { return frame_; }
  const Mat& frame_inverse() const { return frame_inv_; }
  Mat to_frame(const Mat& raw) const { return frame_ * raw * frame_inv_; }
  Mat from_frame(const Mat& f) const { return frame_inv_ * f * frame_; }
  /// Adjoint of a raw operator for the scalar product: T^-1 a^* T.
  Mat adjoint(const Mat& raw) const;
  /// Raw matrix of zeta -> eta <xi|zeta>.
  Mat theta(const Vec& eta, const Vec& xi) const;

 private:
  MatrixStarAlgebra algebra_;
  Index m_ = 0;
  std::vector<Mat> right_;
  std::vector<Mat> inner_;
  std::string name_;
  Mat metric_, frame_, frame_inv_;
};

/// tau(b) = trace(b) / N on an algebra of N x N matrices.
cplx normalized_trace(const Mat& b);

/// B over itself, carrier coordinates = coefficients in B's basis.
FDHilbertModule standard_module(const MatrixStarAlgebra& b);
/// C(X, C^d) over C(X): carrier index x d + i, <xi|eta>(x) = <xi(x)|eta(x)>.
FDHilbertModule function_module(const EquivariantSystem& sys);
/// C^n over C.
FDHilbertModule hilbert_space(Index n);
FDHilbertModule zero_module(const MatrixStarAlgebra& b);

struct ModuleAxioms {
  int pairs = 0;
  double linearity = 0.0;
  double conjugate_linearity = 0.0;
  double right_linearity = 0.0;
  /// (xi a) b - xi (ab).
  double right_action = 0.0;
  /// <xi b1|eta b2> - b1^* <xi|eta> b2.
  double compatibility = 0.0;
  /// <eta|xi> - <xi|eta>^*.
  double hermitian = 0.0;
  /// Most negative eigenvalue of <xi|xi> relative to |xi|^2 (0 when positive).
  double positivity = 0.0;
  /// Smallest eigenvalue of the scalar-product metric relative to its largest.
  double definiteness = 0.0;
  /// Most negative eigenvalue of |xi|^2 <eta|eta> - <eta|xi><xi|eta>, relative.
  double cauchy_schwarz = 0.0;
  bool ok(double tol = 1e-9) const;
};

ModuleAxioms module_axioms(const FDHilbertModule& e, int pairs = 100, std::uint64_t seed = 0);
/// Module norm against the algebra norm for standard_module(B).
double standard_norm_mismatch(const MatrixStarAlgebra& b, int samples = 20, std::uint64_t seed = 0);

/// Raw trace-orthonormal basis of span{theta_{e_i, e_j}}.
MatrixStarAlgebra compact_span_raw(const FDHilbertModule& e, double tol = kDefaultTol);
/// K_B(E) in frame coordinates, a *-algebra of m x m matrices.
MatrixStarAlgebra compact_operators(const FDHilbertModule& e, double tol = kDefaultTol);
/// Raw B-linear operators: {a : a R_k = R_k a for all k}.
MatrixStarAlgebra module_maps_raw(const FDHilbertModule& e, double tol = kDefaultTol);
/// Largest residual of <a xi|eta> - <xi|a^dagger eta> over module maps and basis pairs.
double adjointability_residual(const FDHilbertModule& e, double tol = kDefaultTol);

/// span{<xi|eta>}; throws NumericError if the span fails to be an ideal.
MatrixStarAlgebra fullness_ideal(const FDHilbertModule& e, double tol = kDefaultTol);
bool is_full(const FDHilbertModule& e, double tol = kDefaultTol);

/// The same carrier over an algebra C through a *-isomorphism sigma from C
/// onto a subalgebra of B containing every inner product; images[j] =
/// sigma(c_j). Restriction to an ideal J is transport(e, J, J.basis()).
FDHilbertModule transport(const FDHilbertModule& e, const MatrixStarAlgebra& c, const std::vector<Mat>& images,
                          double tol = 1e-8);

struct EquivariantModule {
  FDHilbertModule base;
  StarAction beta;
  /// gamma_w on the carrier.
  std::vector<Mat> gamma;
};

struct EquivarianceResiduals {
  double compatibility = 0.0;  ///< gamma_w(xi b) - gamma_w(xi) beta_w(b)
  double inner = 0.0;          ///< <gamma_w xi|gamma_w eta> - beta_w<xi|eta>
  double homomorphism = 0.0;   ///< gamma_u gamma_v - gamma_uv
  double max() const;
};
EquivarianceResiduals equivariance_residuals(const EquivariantModule& eq);

/// function_module(sys) with gamma_w = U_w and beta the translation action on C(X).
EquivariantModule equivariant_function_module(const EquivariantSystem& sys);
/// A module with W acting trivially.
EquivariantModule trivially_equivariant(const FDHilbertModule& e, const FiniteGroup& g);

/// E x| W over B x| W: carrier index w m + i, xi w . b u = xi beta_w(b) wu and
/// <xi1 w1|xi2 w2> = w1^-1 <xi1|xi2> w2.
struct CrossedModule {
  CrossedProduct crossed;
  FDHilbertModule module;
};
CrossedModule module_crossed_product(const EquivariantModule& eq, double tol = kDefaultTol);
/// Raw operators of K_B(E) x| W on E x| W: k u sends xi w to (k gamma_u xi) uw.
std::vector<Mat> crossed_compacts_raw(const EquivariantModule& eq, double tol = kDefaultTol);
/// Span distance between K_{B x| W}(E x| W) and the image of K_B(E) x| W.
double crossed_compacts_residual(const EquivariantModule& eq, double tol = kDefaultTol);

/// E over B x| W with xi . b w = gamma_{w^-1}(xi b) and
/// <<xi|eta>> = sum_w <xi|gamma_w eta> w.
struct GreenJulgModule {
  CrossedProduct crossed;
  FDHilbertModule module;
};
GreenJulgModule green_julg_module(const EquivariantModule& eq, double tol = kDefaultTol);

/// Raw K_B(E)^W: compact operators commuting with every gamma_w.
MatrixStarAlgebra invariant_compacts_raw(const EquivariantModule& eq, double tol = kDefaultTol);

struct GreenJulgVerdict {
  bool pass = false;
  Index dim_crossed_compacts = 0;  ///< dim K_{B x| W}(E)
  Index dim_invariant = 0;         ///< dim K_B(E)^W
  double residual = 0.0;
  ModuleAxioms axioms;
};
GreenJulgVerdict verify_green_julg(const EquivariantModule& eq, double tol = 1e-8);

struct NormBounds {
  int samples = 0;
  double min_ratio = 0.0;  ///< min |xi|^2_GJ / |xi|^2
  double max_ratio = 0.0;
  int group_order = 1;
  bool ok(double tol = 1e-9) const;
};
/// |xi|^2 <= |<<xi|xi>>| <= |W| |xi|^2 on random xi.
NormBounds green_julg_norm_bounds(const EquivariantModule& eq, int samples = 100, std::uint64_t seed = 0);

struct MoritaWitness {
  MatrixStarAlgebra a;
  FDHilbertModule module;
  /// Raw operators on the carrier: iota(a_k) for every basis element of A.
  std::vector<Mat> images;
  IsomorphismReport report;
  Index blocks_a = 0;
  Index blocks_b = 0;
  const MatrixStarAlgebra& b() const { return module.algebra(); }
};

struct MoritaVerdict {
  bool ok = false;
  std::optional<MoritaWitness> witness;
  std::string reason;
  Index fullness_dim = 0;
  std::vector<Index> blocks_a;
  std::vector<Index> blocks_k;
};

/// Checks that E is full over B and that A is *-isomorphic to K_B(E): through
/// `images` when given, else through A acting on the carrier directly when
/// shapes allow, else through a matching of Wedderburn blocks.
MoritaVerdict verify_morita(const MatrixStarAlgebra& a, const FDHilbertModule& e, const std::vector<Mat>& images = {},
                            std::uint64_t seed = 0, double tol = 1e-8);

/// The dual K_B(E, B) over K_B(E): carrier coordinates are complex conjugates
/// of E's, with right action conj(T^dagger) and <<k|l>> = k^* l. B acts on the
/// left through left_action[k] = conj(R(b_k^*)).
struct DualModule {
  FDHilbertModule module;
  std::vector<Mat> left_action;
};
DualModule dual_module(const FDHilbertModule& e, double tol = kDefaultTol);
/// Residual of the double dual against E: right actions and inner products
/// compared through B = K(dual).
double double_dual_residual(const FDHilbertModule& e, double tol = kDefaultTol);

FDHilbertModule direct_sum_modules(const std::vector<FDHilbertModule>& parts);
MoritaVerdict direct_sum_morita(const std::vector<MoritaWitness>& parts, std::uint64_t seed = 0, double tol = 1e-8);

/// E (x)_psi F over C for E over B and psi: B -> L(F) given on B's basis by
/// raw operators on F. Null vectors are divided out; compression maps the
/// quotient coordinates into C^{m_E} (x) C^{m_F} (index i m_F + j).
struct TensorModule {
  FDHilbertModule module;
  Mat compression;
  Index right_dim = 0;
  /// Raw operator a (x) 1 on the quotient, for a raw module map a of E.
  Mat left(const Mat& a) const;
};
TensorModule interior_tensor(const FDHilbertModule& e, const FDHilbertModule& f, const std::vector<Mat>& psi,
                             double tol = kDefaultTol);

}  // namespace equivaria

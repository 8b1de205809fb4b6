// Irreducible representations of C(X, K(H))^W, parametrized by an orbit
// representative x and an irrep rho of the stabilizer W_x occurring in I_x.
#pragma once

#include "equivaria/equivariant.hpp"

#include <functional>
#include <string>
#include <vector>

namespace equivaria {

struct OrbitInfo {
  std::vector<int> points;
  /// Lowest point index of the orbit.
  int representative = 0;
  /// Stabilizer of the representative, as parent element indices.
  std::vector<int> stabilizer;
};

std::vector<OrbitInfo> orbits_and_stabilizers(const EquivariantSystem& sys);

/// The representation w -> I_{w,x} of the stabilizer of x.
UnitaryRep stabilizer_rep(const EquivariantSystem& sys, int x, const Subgroup& stab);

struct SpectrumEntry {
  size_t orbit = 0;
  int representative = 0;
  Subgroup stabilizer;
  int irrep_index = 0;
  UnitaryRep irrep;
  /// dim HS(rho, I_x)^{W_x}.
  Index dim = 0;
  /// Orthonormal basis s_1..s_dim of HS(rho, I_x)^{W_x}, each d x dim(rho).
  std::vector<Mat> maps;
};

struct SpectrumDescription {
  std::vector<OrbitInfo> orbits;
  std::vector<SpectrumEntry> entries;

  std::vector<Index> dims() const;
};

SpectrumDescription classify_irreps(const EquivariantSystem& sys, std::uint64_t seed = 0, double tol = kDefaultTol);

struct RealizedIrrep {
  /// pi(b_k) for every basis element b_k of the fixed-point algebra.
  std::vector<Mat> images;
  double multiplicative = 0.0;
  double star = 0.0;
  Index commutant_dim = 0;
  bool irreducible() const { return commutant_dim == 1; }
};

/// pi_{x,rho}(k) s = k(x) s on HS(rho, I_x)^{W_x}: matrix entries trace(s_i^* k(x) s_j).
RealizedIrrep realize_irrep(const EquivariantSystem& sys, const MatrixStarAlgebra& fixed, const SpectrumEntry& entry,
                            double tol = kDefaultTol);

struct CrosscheckVerdict {
  bool pass = false;
  Index algebra_dim = 0;
  Index sum_of_squares = 0;
  std::vector<Index> classified;  ///< sorted dims from classify_irreps
  std::vector<Index> blocks;      ///< sorted block sizes from block_decompose
  /// Rank of k -> (+)_entries pi_e(k) on the fixed-point algebra.
  Index realization_rank = 0;
  bool all_irreducible = false;
  std::string diff;
};

/// Compares classify_irreps against the Wedderburn blocks of the fixed-point algebra.
CrosscheckVerdict wedderburn_crosscheck(const EquivariantSystem& sys, std::uint64_t seed = 0, double tol = kDefaultTol);

/// theta: s -> I_{w,x} s carries the canonical entry to the one built at w.x
/// with the conjugate irrep v -> rho(w^-1 v w).
struct ConjugationCheck {
  int moved_point = 0;
  int matched_irrep = -1;
  Index moved_dim = 0;
  double equivariance = 0.0;
  double unitarity = 0.0;
  double intertwining = 0.0;
  bool ok(const SpectrumEntry& entry, double tol) const;
};
ConjugationCheck conjugation_check(const EquivariantSystem& sys, const MatrixStarAlgebra& fixed, const SpectrumEntry& entry,
                                   int w, std::uint64_t seed = 0, double tol = kDefaultTol);

/// ev_x maps the fixed-point algebra onto K(H)^{W_x}; every T in K(H)^{W_x}
/// is hit by f = (1/|W_x|) sum_w alpha_w(h T) with h the indicator of x.
struct SurjectivityCheck {
  Index target_dim = 0;
  Index image_dim = 0;
  double averaging_residual = 0.0;
  bool ok(double tol) const { return target_dim == image_dim && averaging_residual < tol; }
};
SurjectivityCheck evaluation_surjectivity(const EquivariantSystem& sys, const MatrixStarAlgebra& fixed, int x,
                                          double tol = kDefaultTol);

/// A Z/2 system over the interval [-half_width, half_width] with x -> -x and
/// a closed-form cocycle c(x) = I_{s,x} for the nontrivial element s.
struct Z2Family {
  std::string name;
  double half_width = 1.0;
  Index fiber_dim = 1;
  std::function<Mat(double)> cocycle;
};

/// c(x) = diag(e^{ix}, -e^{-ix}).
Z2Family z2_line_family();
/// c(x) = diag(1, -1) for every x.
Z2Family constant_family();

/// x_k = 1 / 2^k for k = 1..count: the terms n = 2^k of the sequence 1/n.
std::vector<double> dyadic_reciprocals(int count = 32);
/// x_n = 1 / n for n = 1..count.
std::vector<double> reciprocals(int count = 32);

struct LimitCertificate {
  std::string family;
  std::vector<double> sequence;
  double limit_point = 0.0;
  std::string irrep_label;
  std::vector<double> residuals;
  double scale = 1.0;
  bool accepted = false;
  std::string reason;
};

/// Matrix-coefficient test for pi_{x_n} -> pi_{x0,rho} with rho one-dimensional:
/// xi0 spans the rho-isotypic line of I_{x0}, and <xi0 | k(x_n) xi0> must
/// approach <xi0 | k(x0) xi0> for W-averaged hat functions times matrix units.
/// Accepts iff the last `tail` residuals are below threshold * scale.
/// Throws Error when rho has dimension > 1 or its isotypic part is not a line.
LimitCertificate fell_limit_certificate(const Z2Family& family, const std::vector<double>& sequence, double x0,
                                        int irrep_index, int tail = 8, double threshold = 1e-6, double hat_width = 0.25);

}  // namespace equivaria

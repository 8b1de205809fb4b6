#include "equivaria/equivariant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace equivaria {

EquivariantSystem::EquivariantSystem(FiniteGroup group, std::vector<std::string> points,
                                     std::vector<std::vector<int>> action, Index fiber_dim,
                                     std::vector<std::vector<Mat>> cocycles, std::string name, double tol)
    : group_(std::move(group)),
      points_(std::move(points)),
      action_(std::move(action)),
      d_(fiber_dim),
      cocycle_(std::move(cocycles)),
      name_(std::move(name)) {
  const int nw = group_.order();
  const int nx = num_points();
  if (d_ <= 0) throw ValidationError("system: fiber dimension must be positive");
  if (static_cast<int>(action_.size()) != nw) throw ValidationError("system: action needs one permutation per group element");
  for (int w = 0; w < nw; ++w) {
    const auto& perm = action_[static_cast<size_t>(w)];
    if (static_cast<int>(perm.size()) != nx) throw ValidationError("system: permutation of wrong length");
    std::vector<char> seen(static_cast<size_t>(nx), 0);
    for (int y : perm) {
      if (y < 0 || y >= nx || seen[static_cast<size_t>(y)]) {
        throw ValidationError("system: action of element " + std::to_string(w) + " is not a permutation");
      }
      seen[static_cast<size_t>(y)] = 1;
    }
  }
  for (int x = 0; x < nx; ++x) {
    if (act(0, x) != x) throw ValidationError("system: identity element moves point " + std::to_string(x));
  }
  for (int a = 0; a < nw; ++a) {
    for (int b = 0; b < nw; ++b) {
      for (int x = 0; x < nx; ++x) {
        if (act(group_.mul(a, b), x) != act(a, act(b, x))) {
          std::ostringstream os;
          os << "system: action law fails at w1=" << a << ", w2=" << b << ", x=" << x;
          throw ValidationError(os.str());
        }
      }
    }
  }
  if (static_cast<int>(cocycle_.size()) != nw) throw ValidationError("system: cocycle needs one entry per group element");
  const Mat id = Mat::Identity(d_, d_);
  for (int w = 0; w < nw; ++w) {
    if (static_cast<int>(cocycle_[static_cast<size_t>(w)].size()) != nx) {
      throw ValidationError("system: cocycle needs one matrix per point");
    }
    for (int x = 0; x < nx; ++x) {
      const Mat& m = cocycle(w, x);
      if (m.rows() != d_ || m.cols() != d_) throw ValidationError("system: cocycle matrix has wrong shape");
      if (frob(m.adjoint() * m - id) > tol * std::sqrt(static_cast<double>(d_))) {
        std::ostringstream os;
        os << "system: cocycle matrix I_{w,x} is not unitary at w=" << w << ", x=" << x;
        throw ValidationError(os.str());
      }
    }
  }
  for (int a = 0; a < nw; ++a) {
    for (int b = 0; b < nw; ++b) {
      for (int x = 0; x < nx; ++x) {
        const Mat lhs = cocycle(a, act(b, x)) * cocycle(b, x);
        if (frob(lhs - cocycle(group_.mul(a, b), x)) > tol * std::sqrt(static_cast<double>(d_))) {
          std::ostringstream os;
          os << "system: cocycle identity I_{w1,w2 x} I_{w2,x} = I_{w1 w2,x} violated at w1=" << a << ", w2=" << b
             << ", x=" << x;
          throw ValidationError(os.str());
        }
      }
    }
  }
}

EquivariantSystem trivial_system(const FiniteGroup& g, int num_points, Index fiber_dim) {
  std::vector<std::string> pts;
  std::vector<int> ident;
  for (int x = 0; x < num_points; ++x) {
    pts.push_back(std::to_string(x));
    ident.push_back(x);
  }
  const auto n = static_cast<size_t>(g.order());
  std::vector<std::vector<int>> action(n, ident);
  std::vector<std::vector<Mat>> cocycle(n, std::vector<Mat>(static_cast<size_t>(num_points), Mat::Identity(fiber_dim, fiber_dim)));
  return EquivariantSystem(g, std::move(pts), std::move(action), fiber_dim, std::move(cocycle), "trivial");
}

Mat z2_line_cocycle(double x) {
  const cplx i(0, 1);
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::exp(i * x);
  m(1, 1) = -std::exp(-i * x);
  return m;
}

EquivariantSystem z2_line(int n) {
  if (n < 0) throw ValidationError("z2_line: n must be nonnegative");
  const int np = 2 * n + 1;
  std::vector<std::string> pts;
  std::vector<int> ident, flip;
  std::vector<Mat> id_row, flip_row;
  for (int k = 0; k < np; ++k) {
    const int x = k - n;
    pts.push_back(std::to_string(x));
    ident.push_back(k);
    flip.push_back(np - 1 - k);
    id_row.push_back(Mat::Identity(2, 2));
    flip_row.push_back(z2_line_cocycle(static_cast<double>(x)));
  }
  return EquivariantSystem(FiniteGroup::cyclic(2), std::move(pts), {ident, flip}, 2, {id_row, flip_row},
                           "z2-line");
}

EquivariantSystem z2z2_line(int n) {
  const EquivariantSystem line = z2_line(n);
  const int np = line.num_points();
  std::vector<std::vector<int>> action;
  std::vector<std::vector<Mat>> cocycle;
  for (int w = 0; w < 4; ++w) {
    const int b = w % 2;
    action.push_back(line.action()[static_cast<size_t>(b)]);
    std::vector<Mat> row;
    for (int x = 0; x < np; ++x) row.push_back(line.cocycle(b, x));
    cocycle.push_back(std::move(row));
  }
  return EquivariantSystem(FiniteGroup::klein_four(), line.points(), std::move(action), 2, std::move(cocycle),
                           "z2z2-line");
}

EquivariantSystem dihedral_plane(int m) {
  if (m < 0) throw ValidationError("dihedral_plane: m must be nonnegative");
  const MatrixGroup sq = square_symmetries();
  const int side = 2 * m + 1;
  std::vector<std::string> pts;
  for (int i = -m; i <= m; ++i) {
    for (int j = -m; j <= m; ++j) pts.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  auto index_of = [&](int i, int j) { return (i + m) * side + (j + m); };
  std::vector<std::vector<int>> action;
  std::vector<std::vector<Mat>> cocycle;
  for (const Mat& w : sq.elements) {
    std::vector<int> perm;
    for (int i = -m; i <= m; ++i) {
      for (int j = -m; j <= m; ++j) {
        const double ni = w(0, 0).real() * i + w(0, 1).real() * j;
        const double nj = w(1, 0).real() * i + w(1, 1).real() * j;
        perm.push_back(index_of(static_cast<int>(std::lround(ni)), static_cast<int>(std::lround(nj))));
      }
    }
    action.push_back(std::move(perm));
    cocycle.emplace_back(static_cast<size_t>(side * side), w);
  }
  return EquivariantSystem(sq.group, std::move(pts), std::move(action), 2, std::move(cocycle), "dihedral-plane");
}

EquivariantSystem point_system(const UnitaryRep& pi, std::string name) {
  std::vector<std::vector<int>> action(static_cast<size_t>(pi.group.order()), std::vector<int>{0});
  std::vector<std::vector<Mat>> cocycle;
  for (const Mat& m : pi.matrices) cocycle.push_back({m});
  return EquivariantSystem(pi.group, {"0"}, std::move(action), pi.dim(), std::move(cocycle), std::move(name));
}

EquivariantSystem regular_point(const FiniteGroup& g) { return point_system(regular_rep(g), "regular-point"); }

EquivariantSystem anticomplete_point() {
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  UnitaryRep sign{z2, {Mat::Identity(1, 1), -Mat::Identity(1, 1)}, "sign"};
  return point_system(sign, "anticomplete-point");
}

EquivariantSystem left_translation(const EquivariantSystem& sys) {
  const UnitaryRep reg = regular_rep(sys.group());
  std::vector<std::vector<Mat>> cocycle;
  for (int w = 0; w < sys.group().order(); ++w) {
    cocycle.emplace_back(static_cast<size_t>(sys.num_points()), reg(w));
  }
  return EquivariantSystem(sys.group(), sys.points(), sys.action(), sys.group().order(), std::move(cocycle),
                           sys.name() + "/left-translation");
}

EquivariantSystem restrict_system(const EquivariantSystem& sys, const Subgroup& sub) {
  std::vector<std::vector<int>> action;
  std::vector<std::vector<Mat>> cocycle;
  for (int p : sub.to_parent) {
    action.push_back(sys.action()[static_cast<size_t>(p)]);
    cocycle.push_back(sys.cocycle()[static_cast<size_t>(p)]);
  }
  return EquivariantSystem(sub.group, sys.points(), std::move(action), sys.fiber_dim(), std::move(cocycle), sys.name());
}

EquivariantSystem scalar_shadow(const EquivariantSystem& sys) {
  std::vector<std::vector<Mat>> cocycle(static_cast<size_t>(sys.group().order()),
                                        std::vector<Mat>(static_cast<size_t>(sys.num_points()), Mat::Identity(1, 1)));
  return EquivariantSystem(sys.group(), sys.points(), sys.action(), 1, std::move(cocycle), sys.name() + "/scalar");
}

EquivariantSystem free_orbit(const FiniteGroup& g) {
  std::vector<std::string> pts;
  std::vector<std::vector<int>> action;
  for (int x = 0; x < g.order(); ++x) pts.push_back(std::to_string(x));
  for (int w = 0; w < g.order(); ++w) {
    std::vector<int> perm;
    for (int x = 0; x < g.order(); ++x) perm.push_back(g.mul(w, x));
    action.push_back(std::move(perm));
  }
  std::vector<std::vector<Mat>> cocycle(static_cast<size_t>(g.order()),
                                        std::vector<Mat>(static_cast<size_t>(g.order()), Mat::Identity(1, 1)));
  return EquivariantSystem(g, std::move(pts), std::move(action), 1, std::move(cocycle), "free-orbit");
}

Mat function_element(const EquivariantSystem& sys, const std::vector<Mat>& values) {
  if (static_cast<int>(values.size()) != sys.num_points()) throw Error("function_element: one value per point required");
  const Index d = sys.fiber_dim();
  Mat k = Mat::Zero(sys.total_dim(), sys.total_dim());
  for (int x = 0; x < sys.num_points(); ++x) k.block(x * d, x * d, d, d) = values[static_cast<size_t>(x)];
  return k;
}

std::vector<Mat> function_values(const EquivariantSystem& sys, const Mat& k) {
  const Index d = sys.fiber_dim();
  std::vector<Mat> out;
  for (int x = 0; x < sys.num_points(); ++x) out.push_back(k.block(x * d, x * d, d, d));
  return out;
}

MatrixStarAlgebra function_algebra(const EquivariantSystem& sys) {
  const Index d = sys.fiber_dim(), n = sys.total_dim();
  std::vector<Mat> basis;
  for (int x = 0; x < sys.num_points(); ++x) {
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < d; ++i) {
        Mat e = Mat::Zero(n, n);
        e(x * d + i, x * d + j) = 1.0;
        basis.push_back(std::move(e));
      }
    }
  }
  return MatrixStarAlgebra::from_orthonormal(n, std::move(basis));
}

Mat implementing_unitary(const EquivariantSystem& sys, int w) {
  const Index d = sys.fiber_dim();
  Mat u = Mat::Zero(sys.total_dim(), sys.total_dim());
  for (int x = 0; x < sys.num_points(); ++x) u.block(sys.act(w, x) * d, x * d, d, d) = sys.cocycle(w, x);
  return u;
}

Mat alpha(const EquivariantSystem& sys, int w, const Mat& k) {
  const Index d = sys.fiber_dim();
  Mat out = Mat::Zero(k.rows(), k.cols());
  for (int y = 0; y < sys.num_points(); ++y) {
    // Point y is carried to w.y with conjugation by I_{w,y}.
    const int x = sys.act(w, y);
    const Mat& c = sys.cocycle(w, y);
    out.block(x * d, x * d, d, d) = c * k.block(y * d, y * d, d, d) * c.adjoint();
  }
  return out;
}

namespace {

// Coordinates of a block-diagonal function in the matrix-unit basis of
// function_algebra: index x d^2 + j d + i holds k(x)_{ij}.
Vec function_coordinates(const EquivariantSystem& sys, const Mat& k) {
  const Index d = sys.fiber_dim();
  Vec c(sys.num_points() * d * d);
  for (int x = 0; x < sys.num_points(); ++x) {
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < d; ++i) c(x * d * d + j * d + i) = k(x * d + i, x * d + j);
    }
  }
  return c;
}

Mat alpha_matrix(const EquivariantSystem& sys, int w, const MatrixStarAlgebra& f) {
  Mat m(f.dim(), f.dim());
  for (Index k = 0; k < f.dim(); ++k) m.col(k) = function_coordinates(sys, alpha(sys, w, f.basis(k)));
  return m;
}

}  // namespace

MatrixStarAlgebra fixed_point_algebra(const EquivariantSystem& sys, double tol) {
  const MatrixStarAlgebra f = function_algebra(sys);
  Mat gram = Mat::Zero(f.dim(), f.dim());
  const Mat id = Mat::Identity(f.dim(), f.dim());
  for (int w : sys.group().generators()) {
    const Mat k = alpha_matrix(sys, w, f) - id;
    gram += k.adjoint() * k;
  }
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> basis;
  for (Index j = 0; j < null.cols(); ++j) basis.push_back(f.element(null.col(j)));
  return MatrixStarAlgebra::from_orthonormal(f.ambient_dim(), std::move(basis));
}

MatrixStarAlgebra fixed_point_algebra_by_commutant(const EquivariantSystem& sys, double tol) {
  std::vector<Mat> us;
  for (int w : sys.group().generators()) us.push_back(implementing_unitary(sys, w));
  return commutant_within(function_algebra(sys), us, tol);
}

std::vector<std::vector<int>> orbits(const EquivariantSystem& sys) {
  std::vector<char> seen(static_cast<size_t>(sys.num_points()), 0);
  std::vector<std::vector<int>> out;
  for (int x = 0; x < sys.num_points(); ++x) {
    if (seen[static_cast<size_t>(x)]) continue;
    std::set<int> orbit;
    for (int w = 0; w < sys.group().order(); ++w) orbit.insert(sys.act(w, x));
    for (int y : orbit) seen[static_cast<size_t>(y)] = 1;
    out.emplace_back(orbit.begin(), orbit.end());
  }
  return out;
}

std::vector<int> stabilizer(const EquivariantSystem& sys, int x) {
  std::vector<int> out;
  for (int w = 0; w < sys.group().order(); ++w) {
    if (sys.act(w, x) == x) out.push_back(w);
  }
  return out;
}

Mat StarAction::apply(int w, const Mat& b) const {
  return algebra.element(maps[static_cast<size_t>(w)] * algebra.coefficients(b));
}

StarAction action_from_maps(const MatrixStarAlgebra& b, const FiniteGroup& g,
                            const std::function<Mat(int, const Mat&)>& beta) {
  StarAction act{b, g, {}};
  for (int w = 0; w < g.order(); ++w) {
    Mat m(b.dim(), b.dim());
    for (Index k = 0; k < b.dim(); ++k) m.col(k) = b.coefficients(beta(w, b.basis(k)));
    act.maps.push_back(std::move(m));
  }
  return act;
}

StarAction action_from_unitaries(const MatrixStarAlgebra& b, const FiniteGroup& g, const std::vector<Mat>& unitaries) {
  if (static_cast<int>(unitaries.size()) != g.order()) throw Error("action_from_unitaries: one unitary per element");
  return action_from_maps(b, g, [&](int w, const Mat& x) {
    const Mat& u = unitaries[static_cast<size_t>(w)];
    return Mat(u * x * u.adjoint());
  });
}

StarAction function_action(const EquivariantSystem& sys) {
  const MatrixStarAlgebra f = function_algebra(sys);
  StarAction act{f, sys.group(), {}};
  for (int w = 0; w < sys.group().order(); ++w) act.maps.push_back(alpha_matrix(sys, w, f));
  return act;
}

StarAction restrict_action(const StarAction& act, const Subgroup& sub) {
  StarAction out{act.algebra, sub.group, {}};
  for (int p : sub.to_parent) out.maps.push_back(act.maps[static_cast<size_t>(p)]);
  return out;
}

double ActionResiduals::max() const { return std::max({homomorphism, multiplicative, star, identity}); }

ActionResiduals action_residuals(const StarAction& act) {
  ActionResiduals r;
  const Index k = act.algebra.dim();
  const FiniteGroup& g = act.group;
  if (static_cast<int>(act.maps.size()) != g.order()) throw ValidationError("action: one map per group element required");
  r.identity = frob(act.maps[0] - Mat::Identity(k, k));
  for (int a = 0; a < g.order(); ++a) {
    for (int b = 0; b < g.order(); ++b) {
      r.homomorphism = std::max(r.homomorphism, frob(act.maps[static_cast<size_t>(g.mul(a, b))] -
                                                     act.maps[static_cast<size_t>(a)] * act.maps[static_cast<size_t>(b)]));
    }
  }
  // Products are checked on a few seeded random pairs per generator, plus
  // every basis pair for small algebras.
  Rng rng(0);
  std::vector<std::pair<Mat, Mat>> pairs;
  if (k <= 16) {
    for (const Mat& x : act.algebra.basis()) {
      for (const Mat& y : act.algebra.basis()) pairs.emplace_back(x, y);
    }
  }
  for (int t = 0; t < 4 && k > 0; ++t) {
    pairs.emplace_back(act.algebra.element(random_gaussian(k, 1, rng)), act.algebra.element(random_gaussian(k, 1, rng)));
  }
  for (int w : g.generators()) {
    for (const auto& [x, y] : pairs) {
      const double s = std::max(1.0, frob(x) * frob(y));
      r.multiplicative = std::max(r.multiplicative, frob(act.apply(w, x * y) - act.apply(w, x) * act.apply(w, y)) / s);
      r.star = std::max(r.star, frob(act.apply(w, x.adjoint()) - act.apply(w, x).adjoint()) / std::max(1.0, frob(x)));
    }
  }
  return r;
}

void validate_action(const StarAction& act, double tol) {
  const ActionResiduals r = action_residuals(act);
  if (r.identity > tol) throw ValidationError("action: identity element does not act trivially");
  if (r.homomorphism > tol) throw ValidationError("action: beta_{w1 w2} != beta_{w1} beta_{w2}");
  if (r.multiplicative > tol) throw ValidationError("action: beta_w is not multiplicative");
  if (r.star > tol) throw ValidationError("action: beta_w does not preserve adjoints");
}

CrossedCoefficients crossed_multiply(const StarAction& act, const CrossedCoefficients& f, const CrossedCoefficients& g) {
  const FiniteGroup& grp = act.group;
  const Index n = act.algebra.ambient_dim();
  CrossedCoefficients out(static_cast<size_t>(grp.order()), Mat::Zero(n, n));
  for (int w = 0; w < grp.order(); ++w) {
    for (int v = 0; v < grp.order(); ++v) {
      out[static_cast<size_t>(grp.mul(w, v))] += f[static_cast<size_t>(w)] * act.apply(w, g[static_cast<size_t>(v)]);
    }
  }
  return out;
}

CrossedCoefficients crossed_adjoint(const StarAction& act, const CrossedCoefficients& f) {
  const FiniteGroup& grp = act.group;
  CrossedCoefficients out(f.size());
  for (int w = 0; w < grp.order(); ++w) {
    const int wi = grp.inv(w);
    out[static_cast<size_t>(wi)] = act.apply(wi, f[static_cast<size_t>(w)].adjoint());
  }
  return out;
}

CrossedProduct::CrossedProduct(StarAction action, double tol) : action_(std::move(action)) {
  validate_action(action_, 1e-8);
  algebra_ = MatrixStarAlgebra::span_of(group().order() * base().ambient_dim(), term_images(), tol);
}

Mat CrossedProduct::embed(const CrossedCoefficients& f) const {
  const FiniteGroup& g = group();
  const Index n = base().ambient_dim();
  if (static_cast<int>(f.size()) != g.order()) throw Error("CrossedProduct::embed: one coefficient per element");
  Mat out = Mat::Zero(g.order() * n, g.order() * n);
  for (int u = 0; u < g.order(); ++u) {
    for (int v = 0; v < g.order(); ++v) {
      const Mat& c = f[static_cast<size_t>(g.mul(u, g.inv(v)))];
      if (c.size() == 0 || c.isZero(0.0)) continue;
      out.block(u * n, v * n, n, n) = action_.apply(g.inv(u), c);
    }
  }
  return out;
}

Mat CrossedProduct::embed_term(const Mat& b, int w) const {
  const Index n = base().ambient_dim();
  CrossedCoefficients f(static_cast<size_t>(group().order()), Mat::Zero(n, n));
  f[static_cast<size_t>(w)] = b;
  return embed(f);
}

CrossedCoefficients CrossedProduct::coefficients(const Mat& x) const {
  const Index n = base().ambient_dim();
  CrossedCoefficients f;
  for (int w = 0; w < group().order(); ++w) f.push_back(action_.apply(w, x.block(w * n, 0, n, n)));
  return f;
}

std::vector<Mat> CrossedProduct::term_images() const {
  std::vector<Mat> out;
  for (int w = 0; w < group().order(); ++w) {
    for (const Mat& b : base().basis()) out.push_back(embed_term(b, w));
  }
  return out;
}

IsomorphismReport check_isomorphism(const std::vector<Mat>& source, const std::vector<Mat>& images,
                                    const MatrixStarAlgebra& target, double tol) {
  IsomorphismReport r;
  const HomomorphismResiduals h = star_homomorphism_residuals(source, images, tol);
  r.source_dim = h.source_rank;
  r.image_rank = h.image_rank;
  r.target_dim = target.dim();
  r.multiplicative = h.multiplicative;
  r.star = h.star;
  for (const Mat& im : images) r.onto = std::max(r.onto, target.residual(im) / std::max(1.0, frob(im)));
  r.bijective = h.source_rank == h.image_rank && h.image_rank == target.dim();
  return r;
}

Mat phi_term(const EquivariantSystem& scalar, const std::vector<cplx>& f, int w) {
  const FiniteGroup& g = scalar.group();
  const int nw = g.order();
  std::vector<Mat> values;
  for (int x = 0; x < scalar.num_points(); ++x) {
    Mat m = Mat::Zero(nw, nw);
    for (int v = 0; v < nw; ++v) {
      const int y = scalar.act(g.mul(w, g.inv(v)), x);
      m(g.mul(v, g.inv(w)), v) = f[static_cast<size_t>(y)];
    }
    values.push_back(std::move(m));
  }
  Mat out = Mat::Zero(scalar.num_points() * nw, scalar.num_points() * nw);
  for (int x = 0; x < scalar.num_points(); ++x) out.block(x * nw, x * nw, nw, nw) = values[static_cast<size_t>(x)];
  return out;
}

PhiIso phi_iso(const EquivariantSystem& sys, double tol) {
  EquivariantSystem scalar = scalar_shadow(sys);
  EquivariantSystem translated = left_translation(scalar);
  CrossedProduct source(function_action(scalar), tol);
  MatrixStarAlgebra target = fixed_point_algebra(translated, tol);
  std::vector<Mat> terms, images;
  const int nx = scalar.num_points();
  for (int w = 0; w < scalar.group().order(); ++w) {
    for (int x = 0; x < nx; ++x) {
      std::vector<cplx> delta(static_cast<size_t>(nx), 0.0);
      delta[static_cast<size_t>(x)] = 1.0;
      Mat b = Mat::Zero(nx, nx);
      b(x, x) = 1.0;
      terms.push_back(source.embed_term(b, w));
      images.push_back(phi_term(scalar, delta, w));
    }
  }
  IsomorphismReport report = check_isomorphism(terms, images, target, tol);
  return PhiIso{std::move(scalar), std::move(translated), std::move(source), std::move(target),
                std::move(terms), std::move(images), report};
}

StarAction conjugation_action(const StarAction& beta, const CrossedProduct& inner, const Subgroup& u, const Subgroup& v) {
  const FiniteGroup& w = beta.group;
  std::map<int, int> local_u;
  for (size_t i = 0; i < u.to_parent.size(); ++i) local_u[u.to_parent[i]] = static_cast<int>(i);
  return action_from_maps(inner.algebra(), v.group, [&](int vl, const Mat& x) {
    const int vp = v.to_parent[static_cast<size_t>(vl)];
    const CrossedCoefficients f = inner.coefficients(x);
    CrossedCoefficients g(f.size());
    for (size_t ul = 0; ul < f.size(); ++ul) {
      const int conj = w.mul(vp, w.mul(u.to_parent[ul], w.inv(vp)));
      g[static_cast<size_t>(local_u.at(conj))] = beta.apply(vp, f[ul]);
    }
    return inner.embed(g);
  });
}

IteratedIso iterated_crossed_iso(const StarAction& beta, const std::vector<int>& u_elems, const std::vector<int>& v_elems,
                                 double tol) {
  const FiniteGroup& w = beta.group;
  Subgroup u = make_subgroup(w, u_elems);
  Subgroup v = make_subgroup(w, v_elems);
  if (!is_normal_subgroup(w, u.to_parent)) throw ValidationError("iterated_crossed_iso: U is not normal in W");
  std::set<int> products;
  for (int a : u.to_parent) {
    for (int b : v.to_parent) products.insert(w.mul(a, b));
  }
  if (static_cast<int>(products.size()) != w.order() || u.group.order() * v.group.order() != w.order()) {
    throw ValidationError("iterated_crossed_iso: U x| V != W");
  }
  CrossedProduct inner(restrict_action(beta, u), tol);
  CrossedProduct outer(conjugation_action(beta, inner, u, v), tol);
  CrossedProduct whole(beta, tol);
  std::vector<Mat> terms, images;
  for (const Mat& b : beta.algebra.basis()) {
    for (int ul = 0; ul < u.group.order(); ++ul) {
      const Mat au = inner.embed_term(b, ul);
      for (int vl = 0; vl < v.group.order(); ++vl) {
        terms.push_back(outer.embed_term(au, vl));
        images.push_back(whole.embed_term(b, w.mul(u.to_parent[static_cast<size_t>(ul)], v.to_parent[static_cast<size_t>(vl)])));
      }
    }
  }
  IsomorphismReport report = check_isomorphism(terms, images, whole.algebra(), tol);
  return IteratedIso{std::move(u), std::move(v), std::move(inner), std::move(outer), std::move(whole),
                     std::move(terms), std::move(images), report};
}

QuotientAlgebra quotient_algebra(const EquivariantSystem& sys, double tol) {
  if (sys.fiber_dim() != 1) throw ValidationError("quotient_algebra: scalar fibers required");
  for (const auto& row : sys.cocycle()) {
    for (const Mat& m : row) {
      if (std::abs(m(0, 0) - 1.0) > 1e-8) throw ValidationError("quotient_algebra: trivial cocycle required");
    }
  }
  QuotientAlgebra q;
  q.fixed = fixed_point_algebra(sys, tol);
  const auto orbs = orbits(sys);
  const Index no = static_cast<Index>(orbs.size());
  q.orbit_functions = diagonal_algebra(no);
  for (Index o = 0; o < no; ++o) {
    Mat ind = Mat::Zero(sys.num_points(), sys.num_points());
    for (int x : orbs[static_cast<size_t>(o)]) ind(x, x) = 1.0;
    q.orbit_indicators.push_back(std::move(ind));
    Mat e = Mat::Zero(no, no);
    e(o, o) = 1.0;
    q.images.push_back(std::move(e));
  }
  q.report = check_isomorphism(q.orbit_indicators, q.images, q.orbit_functions, tol);
  const MatrixStarAlgebra span = MatrixStarAlgebra::span_of(sys.num_points(), q.orbit_indicators, tol);
  q.report.onto = std::max(q.report.onto, span_distance(span, q.fixed));
  q.report.bijective = q.report.bijective && span.dim() == q.fixed.dim();
  return q;
}

}  // namespace equivaria

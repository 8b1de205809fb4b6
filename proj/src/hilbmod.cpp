#include "equivaria/hilbmod.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace equivaria {

namespace {

Mat stack(const std::vector<Mat>& ms, Index rows) {
  Mat q(rows, static_cast<Index>(ms.size()));
  for (size_t k = 0; k < ms.size(); ++k) q.col(static_cast<Index>(k)) = vec(ms[k]);
  return q;
}

Vec unit_vector(Index n, Index i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

double rel(double err, double scale) { return err / std::max(1.0, scale); }

std::string join(const std::vector<Index>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

}  // namespace

cplx normalized_trace(const Mat& b) { return b.rows() == 0 ? cplx(0.0) : b.trace() / static_cast<double>(b.rows()); }

FDHilbertModule::FDHilbertModule(MatrixStarAlgebra algebra, Index carrier_dim, std::vector<Mat> right_action,
                                 std::vector<Mat> inner, std::string name)
    : algebra_(std::move(algebra)),
      m_(carrier_dim),
      right_(std::move(right_action)),
      inner_(std::move(inner)),
      name_(std::move(name)) {
  const size_t k = static_cast<size_t>(algebra_.dim());
  if (right_.size() != k || inner_.size() != k) throw ValidationError("FDHilbertModule: one tensor slice per basis element");
  for (size_t i = 0; i < k; ++i) {
    if (right_[i].rows() != m_ || right_[i].cols() != m_ || inner_[i].rows() != m_ || inner_[i].cols() != m_) {
      throw ValidationError("FDHilbertModule: tensor slices must be carrier_dim x carrier_dim");
    }
  }
  metric_ = Mat::Zero(m_, m_);
  for (size_t i = 0; i < k; ++i) metric_ += normalized_trace(algebra_.basis(static_cast<Index>(i))) * inner_[i];
  metric_ = hermitian_part(metric_);
  if (m_ == 0) {
    frame_ = frame_inv_ = Mat::Zero(0, 0);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(metric_);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-10 * top) {
    throw ValidationError("FDHilbertModule: scalar product tau(<xi|eta>) is degenerate");
  }
  frame_ = sqrt_psd(metric_);
  frame_inv_ = inv_sqrt_pd(metric_);
}

FDHilbertModule FDHilbertModule::from_pairing(MatrixStarAlgebra algebra, Index carrier_dim, std::vector<Mat> right_action,
                                              const std::function<Mat(Index, Index)>& basis_inner, std::string name) {
  const Index k = algebra.dim();
  std::vector<Mat> g(static_cast<size_t>(k), Mat::Zero(carrier_dim, carrier_dim));
  for (Index i = 0; i < carrier_dim; ++i) {
    for (Index j = 0; j < carrier_dim; ++j) {
      const Mat v = basis_inner(i, j);
      const Vec c = algebra.coefficients(v);
      if (algebra.residual(v) > 1e-8 * std::max(1.0, frob(v))) {
        throw ValidationError("FDHilbertModule: inner product leaves the coefficient algebra");
      }
      for (Index l = 0; l < k; ++l) g[static_cast<size_t>(l)](i, j) = c(l);
    }
  }
  return FDHilbertModule(std::move(algebra), carrier_dim, std::move(right_action), std::move(g), std::move(name));
}

FDHilbertModule FDHilbertModule::from_matrices(MatrixStarAlgebra algebra, const std::vector<Mat>& elements,
                                               std::string name, double tol) {
  const Index m = static_cast<Index>(elements.size());
  if (m == 0) return FDHilbertModule(std::move(algebra), 0, {}, {}, std::move(name));
  const Index p = elements.front().rows();
  const Index n = algebra.ambient_dim();
  const Mat q = stack(elements, p * n);
  const auto solver = q.completeOrthogonalDecomposition();
  if (solver.rank() != m) throw ValidationError("FDHilbertModule::from_matrices: elements are linearly dependent");
  std::vector<Mat> right;
  for (const Mat& b : algebra.basis()) {
    Mat r(m, m);
    for (Index i = 0; i < m; ++i) {
      const Vec v = vec(elements[static_cast<size_t>(i)] * b);
      r.col(i) = solver.solve(v);
      if ((q * r.col(i) - v).norm() > tol * std::max(1.0, v.norm())) {
        throw ValidationError("FDHilbertModule::from_matrices: span is not closed under the right action");
      }
    }
    right.push_back(std::move(r));
  }
  return from_pairing(std::move(algebra), m, std::move(right),
                      [&](Index i, Index j) {
                        return Mat(elements[static_cast<size_t>(i)].adjoint() * elements[static_cast<size_t>(j)]);
                      },
                      std::move(name));
}

Mat FDHilbertModule::act_coefficients(const Vec& c) const {
  Mat out = Mat::Zero(m_, m_);
  for (size_t k = 0; k < right_.size(); ++k) out += c(static_cast<Index>(k)) * right_[k];
  return out;
}

Mat FDHilbertModule::act(const Mat& b) const { return act_coefficients(algebra_.coefficients(b)); }

Vec FDHilbertModule::inner_coefficients(const Vec& xi, const Vec& eta) const {
  Vec c(static_cast<Index>(inner_.size()));
  for (size_t k = 0; k < inner_.size(); ++k) c(static_cast<Index>(k)) = xi.dot(inner_[k] * eta);
  return c;
}

Mat FDHilbertModule::inner(const Vec& xi, const Vec& eta) const {
  return algebra_.element(inner_coefficients(xi, eta));
}

Mat FDHilbertModule::basis_inner(Index i, Index j) const {
  Vec c(static_cast<Index>(inner_.size()));
  for (size_t k = 0; k < inner_.size(); ++k) c(static_cast<Index>(k)) = inner_[k](i, j);
  return algebra_.element(c);
}

double FDHilbertModule::norm(const Vec& xi) const { return std::sqrt(operator_norm(inner(xi, xi))); }

Mat FDHilbertModule::adjoint(const Mat& raw) const { return frame_inv_ * frame_inv_ * raw.adjoint() * metric_; }

Mat FDHilbertModule::theta(const Vec& eta, const Vec& xi) const {
  Mat out = Mat::Zero(m_, m_);
  for (size_t k = 0; k < right_.size(); ++k) out += (right_[k] * eta) * (xi.adjoint() * inner_[k]);
  return out;
}

FDHilbertModule standard_module(const MatrixStarAlgebra& b) {
  return FDHilbertModule::from_matrices(b, b.basis(), "standard");
}

FDHilbertModule function_module(const EquivariantSystem& sys) {
  const Index d = sys.fiber_dim();
  const int nx = sys.num_points();
  std::vector<Mat> elems;
  for (int x = 0; x < nx; ++x) {
    for (Index i = 0; i < d; ++i) {
      Mat e = Mat::Zero(sys.total_dim(), nx);
      e(x * d + i, x) = 1.0;
      elems.push_back(std::move(e));
    }
  }
  return FDHilbertModule::from_matrices(function_algebra(scalar_shadow(sys)), elems, "function-module");
}

FDHilbertModule hilbert_space(Index n) {
  std::vector<Mat> elems;
  for (Index i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n, 1);
    e(i, 0) = 1.0;
    elems.push_back(std::move(e));
  }
  if (n == 0) return zero_module(full_matrix_algebra(1));
  return FDHilbertModule::from_matrices(full_matrix_algebra(1), elems, "hilbert-space");
}

FDHilbertModule zero_module(const MatrixStarAlgebra& b) {
  return FDHilbertModule(b, 0, std::vector<Mat>(static_cast<size_t>(b.dim()), Mat::Zero(0, 0)),
                         std::vector<Mat>(static_cast<size_t>(b.dim()), Mat::Zero(0, 0)), "zero");
}

bool ModuleAxioms::ok(double tol) const {
  return std::max({linearity, conjugate_linearity, right_linearity, right_action, compatibility, hermitian, positivity,
                   cauchy_schwarz}) < tol &&
         definiteness > 0.0;
}

ModuleAxioms module_axioms(const FDHilbertModule& e, int pairs, std::uint64_t seed) {
  ModuleAxioms r;
  const Index m = e.carrier_dim();
  if (m == 0) {
    r.definiteness = 1.0;
    return r;
  }
  const MatrixStarAlgebra& b = e.algebra();
  Rng rng(seed);
  auto rvec = [&] { return Vec(random_gaussian(m, 1, rng).col(0)); };
  auto relem = [&] { return b.element(random_gaussian(b.dim(), 1, rng).col(0)); };
  auto rscalar = [&] { return random_gaussian(1, 1, rng)(0, 0); };
  Eigen::SelfAdjointEigenSolver<Mat> es(e.metric());
  r.definiteness = es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
  for (int p = 0; p < pairs; ++p) {
    ++r.pairs;
    const Vec xi = rvec(), eta = rvec(), zeta = rvec();
    const Mat b1 = relem(), b2 = relem();
    const cplx al = rscalar(), be = rscalar();
    const Mat xe = e.inner(xi, eta), xz = e.inner(xi, zeta), ee = e.inner(eta, eta), xx = e.inner(xi, xi);
    const Mat ze = e.inner(zeta, eta);
    const double s = std::max({frob(xe), frob(xz), frob(ze)}) * (std::abs(al) + std::abs(be));
    r.linearity = std::max(r.linearity, rel(frob(e.inner(xi, al * eta + be * zeta) - al * xe - be * xz), s));
    r.conjugate_linearity = std::max(
        r.conjugate_linearity, rel(frob(e.inner(al * xi + be * zeta, eta) - std::conj(al) * xe - std::conj(be) * ze), s));
    const Vec xb1 = e.act(xi, b1);
    r.right_linearity = std::max(
        r.right_linearity,
        rel((e.act(al * xi + be * eta, b1) - al * xb1 - be * e.act(eta, b1)).norm() + (e.act(xi, b1 + b2) - xb1 - e.act(xi, b2)).norm(),
            xb1.norm() + e.act(xi, b2).norm()));
    const Vec lhs = e.act(xb1, b2), rhs = e.act(xi, b1 * b2);
    r.right_action = std::max(r.right_action, rel((lhs - rhs).norm(), rhs.norm()));
    const Mat comp = b1.adjoint() * xe * b2;
    r.compatibility = std::max(r.compatibility, rel(frob(e.inner(xb1, e.act(eta, b2)) - comp), frob(comp)));
    r.hermitian = std::max(r.hermitian, rel(frob(e.inner(eta, xi) - xe.adjoint()), frob(xe)));
    const double nx2 = operator_norm(xx);
    r.positivity = std::max(r.positivity, std::max(0.0, -min_eigenvalue(xx)) / std::max(1e-300, nx2));
    const Mat cs = nx2 * ee - e.inner(eta, xi) * xe;
    r.cauchy_schwarz =
        std::max(r.cauchy_schwarz, std::max(0.0, -min_eigenvalue(cs)) / std::max(1e-300, nx2 * operator_norm(ee)));
  }
  return r;
}

double standard_norm_mismatch(const MatrixStarAlgebra& b, int samples, std::uint64_t seed) {
  const FDHilbertModule e = standard_module(b);
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec c = random_gaussian(b.dim(), 1, rng).col(0);
    // Carrier coordinates of the standard module are B's coefficients.
    const double op = operator_norm(b.element(c));
    worst = std::max(worst, std::abs(e.norm(c) - op) / std::max(1.0, op));
  }
  return worst;
}

MatrixStarAlgebra compact_span_raw(const FDHilbertModule& e, double tol) {
  const Index m = e.carrier_dim();
  std::vector<Mat> ops;
  ops.reserve(static_cast<size_t>(m * m));
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) ops.push_back(e.theta(unit_vector(m, i), unit_vector(m, j)));
  }
  return MatrixStarAlgebra::span_of(m, ops, tol);
}

MatrixStarAlgebra compact_operators(const FDHilbertModule& e, double tol) {
  const MatrixStarAlgebra raw = compact_span_raw(e, tol);
  std::vector<Mat> framed;
  for (const Mat& k : raw.basis()) framed.push_back(e.to_frame(k));
  return MatrixStarAlgebra::span_of(e.carrier_dim(), framed, tol);
}

MatrixStarAlgebra module_maps_raw(const FDHilbertModule& e, double tol) {
  const Index m = e.carrier_dim();
  const Mat id = Mat::Identity(m, m);
  Mat gram = Mat::Zero(m * m, m * m);
  for (const Mat& r : e.right_action()) {
    // vec(a r - r a) = (r^T (x) 1 - 1 (x) r) vec(a)
    const Mat k = kron(r.transpose(), id) - kron(id, r);
    gram += k.adjoint() * k;
  }
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> ops;
  for (Index j = 0; j < null.cols(); ++j) ops.push_back(unvec(null.col(j), m, m));
  return MatrixStarAlgebra::span_of(m, ops, tol);
}

double adjointability_residual(const FDHilbertModule& e, double tol) {
  const Index m = e.carrier_dim();
  const MatrixStarAlgebra maps = module_maps_raw(e, tol);
  double worst = 0.0;
  for (const Mat& a : maps.basis()) {
    const Mat ad = e.adjoint(a);
    for (const Mat& r : e.right_action()) worst = std::max(worst, frob(ad * r - r * ad));
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        const Vec ei = unit_vector(m, i), ej = unit_vector(m, j);
        worst = std::max(worst, frob(e.inner(a * ei, ej) - e.inner(ei, ad * ej)));
      }
    }
  }
  return worst;
}

MatrixStarAlgebra fullness_ideal(const FDHilbertModule& e, double tol) {
  const Index m = e.carrier_dim();
  std::vector<Mat> vals;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) vals.push_back(e.basis_inner(i, j));
  }
  MatrixStarAlgebra j = MatrixStarAlgebra::span_of(e.algebra().ambient_dim(), vals, tol);
  if (j.dim() > 0 && !is_ideal(j, e.algebra(), 1e-8)) throw NumericError("fullness_ideal: span of inner products is not an ideal");
  return j;
}

bool is_full(const FDHilbertModule& e, double tol) { return fullness_ideal(e, tol).dim() == e.algebra().dim(); }

FDHilbertModule transport(const FDHilbertModule& e, const MatrixStarAlgebra& c, const std::vector<Mat>& images,
                          double tol) {
  if (static_cast<Index>(images.size()) != c.dim()) throw Error("transport: one image per basis element of C");
  const Index m = e.carrier_dim();
  const Index n = e.algebra().ambient_dim();
  std::vector<Mat> right;
  for (const Mat& im : images) right.push_back(e.act(im));
  std::vector<Mat> g(images.size(), Mat::Zero(m, m));
  if (m > 0 && !images.empty()) {
    const Mat y = stack(images, n * n);
    const auto solver = y.completeOrthogonalDecomposition();
    Mat x(n * n, m * m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) x.col(i * m + j) = vec(e.basis_inner(i, j));
    }
    const Mat coeffs = solver.solve(x);
    const double err = (y * coeffs - x).norm();
    if (err > tol * std::max(1.0, x.norm())) throw ValidationError("transport: inner products leave the image of C");
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        for (size_t l = 0; l < images.size(); ++l) g[l](i, j) = coeffs(static_cast<Index>(l), i * m + j);
      }
    }
  } else if (m > 0) {
    throw ValidationError("transport: inner products leave the image of C");
  }
  return FDHilbertModule(c, m, std::move(right), std::move(g), e.name());
}

double EquivarianceResiduals::max() const { return std::max({compatibility, inner, homomorphism}); }

EquivarianceResiduals equivariance_residuals(const EquivariantModule& eq) {
  EquivarianceResiduals r;
  const FDHilbertModule& e = eq.base;
  const FiniteGroup& g = eq.beta.group;
  const Index m = e.carrier_dim();
  for (int w = 0; w < g.order(); ++w) {
    const Mat& gw = eq.gamma[static_cast<size_t>(w)];
    for (Index k = 0; k < e.algebra().dim(); ++k) {
      const Mat bk = e.algebra().basis(k);
      r.compatibility = std::max(r.compatibility, frob(gw * e.right_action()[static_cast<size_t>(k)] -
                                                       e.act(eq.beta.apply(w, bk)) * gw));
    }
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        const Mat lhs = e.inner(gw.col(i), gw.col(j));
        r.inner = std::max(r.inner, frob(lhs - eq.beta.apply(w, e.basis_inner(i, j))));
      }
    }
    for (int v = 0; v < g.order(); ++v) {
      r.homomorphism = std::max(r.homomorphism,
                                frob(gw * eq.gamma[static_cast<size_t>(v)] - eq.gamma[static_cast<size_t>(g.mul(w, v))]));
    }
  }
  return r;
}

EquivariantModule equivariant_function_module(const EquivariantSystem& sys) {
  EquivariantModule eq{function_module(sys), function_action(scalar_shadow(sys)), {}};
  for (int w = 0; w < sys.group().order(); ++w) eq.gamma.push_back(implementing_unitary(sys, w));
  return eq;
}

EquivariantModule trivially_equivariant(const FDHilbertModule& e, const FiniteGroup& g) {
  EquivariantModule eq{e, action_from_maps(e.algebra(), g, [](int, const Mat& b) { return b; }), {}};
  for (int w = 0; w < g.order(); ++w) eq.gamma.push_back(Mat::Identity(e.carrier_dim(), e.carrier_dim()));
  return eq;
}

CrossedModule module_crossed_product(const EquivariantModule& eq, double tol) {
  CrossedProduct cp(eq.beta, tol);
  const FiniteGroup& g = cp.group();
  const FDHilbertModule& e = eq.base;
  const Index m = e.carrier_dim();
  const int nw = g.order();
  std::vector<Mat> right;
  for (const Mat& c : cp.algebra().basis()) {
    const CrossedCoefficients f = cp.coefficients(c);
    Mat r = Mat::Zero(nw * m, nw * m);
    for (int w = 0; w < nw; ++w) {
      for (int u = 0; u < nw; ++u) {
        const Mat& fu = f[static_cast<size_t>(u)];
        if (fu.isZero(0.0)) continue;
        r.block(g.mul(w, u) * m, w * m, m, m) += e.act(eq.beta.apply(w, fu));
      }
    }
    right.push_back(std::move(r));
  }
  std::vector<Mat> base_inner(static_cast<size_t>(m * m));
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) base_inner[static_cast<size_t>(i * m + j)] = e.basis_inner(i, j);
  }
  auto inner = [&](Index a, Index b) {
    const int w1 = static_cast<int>(a / m), w2 = static_cast<int>(b / m);
    const Mat& v = base_inner[static_cast<size_t>((a % m) * m + (b % m))];
    return cp.embed_term(eq.beta.apply(g.inv(w1), v), g.mul(g.inv(w1), w2));
  };
  FDHilbertModule mod =
      FDHilbertModule::from_pairing(cp.algebra(), nw * m, std::move(right), inner, e.name() + " x| W");
  return CrossedModule{std::move(cp), std::move(mod)};
}

std::vector<Mat> crossed_compacts_raw(const EquivariantModule& eq, double tol) {
  const FiniteGroup& g = eq.beta.group;
  const Index m = eq.base.carrier_dim();
  const int nw = g.order();
  const MatrixStarAlgebra k = compact_span_raw(eq.base, tol);
  std::vector<Mat> out;
  for (int u = 0; u < nw; ++u) {
    for (const Mat& kl : k.basis()) {
      const Mat kg = kl * eq.gamma[static_cast<size_t>(u)];
      Mat op = Mat::Zero(nw * m, nw * m);
      for (int w = 0; w < nw; ++w) op.block(g.mul(u, w) * m, w * m, m, m) = kg;
      out.push_back(std::move(op));
    }
  }
  return out;
}

double crossed_compacts_residual(const EquivariantModule& eq, double tol) {
  const CrossedModule cm = module_crossed_product(eq, tol);
  const MatrixStarAlgebra lhs = compact_span_raw(cm.module, tol);
  const MatrixStarAlgebra rhs = MatrixStarAlgebra::span_of(cm.module.carrier_dim(), crossed_compacts_raw(eq, tol), tol);
  if (lhs.dim() != rhs.dim()) return std::max(1.0, span_distance(lhs, rhs));
  return span_distance(lhs, rhs);
}

GreenJulgModule green_julg_module(const EquivariantModule& eq, double tol) {
  CrossedProduct cp(eq.beta, tol);
  const FiniteGroup& g = cp.group();
  const FDHilbertModule& e = eq.base;
  const Index m = e.carrier_dim();
  std::vector<Mat> right;
  for (const Mat& c : cp.algebra().basis()) {
    const CrossedCoefficients f = cp.coefficients(c);
    Mat r = Mat::Zero(m, m);
    for (int u = 0; u < g.order(); ++u) {
      const Mat& fu = f[static_cast<size_t>(u)];
      if (fu.isZero(0.0)) continue;
      r += eq.gamma[static_cast<size_t>(g.inv(u))] * e.act(fu);
    }
    right.push_back(std::move(r));
  }
  auto inner = [&](Index i, Index j) {
    CrossedCoefficients f;
    for (int w = 0; w < g.order(); ++w) f.push_back(e.inner(unit_vector(m, i), eq.gamma[static_cast<size_t>(w)].col(j)));
    return cp.embed(f);
  };
  FDHilbertModule mod = FDHilbertModule::from_pairing(cp.algebra(), m, std::move(right), inner, e.name() + " (Green-Julg)");
  return GreenJulgModule{std::move(cp), std::move(mod)};
}

MatrixStarAlgebra invariant_compacts_raw(const EquivariantModule& eq, double tol) {
  const MatrixStarAlgebra k = compact_span_raw(eq.base, tol);
  const Index m = eq.base.carrier_dim();
  if (k.dim() == 0) return k;
  Mat gram = Mat::Zero(k.dim(), k.dim());
  std::vector<int> gens = eq.beta.group.generators();
  if (gens.empty()) gens.push_back(0);
  for (int w : gens) {
    const Mat& gw = eq.gamma[static_cast<size_t>(w)];
    const Mat gi = gw.inverse();
    Mat d(m * m, k.dim());
    for (Index l = 0; l < k.dim(); ++l) d.col(l) = vec(gw * k.basis(l) * gi - k.basis(l));
    gram += d.adjoint() * d;
  }
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> ops;
  for (Index j = 0; j < null.cols(); ++j) ops.push_back(k.element(null.col(j)));
  return MatrixStarAlgebra::span_of(m, ops, tol);
}

GreenJulgVerdict verify_green_julg(const EquivariantModule& eq, double tol) {
  GreenJulgVerdict v;
  const GreenJulgModule gj = green_julg_module(eq);
  const MatrixStarAlgebra lhs = compact_span_raw(gj.module);
  const MatrixStarAlgebra rhs = invariant_compacts_raw(eq);
  v.dim_crossed_compacts = lhs.dim();
  v.dim_invariant = rhs.dim();
  v.residual = span_distance(lhs, rhs);
  v.axioms = module_axioms(gj.module);
  v.pass = lhs.dim() == rhs.dim() && v.residual < tol && v.axioms.ok(tol);
  return v;
}

bool NormBounds::ok(double tol) const {
  return samples == 0 || (min_ratio >= 1.0 - tol && max_ratio <= static_cast<double>(group_order) * (1.0 + tol));
}

NormBounds green_julg_norm_bounds(const EquivariantModule& eq, int samples, std::uint64_t seed) {
  NormBounds nb;
  nb.group_order = eq.beta.group.order();
  const Index m = eq.base.carrier_dim();
  if (m == 0) return nb;
  const GreenJulgModule gj = green_julg_module(eq);
  Rng rng(seed);
  nb.min_ratio = std::numeric_limits<double>::infinity();
  nb.max_ratio = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec xi = random_gaussian(m, 1, rng).col(0);
    const double base = std::pow(eq.base.norm(xi), 2);
    const double twisted = std::pow(gj.module.norm(xi), 2);
    const double ratio = twisted / base;
    nb.min_ratio = std::min(nb.min_ratio, ratio);
    nb.max_ratio = std::max(nb.max_ratio, ratio);
    ++nb.samples;
  }
  return nb;
}

namespace {

// Element of K p_j acting as x on the block's irreducible subspace.
struct BlockLift {
  std::vector<Mat> basis;
  Eigen::CompleteOrthogonalDecomposition<Mat> solver;
  Mat lift(const Mat& x) const {
    const Vec c = solver.solve(vec(x));
    Mat out = Mat::Zero(basis.front().rows(), basis.front().cols());
    for (size_t l = 0; l < basis.size(); ++l) out += c(static_cast<Index>(l)) * basis[l];
    return out;
  }
};

BlockLift make_lift(const MatrixStarAlgebra& k, const BlockStructure& bs, size_t j) {
  const MatrixStarAlgebra ideal = block_ideal(k, bs, {j});
  const Block& blk = bs.blocks[j];
  BlockLift l;
  l.basis = ideal.basis();
  Mat y(blk.size * blk.size, ideal.dim());
  for (Index c = 0; c < ideal.dim(); ++c) y.col(c) = vec(blk.represent(ideal.basis(c)));
  l.solver = y.completeOrthogonalDecomposition();
  return l;
}

std::vector<Index> count_blocks(const BlockStructure& bs) { return bs.sizes(); }

}  // namespace

MoritaVerdict verify_morita(const MatrixStarAlgebra& a, const FDHilbertModule& e, const std::vector<Mat>& images,
                            std::uint64_t seed, double tol) {
  MoritaVerdict v;
  const MatrixStarAlgebra& b = e.algebra();
  const MatrixStarAlgebra j = fullness_ideal(e);
  v.fullness_dim = j.dim();
  if (j.dim() != b.dim()) {
    std::ostringstream os;
    os << "E is not full: the span of inner products has dimension " << j.dim() << " < dim B = " << b.dim();
    v.reason = os.str();
    return v;
  }
  const MatrixStarAlgebra k = compact_operators(e);
  const BlockStructure ba = block_decompose(a, seed);
  const BlockStructure bk = block_decompose(k, seed);
  v.blocks_a = count_blocks(ba);
  v.blocks_k = count_blocks(bk);
  const Index m = e.carrier_dim();

  auto attempt = [&](const std::vector<Mat>& raw) {
    std::vector<Mat> framed;
    for (const Mat& x : raw) framed.push_back(e.to_frame(x));
    return check_isomorphism(a.basis(), framed, k, kDefaultTol);
  };
  auto accept = [&](std::vector<Mat> raw, IsomorphismReport rep) {
    MoritaWitness w{a, e, std::move(raw), rep, static_cast<Index>(ba.blocks.size()), 0};
    w.blocks_b = static_cast<Index>(block_decompose(b, seed).blocks.size());
    if (w.blocks_a != w.blocks_b) {
      v.reason = "block counts of A and B differ";
      return;
    }
    v.ok = true;
    v.witness = std::move(w);
  };

  if (a.dim() == 0 && k.dim() == 0) {
    accept({}, IsomorphismReport{});
    if (v.ok) v.witness->report.bijective = true;
    return v;
  }
  if (!images.empty()) {
    if (static_cast<Index>(images.size()) != a.dim()) throw Error("verify_morita: one image per basis element of A");
    const IsomorphismReport rep = attempt(images);
    if (rep.ok(tol)) {
      accept(images, rep);
    } else {
      std::ostringstream os;
      os << "given map is not a *-isomorphism onto K_B(E): multiplicative " << rep.multiplicative << ", star "
         << rep.star << ", onto " << rep.onto << ", rank " << rep.image_rank << " of " << k.dim();
      v.reason = os.str();
    }
    return v;
  }
  if (a.ambient_dim() == m) {
    const IsomorphismReport rep = attempt(a.basis());
    if (rep.ok(tol)) {
      accept(a.basis(), rep);
      return v;
    }
  }
  if (v.blocks_a != v.blocks_k) {
    std::ostringstream os;
    os << "no *-isomorphism A -> K_B(E): block sizes " << join(v.blocks_a) << " vs " << join(v.blocks_k)
       << " (block counts " << v.blocks_a.size() << " vs " << v.blocks_k.size() << ")";
    v.reason = os.str();
    return v;
  }
  // Blocks are sorted by size, so equal positions carry equal sizes.
  std::vector<BlockLift> lifts;
  for (size_t i = 0; i < bk.blocks.size(); ++i) lifts.push_back(make_lift(k, bk, i));
  std::vector<Mat> raw;
  for (const Mat& x : a.basis()) {
    Mat img = Mat::Zero(m, m);
    for (size_t i = 0; i < ba.blocks.size(); ++i) img += lifts[i].lift(ba.blocks[i].represent(x));
    raw.push_back(e.from_frame(img));
  }
  const IsomorphismReport rep = attempt(raw);
  if (rep.ok(tol)) {
    accept(std::move(raw), rep);
  } else {
    v.reason = "block matching did not produce a *-isomorphism";
  }
  return v;
}

DualModule dual_module(const FDHilbertModule& e, double tol) {
  const MatrixStarAlgebra k = compact_operators(e, tol);
  const Index m = e.carrier_dim();
  std::vector<Mat> right;
  for (const Mat& kb : k.basis()) right.push_back(e.adjoint(e.from_frame(kb)).conjugate());
  auto inner = [&](Index i, Index j) { return Mat(e.to_frame(e.theta(unit_vector(m, i), unit_vector(m, j)))); };
  DualModule d{FDHilbertModule::from_pairing(k, m, std::move(right), inner, e.name() + " (dual)"), {}};
  for (const Mat& b : e.algebra().basis()) d.left_action.push_back(e.act(Mat(b.adjoint())).conjugate());
  return d;
}

double double_dual_residual(const FDHilbertModule& e, double tol) {
  const DualModule d = dual_module(e, tol);
  const DualModule dd = dual_module(d.module, tol);
  const Index m = e.carrier_dim();
  double worst = 0.0;
  for (Index k = 0; k < e.algebra().dim(); ++k) {
    const Mat& mb = d.left_action[static_cast<size_t>(k)];
    const Mat back = d.module.adjoint(mb).conjugate();
    const Mat& r = e.right_action()[static_cast<size_t>(k)];
    worst = std::max(worst, rel(frob(back - r), frob(r)));
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const Mat lhs = d.module.from_frame(dd.module.basis_inner(i, j));
      const Mat v = e.basis_inner(i, j);
      const Mat rhs = e.act(Mat(v.adjoint())).conjugate();
      worst = std::max(worst, rel(frob(lhs - rhs), frob(rhs)));
    }
  }
  return worst;
}

FDHilbertModule direct_sum_modules(const std::vector<FDHilbertModule>& parts) {
  std::vector<MatrixStarAlgebra> algs;
  std::vector<Index> coff{0}, aoff{0};
  for (const FDHilbertModule& p : parts) {
    algs.push_back(p.algebra());
    coff.push_back(coff.back() + p.carrier_dim());
    aoff.push_back(aoff.back() + p.algebra().ambient_dim());
  }
  MatrixStarAlgebra sum = direct_sum(algs);
  const Index m = coff.back();
  std::vector<Mat> right;
  for (const Mat& y : sum.basis()) {
    Mat r = Mat::Zero(m, m);
    for (size_t i = 0; i < parts.size(); ++i) {
      const Index n = parts[i].algebra().ambient_dim();
      const Index c = parts[i].carrier_dim();
      if (c == 0) continue;
      r.block(coff[i], coff[i], c, c) = parts[i].act(Mat(y.block(aoff[i], aoff[i], n, n)));
    }
    right.push_back(std::move(r));
  }
  auto part_of = [&](Index a) {
    size_t p = 0;
    while (coff[p + 1] <= a) ++p;
    return p;
  };
  auto inner = [&](Index a, Index b) {
    Mat out = Mat::Zero(aoff.back(), aoff.back());
    const size_t p = part_of(a), q = part_of(b);
    if (p != q) return out;
    const Index n = parts[p].algebra().ambient_dim();
    out.block(aoff[p], aoff[p], n, n) = parts[p].basis_inner(a - coff[p], b - coff[p]);
    return out;
  };
  return FDHilbertModule::from_pairing(std::move(sum), m, std::move(right), inner, "direct-sum");
}

MoritaVerdict direct_sum_morita(const std::vector<MoritaWitness>& parts, std::uint64_t seed, double tol) {
  std::vector<MatrixStarAlgebra> as;
  std::vector<FDHilbertModule> es;
  std::vector<Index> aoff{0}, coff{0};
  for (const MoritaWitness& w : parts) {
    as.push_back(w.a);
    es.push_back(w.module);
    aoff.push_back(aoff.back() + w.a.ambient_dim());
    coff.push_back(coff.back() + w.module.carrier_dim());
  }
  const MatrixStarAlgebra a = direct_sum(as);
  const FDHilbertModule e = direct_sum_modules(es);
  std::vector<Mat> images;
  for (const Mat& x : a.basis()) {
    std::vector<Mat> blocks;
    for (size_t i = 0; i < parts.size(); ++i) {
      const MoritaWitness& w = parts[i];
      const Index n = w.a.ambient_dim();
      const Vec c = w.a.coefficients(x.block(aoff[i], aoff[i], n, n));
      Mat img = Mat::Zero(w.module.carrier_dim(), w.module.carrier_dim());
      for (Index l = 0; l < c.size(); ++l) img += c(l) * w.images[static_cast<size_t>(l)];
      blocks.push_back(std::move(img));
    }
    images.push_back(block_diagonal(blocks));
  }
  return verify_morita(a, e, images, seed, tol);
}

Mat TensorModule::left(const Mat& a) const {
  return compression.adjoint() * kron(a, Mat::Identity(right_dim, right_dim)) * compression;
}

TensorModule interior_tensor(const FDHilbertModule& e, const FDHilbertModule& f, const std::vector<Mat>& psi, double tol) {
  if (static_cast<Index>(psi.size()) != e.algebra().dim()) throw Error("interior_tensor: one image per basis element of B");
  const Index me = e.carrier_dim(), mf = f.carrier_dim(), big = me * mf;
  const Mat ide = Mat::Identity(me, me);
  Mat metric = Mat::Zero(big, big);
  for (size_t p = 0; p < psi.size(); ++p) metric += kron(e.inner_tensor()[p], f.metric() * psi[p]);
  metric = hermitian_part(metric);
  Eigen::SelfAdjointEigenSolver<Mat> es(metric);
  const double top = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
  std::vector<Index> keep;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > std::max(tol, 1e-9) * std::max(1e-300, top)) keep.push_back(i);
  }
  Mat v(big, static_cast<Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) v.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
  std::vector<Mat> right, inner;
  for (size_t q = 0; q < f.right_action().size(); ++q) {
    right.push_back(v.adjoint() * kron(ide, f.right_action()[q]) * v);
    Mat g = Mat::Zero(big, big);
    for (size_t p = 0; p < psi.size(); ++p) g += kron(e.inner_tensor()[p], f.inner_tensor()[q] * psi[p]);
    inner.push_back(v.adjoint() * g * v);
  }
  TensorModule t{FDHilbertModule(f.algebra(), v.cols(), std::move(right), std::move(inner), e.name() + " (x) " + f.name()),
                 v, mf};
  return t;
}

}  // namespace equivaria

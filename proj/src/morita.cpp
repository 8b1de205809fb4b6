#include "equivaria/morita.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace equivaria {

namespace {

std::string set_string(const std::vector<int>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

Mat point_indicator(int n, int x) {
  Mat e = Mat::Zero(n, n);
  e(x, x) = 1.0;
  return e;
}

// Linear map given on a spanning family, extended by least squares.
class LinearMap {
 public:
  LinearMap(const std::vector<Mat>& source, std::vector<Mat> images) : images_(std::move(images)) {
    const Index n = source.front().rows();
    Mat s(n * n, static_cast<Index>(source.size()));
    for (size_t k = 0; k < source.size(); ++k) s.col(static_cast<Index>(k)) = vec(source[k]);
    solver_ = s.completeOrthogonalDecomposition();
  }
  Mat operator()(const Mat& x) const {
    const Vec c = solver_.solve(vec(x));
    Mat out = Mat::Zero(images_.front().rows(), images_.front().cols());
    for (size_t k = 0; k < images_.size(); ++k) out += c(static_cast<Index>(k)) * images_[k];
    return out;
  }

 private:
  std::vector<Mat> images_;
  Eigen::CompleteOrthogonalDecomposition<Mat> solver_;
};

// The ideal of cp = C(X) x| U cut out by f_{nu}(x) = f_u(x) for n in subgroups[x],
// where to_parent maps U's indices into the ambient group of the subgroups.
MatrixStarAlgebra constraint_ideal(const CrossedProduct& cp, const FiniteGroup& parent, const std::vector<int>& to_parent,
                                   const std::vector<std::vector<int>>& subgroups, double tol) {
  const int nu = cp.group().order();
  const int nx = static_cast<int>(cp.base().ambient_dim());
  std::map<int, int> local;
  for (size_t i = 0; i < to_parent.size(); ++i) local[to_parent[i]] = static_cast<int>(i);
  const Index dim = static_cast<Index>(nu) * nx;
  std::vector<Vec> rows;
  for (int x = 0; x < nx; ++x) {
    for (int n : subgroups[static_cast<size_t>(x)]) {
      if (n == FiniteGroup::identity()) continue;
      for (int u = 0; u < nu; ++u) {
        const int nu_local = local.at(parent.mul(n, to_parent[static_cast<size_t>(u)]));
        Vec row = Vec::Zero(dim);
        row(nu_local * nx + x) += 1.0;
        row(u * nx + x) -= 1.0;
        rows.push_back(std::move(row));
      }
    }
  }
  Mat gram = Mat::Zero(dim, dim);
  for (const Vec& r : rows) gram += r * r.adjoint();
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> elems;
  for (Index j = 0; j < null.cols(); ++j) {
    Mat e = Mat::Zero(cp.algebra().ambient_dim(), cp.algebra().ambient_dim());
    for (int u = 0; u < nu; ++u) {
      for (int x = 0; x < nx; ++x) {
        const cplx c = null(u * nx + x, j);
        if (std::abs(c) > 0.0) e += c * cp.embed_term(point_indicator(nx, x), u);
      }
    }
    elems.push_back(std::move(e));
  }
  return MatrixStarAlgebra::span_of(cp.algebra().ambient_dim(), elems, tol);
}

std::vector<Index> block_sizes(const MatrixStarAlgebra& a, std::uint64_t seed) {
  return block_decompose(a, seed).sizes();
}

}  // namespace

ScalarStructure scalar_subgroups(const EquivariantSystem& sys, double tol, std::uint64_t seed) {
  ScalarStructure s;
  s.normalisation_ok = s.completeness_ok = s.conjugation_ok = true;
  const FiniteGroup& g = sys.group();
  const Index d = sys.fiber_dim();
  const Mat id = Mat::Identity(d, d);
  for (int x = 0; x < sys.num_points(); ++x) {
    PointScalars p;
    p.point = x;
    p.stabilizer = stabilizer(sys, x);
    for (int w : p.stabilizer) {
      const Mat& c = sys.cocycle(w, x);
      const cplx lambda = c.trace() / static_cast<double>(d);
      if (frob(c - lambda * id) < tol) p.scalar.push_back(w);
      if (frob(c - id) < tol) p.normalised.push_back(w);
    }
    if (p.scalar != p.normalised) {
      s.normalisation_ok = false;
      s.failures.push_back("normalisation fails at " + sys.points()[static_cast<size_t>(x)] + ": scalar subgroup " +
                           set_string(p.scalar) + " but I = 1 only on " + set_string(p.normalised));
    }
    const Subgroup stab = make_subgroup(g, p.stabilizer);
    if (!is_normal_subgroup(stab.group, [&] {
          std::vector<int> loc;
          for (int n : p.normalised) {
            loc.push_back(static_cast<int>(std::find(stab.to_parent.begin(), stab.to_parent.end(), n) -
                                           stab.to_parent.begin()));
          }
          return loc;
        }())) {
      s.conjugation_ok = false;
    }
    const UnitaryRep rep = stabilizer_rep(sys, x, stab);
    const Vec chi = rep.character();
    for (const UnitaryRep& rho : enumerate_irreps(stab.group, seed)) {
      bool trivial = true;
      for (int n : p.normalised) {
        const int loc = static_cast<int>(std::find(stab.to_parent.begin(), stab.to_parent.end(), n) - stab.to_parent.begin());
        if (frob(rho(loc) - Mat::Identity(rho.dim(), rho.dim())) > 1e-6) trivial = false;
      }
      if (!trivial) continue;
      if (std::real(character_inner(chi, rho.character())) < 0.5) p.missing.push_back(rho.label);
    }
    if (!p.missing.empty()) {
      s.completeness_ok = false;
      std::string miss;
      for (const auto& m : p.missing) miss += (miss.empty() ? "" : ",") + m;
      s.failures.push_back("completeness fails at " + sys.points()[static_cast<size_t>(x)] + ": I_x misses " + miss);
    }
    s.points.push_back(std::move(p));
  }
  for (int w = 0; w < g.order(); ++w) {
    for (int x = 0; x < sys.num_points(); ++x) {
      std::vector<int> conj;
      for (int n : s.points[static_cast<size_t>(x)].normalised) conj.push_back(g.mul(w, g.mul(n, g.inv(w))));
      std::sort(conj.begin(), conj.end());
      std::vector<int> target = s.points[static_cast<size_t>(sys.act(w, x))].normalised;
      std::sort(target.begin(), target.end());
      if (conj != target) s.conjugation_ok = false;
    }
  }
  if (!s.conjugation_ok) s.failures.push_back("w N_x w^-1 = N_{wx} fails");
  return s;
}

CIdeal c_ideal(const EquivariantSystem& sys, const ScalarStructure& scalars, double tol) {
  CrossedProduct cp(function_action(scalar_shadow(sys)), tol);
  std::vector<std::vector<int>> subs;
  for (int x = 0; x < sys.num_points(); ++x) subs.push_back(scalars.subgroup(x));
  std::vector<int> ids(static_cast<size_t>(sys.group().order()));
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  MatrixStarAlgebra ideal = constraint_ideal(cp, sys.group(), ids, subs, tol);
  const bool ok = ideal.dim() == 0 || (is_ideal(ideal, cp.algebra(), 1e-8) && ideal.closure_residual() < 1e-8);
  return CIdeal{std::move(cp), std::move(ideal), ok};
}

CIdeal c_ideal(const EquivariantSystem& sys, double tol) { return c_ideal(sys, scalar_subgroups(sys), tol); }

QuotientConsistency quotient_consistency(const EquivariantSystem& sys, std::uint64_t seed, double tol) {
  QuotientConsistency q;
  const ScalarStructure scalars = scalar_subgroups(sys);
  const CIdeal ci = c_ideal(sys, scalars, tol);
  q.c_dim = ci.ideal.dim();
  const PhiIso phi = phi_iso(sys, tol);
  const SpectrumDescription desc = classify_irreps(phi.translated, seed, tol);
  const Index nterms = static_cast<Index>(phi.source_terms.size());
  std::vector<Mat> blocks;
  for (const SpectrumEntry& entry : desc.entries) {
    const auto& n = scalars.subgroup(entry.representative);
    bool nontrivial = false;
    for (int p : n) {
      const auto& tp = entry.stabilizer.to_parent;
      const int loc = static_cast<int>(std::find(tp.begin(), tp.end(), p) - tp.begin());
      if (frob(entry.irrep(loc) - Mat::Identity(entry.irrep.dim(), entry.irrep.dim())) > 1e-6) nontrivial = true;
    }
    if (!nontrivial) continue;
    const RealizedIrrep ri = realize_irrep(phi.translated, phi.target, entry, tol);
    const Index k = entry.dim;
    Mat rows(k * k, nterms);
    for (Index l = 0; l < nterms; ++l) {
      const Vec c = phi.target.coefficients(phi.images[static_cast<size_t>(l)]);
      Mat img = Mat::Zero(k, k);
      for (Index t = 0; t < c.size(); ++t) img += c(t) * ri.images[static_cast<size_t>(t)];
      rows.col(l) = vec(img);
    }
    blocks.push_back(std::move(rows));
  }
  Mat gram = Mat::Zero(nterms, nterms);
  for (const Mat& r : blocks) gram += r.adjoint() * r;
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> elems;
  for (Index j = 0; j < null.cols(); ++j) {
    Mat e = Mat::Zero(phi.source.algebra().ambient_dim(), phi.source.algebra().ambient_dim());
    for (Index l = 0; l < nterms; ++l) e += null(l, j) * phi.source_terms[static_cast<size_t>(l)];
    elems.push_back(std::move(e));
  }
  const MatrixStarAlgebra ann = MatrixStarAlgebra::span_of(phi.source.algebra().ambient_dim(), elems, tol);
  q.annihilator_dim = ann.dim();
  q.residual = span_distance(ann, ci.ideal);
  return q;
}

MoritaTheoremVerdict verify_morita_theorem(const EquivariantSystem& sys, std::uint64_t seed, double tol) {
  MoritaTheoremVerdict v;
  v.scalars = scalar_subgroups(sys);
  v.hypotheses = v.scalars.normalisation_ok && v.scalars.completeness_ok;
  v.fixed = fixed_point_algebra(sys);
  const GreenJulgModule gj = green_julg_module(equivariant_function_module(sys));
  v.j = fullness_ideal(gj.module);
  CIdeal ci = c_ideal(sys, v.scalars);
  v.c = ci.ideal;
  v.inclusion = inclusion_residual(v.j, v.c);
  v.span_residual = span_distance(v.j, v.c);
  v.equal = v.j.dim() == v.c.dim() && v.span_residual < tol;
  v.strict = v.j.dim() < v.c.dim() && v.inclusion < tol;
  v.module = transport(gj.module, v.j, v.j.basis());
  v.morita = verify_morita(v.fixed, v.module, {}, seed, tol);
  v.blocks_fixed = block_sizes(v.fixed, seed);
  v.blocks_j = block_sizes(v.j, seed);
  v.blocks_c = block_sizes(v.c, seed);
  std::ostringstream os;
  if (v.hypotheses) {
    v.pass = ci.is_ideal && v.equal && v.morita.ok;
    os << "normalisation and completeness hold; J " << (v.equal ? "=" : "!=") << " C(X,W,I) (dim " << v.j.dim()
       << " vs " << v.c.dim() << ", residual " << v.span_residual << "); Morita witness "
       << (v.morita.ok ? "produced" : "missing: " + v.morita.reason);
  } else {
    v.pass = ci.is_ideal && v.inclusion < tol && v.morita.ok;
    os << "hypotheses fail (" << (v.scalars.failures.empty() ? "" : v.scalars.failures.front()) << "); J "
       << (v.strict ? "is strictly contained in" : (v.equal ? "equals" : "vs")) << " C(X,W,I): dim " << v.j.dim()
       << " < " << v.c.dim();
  }
  v.summary = os.str();
  return v;
}

ReductionReport semidirect_reduction(const EquivariantSystem& sys, const std::vector<int>& wprime,
                                     const std::vector<int>& r, std::uint64_t seed, double tol) {
  const FiniteGroup& g = sys.group();
  ReductionReport rep;
  rep.system = sys.name();
  rep.wprime = wprime;
  rep.r = r;
  const Subgroup wp = make_subgroup(g, wprime);
  if (!is_normal_subgroup(g, wp.to_parent)) throw ValidationError("semidirect_reduction: W' is not normal in W");
  const ScalarStructure scalars = scalar_subgroups(sys);
  const std::set<int> wpset(wprime.begin(), wprime.end());
  for (int x = 0; x < sys.num_points(); ++x) {
    std::vector<int> meet;
    for (int w : stabilizer(sys, x)) {
      if (wpset.count(w)) meet.push_back(w);
    }
    std::vector<int> n = scalars.subgroup(x);
    std::sort(meet.begin(), meet.end());
    std::sort(n.begin(), n.end());
    if (meet != n) {
      throw ValidationError("semidirect_reduction: splitting hypothesis violated at point " +
                            sys.points()[static_cast<size_t>(x)] + ": W'_x = " + set_string(n) +
                            " but W_x cap W' = " + set_string(meet));
    }
  }

  // Link 1: fixed-point algebra ~ C(X, W, I).
  const MoritaTheoremVerdict mt = verify_morita_theorem(sys, seed, tol);
  rep.start = mt.fixed;
  {
    ReductionLink l{"C(X,K(H))^W ~ C(X,W,I)", "morita", mt.fixed.dim(), mt.c.dim(), mt.blocks_fixed, mt.blocks_c,
                    mt.span_residual, mt.pass && mt.equal && mt.morita.ok, mt.summary};
    rep.links.push_back(std::move(l));
  }

  // Link 2: C(X, W, I) = C(X, W', I) x| R inside (C(X) x| W') x| R.
  const EquivariantSystem scalar = scalar_shadow(sys);
  const StarAction beta = function_action(scalar);
  const IteratedIso it = iterated_crossed_iso(beta, wprime, r, tol);
  std::vector<std::vector<int>> subs;
  for (int x = 0; x < sys.num_points(); ++x) subs.push_back(scalars.subgroup(x));
  const MatrixStarAlgebra jprime = constraint_ideal(it.inner, g, it.u.to_parent, subs, tol);
  const StarAction& conj = it.outer.action();
  const StarAction beta_r = action_from_maps(jprime, it.v.group, [&](int vl, const Mat& x) { return conj.apply(vl, x); });

  // Link 3 data: C(X, W', id) ~ C(X)^{W'} through the Green-Julg module of C(X),
  // crossed with R.
  const EquivariantSystem sys_wp = restrict_system(scalar, wp);
  const GreenJulgModule gj_wp = green_julg_module(equivariant_function_module(sys_wp));
  const MatrixStarAlgebra jpp = fullness_ideal(gj_wp.module);
  const double scalar_link = span_distance(jpp, jprime);
  EquivariantModule eq_r{transport(gj_wp.module, jprime, jprime.basis()), beta_r, {}};
  for (int p : it.v.to_parent) eq_r.gamma.push_back(implementing_unitary(scalar, p));
  const double equivariance = equivariance_residuals(eq_r).max();
  const CrossedModule cm = module_crossed_product(eq_r);
  const MatrixStarAlgebra& cprime = cm.module.algebra();

  const LinearMap sigma(it.source_terms, it.images);
  std::vector<Mat> sigma_images;
  for (const Mat& c : cprime.basis()) sigma_images.push_back(sigma(c));
  const IsomorphismReport iso = check_isomorphism(cprime.basis(), sigma_images, mt.c, kDefaultTol);
  {
    ReductionLink l{"C(X,W,I) = C(X,W',I) x| R", "isomorphism", mt.c.dim(), cprime.dim(), mt.blocks_c,
                    block_sizes(cprime, seed), std::max({iso.multiplicative, iso.star, iso.onto}),
                    iso.ok(tol) && it.report.ok(tol), {}};
    std::ostringstream os;
    os << "iterated crossed product multiplicative " << it.report.multiplicative << "; restriction onto C(X,W,I) "
       << (iso.bijective ? "bijective" : "not bijective");
    l.detail = os.str();
    rep.links.push_back(std::move(l));
  }

  // A3 = C(X)^{W'} x| R acting on (E x| R) by k r : xi w -> (k gamma_r xi) rw.
  const MatrixStarAlgebra fixed_wp = fixed_point_algebra(sys_wp);
  std::vector<Mat> ur;
  for (int p : it.v.to_parent) ur.push_back(implementing_unitary(scalar, p));
  const CrossedProduct a3(action_from_unitaries(fixed_wp, it.v.group, ur), tol);
  rep.end = a3.algebra();
  const FiniteGroup& rg = it.v.group;
  const Index m = eq_r.base.carrier_dim();
  std::vector<Mat> a3_images;
  for (const Mat& y : a3.algebra().basis()) {
    const CrossedCoefficients f = a3.coefficients(y);
    Mat op = Mat::Zero(rg.order() * m, rg.order() * m);
    for (int rr = 0; rr < rg.order(); ++rr) {
      const Mat kg = f[static_cast<size_t>(rr)] * ur[static_cast<size_t>(rr)];
      for (int w = 0; w < rg.order(); ++w) op.block(rg.mul(rr, w) * m, w * m, m, m) += kg;
    }
    a3_images.push_back(std::move(op));
  }
  const MoritaVerdict w3 = verify_morita(a3.algebra(), cm.module, a3_images, seed, tol);
  {
    ReductionLink l{"C(X,W',I) x| R ~ C(X)^{W'} x| R", "morita", cprime.dim(), a3.algebra().dim(),
                    block_sizes(cprime, seed), block_sizes(a3.algebra(), seed), std::max(scalar_link, equivariance),
                    w3.ok && scalar_link < tol && equivariance < tol, {}};
    std::ostringstream os;
    os << "C(X,W',I) = C(X,W',id) residual " << scalar_link << "; R-equivariance " << equivariance << "; "
       << (w3.ok ? "witness produced" : w3.reason);
    l.detail = os.str();
    rep.links.push_back(std::move(l));
  }
  {
    const QuotientAlgebra qa = quotient_algebra(sys_wp, tol);
    ReductionLink l{"C(X)^{W'} = C(X/W')", "isomorphism", qa.fixed.dim(), qa.orbit_functions.dim(), {}, {},
                    std::max({qa.report.multiplicative, qa.report.star, qa.report.onto}), qa.report.ok(tol),
                    std::to_string(qa.orbit_indicators.size()) + " orbits of W'"};
    rep.links.push_back(std::move(l));
  }

  // Composite: E (x)_{C'} dual(E'' x| R) as a fixed-point-algebra / A3 bimodule.
  if (mt.morita.ok && w3.ok && iso.ok(tol)) {
    const FDHilbertModule e1 = transport(mt.module, cprime, sigma_images);
    const DualModule dual = dual_module(cm.module);
    std::vector<Mat> framed;
    for (const Mat& x : w3.witness->images) framed.push_back(cm.module.to_frame(x));
    const FDHilbertModule f = transport(dual.module, a3.algebra(), framed);
    const TensorModule t = interior_tensor(e1, f, dual.left_action);
    std::vector<Mat> images;
    for (const Mat& x : mt.morita.witness->images) images.push_back(t.left(x));
    rep.composite = verify_morita(mt.fixed, t.module, images, seed, tol);
  } else {
    rep.composite.reason = "a link of the chain failed";
  }
  rep.blocks_start = static_cast<Index>(mt.blocks_fixed.size());
  rep.blocks_end = static_cast<Index>(block_sizes(rep.end, seed).size());
  rep.ok = rep.composite.ok && rep.blocks_start == rep.blocks_end;
  for (const auto& l : rep.links) rep.ok = rep.ok && l.ok;
  return rep;
}

ToyDual assemble_toy_dual(const std::vector<Component>& components, std::uint64_t seed, double tol) {
  ToyDual out;
  std::vector<MoritaWitness> witnesses;
  bool all = true;
  for (const Component& c : components) {
    out.reports.push_back(semidirect_reduction(c.system, c.wprime, c.r, seed, tol));
    const ReductionReport& r = out.reports.back();
    all = all && r.ok;
    if (r.composite.witness) witnesses.push_back(*r.composite.witness);
  }
  if (!all) {
    out.combined.reason = "a component reduction failed";
    return out;
  }
  out.combined = direct_sum_morita(witnesses, seed, tol);
  out.ok = out.combined.ok;
  return out;
}

}  // namespace equivaria

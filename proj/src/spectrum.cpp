#include "equivaria/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace equivaria {

std::vector<OrbitInfo> orbits_and_stabilizers(const EquivariantSystem& sys) {
  std::vector<OrbitInfo> out;
  for (auto& orbit : orbits(sys)) {
    OrbitInfo info;
    info.representative = orbit.front();
    info.stabilizer = stabilizer(sys, info.representative);
    info.points = std::move(orbit);
    out.push_back(std::move(info));
  }
  return out;
}

UnitaryRep stabilizer_rep(const EquivariantSystem& sys, int x, const Subgroup& stab) {
  UnitaryRep rep{stab.group, {}, "I_" + std::to_string(x)};
  for (int w : stab.to_parent) {
    if (sys.act(w, x) != x) throw Error("stabilizer_rep: element does not fix the point");
    rep.matrices.push_back(sys.cocycle(w, x));
  }
  return rep;
}

std::vector<Index> SpectrumDescription::dims() const {
  std::vector<Index> out;
  for (const auto& e : entries) out.push_back(e.dim);
  return out;
}

SpectrumDescription classify_irreps(const EquivariantSystem& sys, std::uint64_t seed, double tol) {
  SpectrumDescription desc;
  desc.orbits = orbits_and_stabilizers(sys);
  for (size_t o = 0; o < desc.orbits.size(); ++o) {
    const OrbitInfo& info = desc.orbits[o];
    const Subgroup stab = make_subgroup(sys.group(), info.stabilizer);
    const UnitaryRep ix = stabilizer_rep(sys, info.representative, stab);
    const auto irreps = enumerate_irreps(stab.group, seed, tol);
    for (size_t i = 0; i < irreps.size(); ++i) {
      auto maps = equivariant_maps(irreps[i], ix, tol);
      if (maps.empty()) continue;
      SpectrumEntry e;
      e.orbit = o;
      e.representative = info.representative;
      e.stabilizer = stab;
      e.irrep_index = static_cast<int>(i);
      e.irrep = irreps[i];
      e.dim = static_cast<Index>(maps.size());
      e.maps = std::move(maps);
      desc.entries.push_back(std::move(e));
    }
  }
  return desc;
}

namespace {

Mat point_value(const EquivariantSystem& sys, const Mat& k, int x) {
  const Index d = sys.fiber_dim();
  return k.block(x * d, x * d, d, d);
}

Mat realize_on(const EquivariantSystem& sys, const SpectrumEntry& entry, const Mat& k) {
  const Mat kx = point_value(sys, k, entry.representative);
  Mat m(entry.dim, entry.dim);
  for (Index i = 0; i < entry.dim; ++i) {
    for (Index j = 0; j < entry.dim; ++j) {
      m(i, j) = (entry.maps[static_cast<size_t>(i)].adjoint() * kx * entry.maps[static_cast<size_t>(j)]).trace();
    }
  }
  return m;
}

}  // namespace

RealizedIrrep realize_irrep(const EquivariantSystem& sys, const MatrixStarAlgebra& fixed, const SpectrumEntry& entry,
                            double tol) {
  if (entry.representative < 0 || entry.representative >= sys.num_points() ||
      (!entry.maps.empty() && entry.maps.front().rows() != sys.fiber_dim())) {
    throw Error("realize_irrep: entry does not match the system");
  }
  RealizedIrrep r;
  for (const Mat& k : fixed.basis()) r.images.push_back(realize_on(sys, entry, k));
  const HomomorphismResiduals h = star_homomorphism_residuals(fixed.basis(), r.images, tol);
  r.multiplicative = h.multiplicative;
  r.star = h.star;
  r.commutant_dim = commutant_of(entry.dim, r.images, tol).dim();
  return r;
}

CrosscheckVerdict wedderburn_crosscheck(const EquivariantSystem& sys, std::uint64_t seed, double tol) {
  CrosscheckVerdict v;
  const MatrixStarAlgebra fixed = fixed_point_algebra(sys, tol);
  const SpectrumDescription desc = classify_irreps(sys, seed, tol);
  const BlockStructure blocks = block_decompose(fixed, seed, tol);
  v.algebra_dim = fixed.dim();
  v.classified = desc.dims();
  v.blocks = blocks.sizes();
  std::sort(v.classified.begin(), v.classified.end());
  std::sort(v.blocks.begin(), v.blocks.end());
  for (Index d : v.classified) v.sum_of_squares += d * d;

  std::vector<RealizedIrrep> realized;
  v.all_irreducible = true;
  for (const auto& e : desc.entries) {
    realized.push_back(realize_irrep(sys, fixed, e, tol));
    v.all_irreducible = v.all_irreducible && realized.back().irreducible();
  }
  Index total = 0;
  for (const auto& e : desc.entries) total += e.dim * e.dim;
  Mat stacked(total, fixed.dim());
  for (Index k = 0; k < fixed.dim(); ++k) {
    Index off = 0;
    for (const auto& r : realized) {
      const Mat& m = r.images[static_cast<size_t>(k)];
      stacked.block(off, k, m.size(), 1) = vec(m);
      off += m.size();
    }
  }
  v.realization_rank = fixed.dim() == 0 ? 0 : orthonormal_span(stacked, 1e-8).cols();

  std::ostringstream diff;
  if (v.classified != v.blocks) {
    diff << "classified dims {";
    for (size_t i = 0; i < v.classified.size(); ++i) diff << (i ? "," : "") << v.classified[i];
    diff << "} != block sizes {";
    for (size_t i = 0; i < v.blocks.size(); ++i) diff << (i ? "," : "") << v.blocks[i];
    diff << "}; ";
  }
  if (v.sum_of_squares != v.algebra_dim) diff << "sum of squares " << v.sum_of_squares << " != dim " << v.algebra_dim << "; ";
  if (v.realization_rank != v.algebra_dim) diff << "direct sum of realized irreps has rank " << v.realization_rank << "; ";
  if (!v.all_irreducible) diff << "a realized irrep has a commutant of dimension > 1; ";
  v.diff = diff.str();
  v.pass = v.diff.empty();
  return v;
}

bool ConjugationCheck::ok(const SpectrumEntry& entry, double tol) const {
  return matched_irrep >= 0 && moved_dim == entry.dim && equivariance < tol && unitarity < tol && intertwining < tol;
}

ConjugationCheck conjugation_check(const EquivariantSystem& sys, const MatrixStarAlgebra& fixed, const SpectrumEntry& entry,
                                   int w, std::uint64_t seed, double tol) {
  const FiniteGroup& g = sys.group();
  const int x = entry.representative;
  ConjugationCheck c;
  c.moved_point = sys.act(w, x);
  const int y = c.moved_point;
  const Subgroup stab_y = make_subgroup(g, stabilizer(sys, y));
  std::map<int, int> local_x;
  for (size_t i = 0; i < entry.stabilizer.to_parent.size(); ++i) local_x[entry.stabilizer.to_parent[i]] = static_cast<int>(i);
  UnitaryRep moved{stab_y.group, {}, entry.irrep.label};
  for (int v : stab_y.to_parent) {
    const int back = g.mul(g.inv(w), g.mul(v, w));
    moved.matrices.push_back(entry.irrep(local_x.at(back)));
  }
  c.matched_irrep = find_irrep(enumerate_irreps(stab_y.group, seed, tol), moved);
  const UnitaryRep iy = stabilizer_rep(sys, y, stab_y);
  c.moved_dim = static_cast<Index>(equivariant_maps(moved, iy, tol).size());

  const Mat& iwx = sys.cocycle(w, x);
  std::vector<Mat> theta;
  for (const Mat& s : entry.maps) theta.push_back(iwx * s);
  for (const Mat& t : theta) {
    for (size_t v = 0; v < stab_y.to_parent.size(); ++v) {
      c.equivariance = std::max(c.equivariance, frob(iy(static_cast<int>(v)) * t - t * moved(static_cast<int>(v))));
    }
  }
  for (size_t i = 0; i < theta.size(); ++i) {
    for (size_t j = 0; j < theta.size(); ++j) {
      const cplx ip = (theta[i].adjoint() * theta[j]).trace();
      c.unitarity = std::max(c.unitarity, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  for (const Mat& k : fixed.basis()) {
    const Mat kx = point_value(sys, k, x), ky = point_value(sys, k, y);
    for (const Mat& s : entry.maps) c.intertwining = std::max(c.intertwining, frob(ky * iwx * s - iwx * kx * s));
  }
  return c;
}

SurjectivityCheck evaluation_surjectivity(const EquivariantSystem& sys, const MatrixStarAlgebra& fixed, int x, double tol) {
  SurjectivityCheck s;
  const Index d = sys.fiber_dim();
  const std::vector<int> stab = stabilizer(sys, x);
  std::vector<Mat> ix;
  for (int w : stab) ix.push_back(sys.cocycle(w, x));
  const MatrixStarAlgebra target = commutant_of(d, ix, tol);
  s.target_dim = target.dim();
  std::vector<Mat> values;
  for (const Mat& k : fixed.basis()) values.push_back(point_value(sys, k, x));
  s.image_dim = MatrixStarAlgebra::span_of(d, values, 1e-8).dim();
  for (const Mat& t : target.basis()) {
    std::vector<Mat> vals(static_cast<size_t>(sys.num_points()), Mat::Zero(d, d));
    vals[static_cast<size_t>(x)] = t;
    const Mat ht = function_element(sys, vals);
    Mat f = Mat::Zero(ht.rows(), ht.cols());
    for (int w = 0; w < sys.group().order(); ++w) f += alpha(sys, w, ht);
    f /= static_cast<double>(stab.size());
    s.averaging_residual = std::max(s.averaging_residual, frob(point_value(sys, f, x) - t));
    for (int w : sys.group().generators()) s.averaging_residual = std::max(s.averaging_residual, frob(alpha(sys, w, f) - f));
  }
  return s;
}

Z2Family z2_line_family() { return Z2Family{"z2-line", 2.0, 2, z2_line_cocycle}; }

Z2Family constant_family() {
  return Z2Family{"constant", 2.0, 2, [](double) {
                    Mat m = Mat::Identity(2, 2);
                    m(1, 1) = -1.0;
                    return m;
                  }};
}

std::vector<double> dyadic_reciprocals(int count) {
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

std::vector<double> reciprocals(int count) {
  std::vector<double> out;
  for (int n = 1; n <= count; ++n) out.push_back(1.0 / n);
  return out;
}

LimitCertificate fell_limit_certificate(const Z2Family& family, const std::vector<double>& sequence, double x0,
                                        int irrep_index, int tail, double threshold, double hat_width) {
  LimitCertificate cert;
  cert.family = family.name;
  cert.sequence = sequence;
  cert.limit_point = x0;
  const Index d = family.fiber_dim;
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const bool fixed_point = std::abs(x0) < 1e-15;
  const FiniteGroup stab = fixed_point ? z2 : FiniteGroup();
  const auto irreps = enumerate_irreps(stab);
  if (irrep_index < 0 || irrep_index >= static_cast<int>(irreps.size())) throw Error("fell_limit_certificate: no such irrep");
  const UnitaryRep& rho = irreps[static_cast<size_t>(irrep_index)];
  if (rho.dim() > 1) throw Error("fell_limit_certificate: only one-dimensional stabilizer irreps are supported");
  cert.irrep_label = rho.label;
  UnitaryRep ix{stab, {Mat::Identity(d, d)}, "I_x0"};
  if (fixed_point) ix.matrices.push_back(family.cocycle(x0));
  const Mat p = isotypic_projection(ix, rho);
  const double rank = p.trace().real();
  if (std::abs(rank - 1.0) > 1e-8) throw Error("fell_limit_certificate: the rho-isotypic part of I_x0 is not a line");
  Index col = 0;
  p.colwise().norm().maxCoeff(&col);
  const Vec xi0 = p.col(col) / p.col(col).norm();

  // W-averaged hats times matrix units: k(t) = (h(t) E + c(-t) h(-t) E c(-t)^*) / 2.
  std::vector<std::pair<double, Mat>> tests;
  for (double c = -family.half_width; c <= family.half_width + 1e-12; c += hat_width) {
    for (Index a = 0; a < d; ++a) {
      for (Index b = 0; b < d; ++b) {
        Mat e = Mat::Zero(d, d);
        e(a, b) = 1.0;
        tests.emplace_back(c, e);
      }
    }
  }
  auto hat = [&](double center, double t) { return std::max(0.0, 1.0 - std::abs(t - center) / hat_width); };
  auto value = [&](double center, const Mat& e, double t) {
    const Mat c = family.cocycle(-t);
    const Mat k = 0.5 * (hat(center, t) * e + hat(center, -t) * (c * e * c.adjoint()));
    return cplx(xi0.dot(k * xi0));
  };
  cert.scale = 1.0;
  for (double xn : sequence) {
    double worst = 0.0;
    for (const auto& [center, e] : tests) worst = std::max(worst, std::abs(value(center, e, xn) - value(center, e, x0)));
    cert.residuals.push_back(worst);
  }
  std::ostringstream os;
  if (static_cast<int>(sequence.size()) < tail) {
    os << "sequence shorter than the tail of " << tail;
  } else {
    double tail_max = 0.0;
    for (size_t i = sequence.size() - static_cast<size_t>(tail); i < sequence.size(); ++i) {
      tail_max = std::max(tail_max, cert.residuals[i]);
    }
    cert.accepted = tail_max < threshold * cert.scale;
    os << "max residual over the last " << tail << " samples is " << tail_max << (cert.accepted ? " < " : " >= ")
       << threshold * cert.scale;
  }
  cert.reason = os.str();
  return cert;
}

}  // namespace equivaria

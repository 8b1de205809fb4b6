#include "equivaria/grouprep.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace equivaria {

namespace {

std::vector<int> closure_of(const Table& mul, const std::vector<int>& gens) {
  std::vector<char> seen(mul.size(), 0);
  std::vector<int> out{0};
  seen[0] = 1;
  for (size_t i = 0; i < out.size(); ++i) {
    for (int g : gens) {
      const int y = mul[static_cast<size_t>(g)][static_cast<size_t>(out[i])];
      if (!seen[static_cast<size_t>(y)]) {
        seen[static_cast<size_t>(y)] = 1;
        out.push_back(y);
      }
    }
  }
  return out;
}

}  // namespace

FiniteGroup::FiniteGroup() : FiniteGroup(Table{{0}}, "trivial") {}

FiniteGroup::FiniteGroup(Table mul, std::string name) : mul_(std::move(mul)), name_(std::move(name)) {
  const size_t n = mul_.size();
  if (n == 0) throw ValidationError("group: order must be positive");
  for (size_t a = 0; a < n; ++a) {
    if (mul_[a].size() != n) throw ValidationError("group: multiplication table is not square");
    std::vector<char> row_seen(n, 0);
    for (size_t b = 0; b < n; ++b) {
      const int v = mul_[a][b];
      if (v < 0 || static_cast<size_t>(v) >= n) throw ValidationError("group: table entry out of range");
      if (row_seen[static_cast<size_t>(v)]) throw ValidationError("group: row " + std::to_string(a) + " repeats an element");
      row_seen[static_cast<size_t>(v)] = 1;
    }
  }
  for (size_t a = 0; a < n; ++a) {
    if (mul_[0][a] != static_cast<int>(a) || mul_[a][0] != static_cast<int>(a)) {
      throw ValidationError("group: element 0 is not the identity");
    }
  }
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      const size_t ab = static_cast<size_t>(mul_[a][b]);
      for (size_t c = 0; c < n; ++c) {
        if (mul_[ab][c] != mul_[a][static_cast<size_t>(mul_[b][c])]) {
          std::ostringstream os;
          os << "group: associativity fails at (" << a << ", " << b << ", " << c << ")";
          throw ValidationError(os.str());
        }
      }
    }
  }
  inv_.assign(n, -1);
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      if (mul_[a][b] == 0) {
        if (mul_[b][a] != 0) throw ValidationError("group: left and right inverses differ");
        inv_[a] = static_cast<int>(b);
      }
    }
    if (inv_[a] < 0) throw ValidationError("group: element without inverse");
  }
  std::vector<int> reached{0};
  for (int g = 0; g < order(); ++g) {
    if (std::find(reached.begin(), reached.end(), g) != reached.end()) continue;
    generators_.push_back(g);
    reached = closure_of(mul_, generators_);
  }
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n <= 0) throw ValidationError("cyclic group: order must be positive");
  Table t(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) t[static_cast<size_t>(a)][static_cast<size_t>(b)] = (a + b) % n;
  }
  return FiniteGroup(std::move(t), "Z" + std::to_string(n));
}

FiniteGroup FiniteGroup::klein_four() {
  FiniteGroup g = direct_product(cyclic(2), cyclic(2));
  return FiniteGroup(g.table(), "Z2xZ2");
}

FiniteGroup FiniteGroup::symmetric3() { return from_permutations({{1, 0, 2}, {1, 2, 0}}, "S3"); }

FiniteGroup FiniteGroup::dihedral(int order) {
  if (order < 2 || order % 2 != 0) throw ValidationError("dihedral group: order must be even and positive");
  const int k = order / 2;
  // r^i s^j has index i + k * j; (r^a s^b)(r^c s^d) = r^{a + (-1)^b c} s^{b + d}.
  Table t(static_cast<size_t>(order), std::vector<int>(static_cast<size_t>(order)));
  for (int x = 0; x < order; ++x) {
    for (int y = 0; y < order; ++y) {
      const int a = x % k, b = x / k, c = y % k, d = y / k;
      const int r = (((a + (b ? -c : c)) % k) + k) % k;
      t[static_cast<size_t>(x)][static_cast<size_t>(y)] = r + k * ((b + d) % 2);
    }
  }
  return FiniteGroup(std::move(t), "D" + std::to_string(order));
}

FiniteGroup FiniteGroup::quaternion8() {
  const cplx i(0, 1);
  Mat qi(2, 2), qj(2, 2);
  qi << i, 0, 0, -i;
  qj << 0, 1, -1, 0;
  return matrix_group_closure({qi, qj}, "Q8").group;
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& g, const FiniteGroup& h) {
  const int n = g.order() * h.order();
  Table t(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const int a = g.mul(x / h.order(), y / h.order());
      const int b = h.mul(x % h.order(), y % h.order());
      t[static_cast<size_t>(x)][static_cast<size_t>(y)] = a * h.order() + b;
    }
  }
  std::string name = g.name().empty() || h.name().empty() ? std::string() : g.name() + "x" + h.name();
  return FiniteGroup(std::move(t), std::move(name));
}

FiniteGroup FiniteGroup::from_permutations(const std::vector<std::vector<int>>& gens, std::string name) {
  if (gens.empty()) return FiniteGroup(Table{{0}}, std::move(name));
  const size_t deg = gens.front().size();
  for (const auto& p : gens) {
    if (p.size() != deg) throw ValidationError("permutation generators have different degrees");
    std::vector<int> s = p;
    std::sort(s.begin(), s.end());
    for (size_t i = 0; i < deg; ++i) {
      if (s[i] != static_cast<int>(i)) throw ValidationError("generator is not a permutation");
    }
  }
  auto compose = [](const std::vector<int>& p, const std::vector<int>& q) {
    std::vector<int> r(q.size());
    for (size_t i = 0; i < q.size(); ++i) r[i] = p[static_cast<size_t>(q[i])];
    return r;
  };
  std::vector<int> id(deg);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::vector<int>> elems{id};
  std::map<std::vector<int>, int> index{{id, 0}};
  for (size_t i = 0; i < elems.size(); ++i) {
    for (const auto& g : gens) {
      auto y = compose(g, elems[i]);
      if (!index.count(y)) {
        index.emplace(y, static_cast<int>(elems.size()));
        elems.push_back(std::move(y));
      }
    }
  }
  const size_t n = elems.size();
  Table t(n, std::vector<int>(n));
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) t[a][b] = index.at(compose(elems[a], elems[b]));
  }
  return FiniteGroup(std::move(t), std::move(name));
}

MatrixGroup matrix_group_closure(const std::vector<Mat>& gens, std::string name, double tol) {
  if (gens.empty()) throw ValidationError("matrix group: no generators");
  const Index d = gens.front().rows();
  std::vector<Mat> elems{Mat::Identity(d, d)};
  auto find = [&](const Mat& m) -> int {
    for (size_t k = 0; k < elems.size(); ++k) {
      if ((elems[k] - m).norm() <= std::max(tol, 1e-8) * std::max(1.0, m.norm())) return static_cast<int>(k);
    }
    return -1;
  };
  for (size_t i = 0; i < elems.size(); ++i) {
    for (const Mat& g : gens) {
      Mat y = g * elems[i];
      if (find(y) < 0) {
        elems.push_back(std::move(y));
        if (elems.size() > 4096) throw ValidationError("matrix group: closure exceeds 4096 elements");
      }
    }
  }
  const size_t n = elems.size();
  Table t(n, std::vector<int>(n));
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      const int k = find(elems[a] * elems[b]);
      if (k < 0) throw ValidationError("matrix group: not closed");
      t[a][b] = k;
    }
  }
  return MatrixGroup{FiniteGroup(std::move(t), std::move(name)), std::move(elems)};
}

MatrixGroup square_symmetries() {
  Mat s(2, 2), t(2, 2);
  s << 1, 0, 0, -1;
  t << 0, 1, 1, 0;
  return matrix_group_closure({s, t}, "D8");
}

Subgroup make_subgroup(const FiniteGroup& g, std::vector<int> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (elements.empty() || elements.front() != 0) throw ValidationError("subgroup: identity missing");
  std::map<int, int> local;
  for (size_t i = 0; i < elements.size(); ++i) {
    const int e = elements[i];
    if (e < 0 || e >= g.order()) throw ValidationError("subgroup: element out of range");
    local.emplace(e, static_cast<int>(i));
  }
  const size_t n = elements.size();
  Table t(n, std::vector<int>(n));
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      auto it = local.find(g.mul(elements[a], elements[b]));
      if (it == local.end()) throw ValidationError("subgroup: element set is not closed under multiplication");
      t[a][b] = it->second;
    }
  }
  return Subgroup{FiniteGroup(std::move(t)), std::move(elements)};
}

bool is_normal_subgroup(const FiniteGroup& g, const std::vector<int>& elements) {
  std::set<int> s(elements.begin(), elements.end());
  for (int w = 0; w < g.order(); ++w) {
    for (int v : elements) {
      if (!s.count(g.mul(w, g.mul(v, g.inv(w))))) return false;
    }
  }
  return true;
}

Vec UnitaryRep::character() const {
  Vec chi(static_cast<Index>(matrices.size()));
  for (size_t g = 0; g < matrices.size(); ++g) chi(static_cast<Index>(g)) = matrices[g].trace();
  return chi;
}

double RepResiduals::max() const { return std::max({homomorphism, unitarity, identity}); }

RepResiduals rep_residuals(const UnitaryRep& rep) {
  RepResiduals r;
  const FiniteGroup& g = rep.group;
  if (static_cast<int>(rep.matrices.size()) != g.order()) throw ValidationError("representation: wrong number of matrices");
  const Index d = rep.dim();
  for (const Mat& m : rep.matrices) {
    if (m.rows() != d || m.cols() != d) throw ValidationError("representation: matrices have inconsistent shapes");
  }
  const Mat id = Mat::Identity(d, d);
  r.identity = (rep(0) - id).norm();
  for (int a = 0; a < g.order(); ++a) {
    r.unitarity = std::max(r.unitarity, (rep(a).adjoint() * rep(a) - id).norm());
    for (int b = 0; b < g.order(); ++b) {
      r.homomorphism = std::max(r.homomorphism, (rep(g.mul(a, b)) - rep(a) * rep(b)).norm());
    }
  }
  return r;
}

void validate_rep(const UnitaryRep& rep, double tol) {
  const RepResiduals r = rep_residuals(rep);
  const double scale = std::max(1.0, std::sqrt(static_cast<double>(rep.dim())));
  if (r.identity > tol * scale) throw ValidationError("representation: identity element not mapped to the identity matrix");
  if (r.unitarity > tol * scale) throw ValidationError("representation: a matrix is not unitary");
  if (r.homomorphism > tol * scale) throw ValidationError("representation: homomorphism law violated");
}

UnitaryRep regular_rep(const FiniteGroup& g) {
  const int n = g.order();
  UnitaryRep rep{g, {}, "regular"};
  rep.matrices.reserve(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) {
    Mat m = Mat::Zero(n, n);
    for (int v = 0; v < n; ++v) m(g.mul(a, v), v) = 1.0;
    rep.matrices.push_back(std::move(m));
  }
  return rep;
}

UnitaryRep trivial_rep(const FiniteGroup& g, int dim) {
  return UnitaryRep{g, std::vector<Mat>(static_cast<size_t>(g.order()), Mat::Identity(dim, dim)), "trivial"};
}

UnitaryRep restrict_rep(const UnitaryRep& rep, const Subgroup& sub) {
  UnitaryRep out{sub.group, {}, rep.label};
  for (int p : sub.to_parent) out.matrices.push_back(rep(p));
  return out;
}

UnitaryRep direct_sum(const UnitaryRep& a, const UnitaryRep& b) {
  if (!(a.group == b.group)) throw Error("direct_sum: group mismatch");
  UnitaryRep out{a.group, {}, {}};
  const Index da = a.dim(), db = b.dim();
  for (int g = 0; g < a.group.order(); ++g) {
    Mat m = Mat::Zero(da + db, da + db);
    m.topLeftCorner(da, da) = a(g);
    m.bottomRightCorner(db, db) = b(g);
    out.matrices.push_back(std::move(m));
  }
  return out;
}

cplx character_inner(const Vec& a, const Vec& b) {
  if (a.size() != b.size() || a.size() == 0) throw Error("character_inner: size mismatch");
  return b.dot(a) / static_cast<double>(a.size());
}

namespace {

// Averages M over the group action X -> S(g) X S(g)^*, which is the
// orthogonal projection onto the commutant of the representation.
Mat reynolds(const std::vector<Mat>& mats, const Mat& m) {
  Mat acc = Mat::Zero(m.rows(), m.cols());
  for (const Mat& s : mats) acc += s * m * s.adjoint();
  return acc / static_cast<double>(mats.size());
}

// Character comparison: larger real part first, then larger imaginary part.
bool character_before(const Vec& a, const Vec& b) {
  constexpr double eps = 1e-6;
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i).real() - b(i).real()) > eps) return a(i).real() > b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > eps) return a(i).imag() > b(i).imag();
  }
  return false;
}

}  // namespace

std::vector<UnitaryRep> enumerate_irreps(const FiniteGroup& g, std::uint64_t seed, double tol) {
  Rng rng(seed);
  const UnitaryRep reg = regular_rep(g);
  const int n = g.order();
  std::vector<UnitaryRep> found;
  std::vector<Vec> characters;
  int total = 0;

  constexpr int kMaxAttempts = 16;
  std::vector<Mat> pending{Mat::Identity(n, n)};
  while (!pending.empty() && total < n) {
    Mat basis = std::move(pending.back());
    pending.pop_back();
    std::vector<Mat> sub;
    sub.reserve(static_cast<size_t>(n));
    for (const Mat& m : reg.matrices) sub.push_back(basis.adjoint() * m * basis);
    Vec chi(n);
    for (int a = 0; a < n; ++a) chi(a) = sub[static_cast<size_t>(a)].trace();
    const double norm2 = character_inner(chi, chi).real();
    if (std::abs(norm2 - 1.0) < 1e-6) {
      bool known = false;
      for (const Vec& c : characters) known = known || std::abs(character_inner(chi, c)) > 0.5;
      if (!known) {
        characters.push_back(chi);
        found.push_back(UnitaryRep{g, std::move(sub), {}});
        total += found.back().dim() * found.back().dim();
      }
      continue;
    }
    // Reducible: split along the eigenspaces of a random Hermitian element
    // of the commutant.
    const Index k = basis.cols();
    bool split = false;
    for (int attempt = 0; attempt < kMaxAttempts && !split; ++attempt) {
      Mat h = hermitian_part(reynolds(sub, random_hermitian(k, rng)));
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      const Eigen::VectorXd& ev = es.eigenvalues();
      const double spread = std::max(1.0, ev.cwiseAbs().maxCoeff());
      const auto runs = cluster_sorted(ev, std::max(1e-6, 1e3 * tol) * spread);
      if (runs.size() < 2) continue;
      for (const auto& [b, e] : runs) pending.push_back(basis * es.eigenvectors().middleCols(b, e - b));
      split = true;
    }
    if (!split) throw NumericError("enumerate_irreps: failed to split a reducible subspace; reseed or raise tolerance");
  }
  if (total != n) throw NumericError("enumerate_irreps: sum of squared dimensions does not equal the group order");

  std::vector<size_t> order(found.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (found[a].dim() != found[b].dim()) return found[a].dim() < found[b].dim();
    return character_before(characters[a], characters[b]);
  });
  std::vector<UnitaryRep> out;
  for (size_t i = 0; i < order.size(); ++i) {
    out.push_back(std::move(found[order[i]]));
    out.back().label = "rho" + std::to_string(i);
  }
  return out;
}

Mat isotypic_projection(const UnitaryRep& pi, const UnitaryRep& rho) {
  if (!(pi.group == rho.group)) throw Error("isotypic_projection: group mismatch");
  const Vec chi = rho.character();
  Mat p = Mat::Zero(pi.dim(), pi.dim());
  for (int w = 0; w < pi.group.order(); ++w) p += std::conj(chi(w)) * pi(w);
  return p * (static_cast<double>(rho.dim()) / pi.group.order());
}

std::vector<Mat> equivariant_maps(const UnitaryRep& rho, const UnitaryRep& pi, double tol) {
  if (!(pi.group == rho.group)) throw Error("equivariant_maps: group mismatch");
  const Index dr = rho.dim(), dp = pi.dim();
  if (dr == 0 || dp == 0) return {};
  // vec(s rho(w) - pi(w) s) = (rho(w)^T kron 1 - 1 kron pi(w)) vec(s)
  const Mat ip = Mat::Identity(dp, dp), ir = Mat::Identity(dr, dr);
  Mat gram = Mat::Zero(dr * dp, dr * dp);
  for (int w : pi.group.generators()) {
    const Mat k = kron(rho(w).transpose(), ip) - kron(ir, pi(w));
    gram += k.adjoint() * k;
  }
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> out;
  for (Index j = 0; j < null.cols(); ++j) out.push_back(unvec(null.col(j), dp, dr));
  return out;
}

Mat mu_isometry(const UnitaryRep& pi, const UnitaryRep& rho, double tol) {
  const std::vector<Mat> maps = equivariant_maps(rho, pi, tol);
  if (maps.empty()) throw Error("mu_isometry: rho does not occur in pi");
  const Index dr = rho.dim();
  const Index m = static_cast<Index>(maps.size());
  const double scale = std::sqrt(static_cast<double>(dr));
  Mat mu(pi.dim(), dr * m);
  for (Index a = 0; a < dr; ++a) {
    for (Index j = 0; j < m; ++j) mu.col(a * m + j) = scale * maps[static_cast<size_t>(j)].col(a);
  }
  return mu;
}

IsotypicDecomposition isotypic_decomposition(const UnitaryRep& pi, const std::vector<UnitaryRep>& irreps, double) {
  IsotypicDecomposition out{pi, {}};
  for (size_t i = 0; i < irreps.size(); ++i) {
    Mat p = isotypic_projection(pi, irreps[i]);
    const double rank = p.trace().real();
    const int mult = static_cast<int>(std::lround(rank / irreps[i].dim()));
    out.parts.push_back(IsotypicPart{static_cast<int>(i), irreps[i].label, mult, std::move(p)});
  }
  return out;
}

double schur_orthogonality_residual(const UnitaryRep& rho, Rng& rng, int trials) {
  const Index d = rho.dim();
  const int n = rho.group.order();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vec xi = random_unit_vector(d, rng), eta = random_unit_vector(d, rng);
    const Vec xi2 = random_unit_vector(d, rng), eta2 = random_unit_vector(d, rng);
    cplx lhs = 0.0;
    for (int w = 0; w < n; ++w) {
      const cplx c1 = (rho(w) * xi).dot(eta);
      const cplx c2 = (rho(w) * xi2).dot(eta2);
      lhs += std::conj(c1) * c2;
    }
    lhs /= static_cast<double>(n);
    const cplx rhs = std::conj(xi.dot(xi2)) * eta.dot(eta2) / static_cast<double>(d);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

int find_irrep(const std::vector<UnitaryRep>& irreps, const UnitaryRep& rep, double tol) {
  const Vec chi = rep.character();
  for (size_t i = 0; i < irreps.size(); ++i) {
    if (irreps[i].dim() != rep.dim()) continue;
    if (std::abs(character_inner(chi, irreps[i].character()) - 1.0) < tol) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace equivaria

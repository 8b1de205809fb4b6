#include "equivaria/matalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace equivaria {

namespace {

constexpr int kMaxReseeds = 8;

// Relative threshold used to separate eigenvalue clusters of random elements.
double gap_threshold(double tol) { return std::max(1e-6, 1e3 * tol); }

Mat stack_vecs(const std::vector<Mat>& ms, Index rows) {
  Mat q(rows, static_cast<Index>(ms.size()));
  for (size_t k = 0; k < ms.size(); ++k) q.col(static_cast<Index>(k)) = vec(ms[k]);
  return q;
}

std::vector<SpMat> sparse_basis(const std::vector<Mat>& ms) {
  std::vector<SpMat> out;
  out.reserve(ms.size());
  for (const Mat& m : ms) out.push_back(to_sparse(m));
  return out;
}

bool contains_all_sparse(const MatrixStarAlgebra& alg, const std::vector<SpMat>& as, double tol) {
  if (as.empty()) return true;
  const SpMat cols = sparse_vec_columns(as);
  const Eigen::VectorXd res = alg.residuals(cols);
  for (Index k = 0; k < cols.cols(); ++k) {
    if (res(k) > tol * std::max(1.0, cols.col(k).norm())) return false;
  }
  return true;
}

std::vector<Mat> with_adjoints(const std::vector<Mat>& ops, double tol) {
  std::vector<Mat> out;
  for (const Mat& t : ops) {
    out.push_back(t);
    if (frob(t - t.adjoint()) > tol * std::max(1.0, frob(t))) out.push_back(t.adjoint());
  }
  return out;
}

// Maps coefficient vectors of a nullspace back to elements of `a`.
MatrixStarAlgebra from_coefficients(const MatrixStarAlgebra& a, const Mat& coeffs) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(coeffs.cols()));
  for (Index j = 0; j < coeffs.cols(); ++j) basis.push_back(a.element(coeffs.col(j)));
  return MatrixStarAlgebra::from_orthonormal(a.ambient_dim(), std::move(basis));
}

}  // namespace

MatrixStarAlgebra::MatrixStarAlgebra(Index ambient) : n_(ambient), q_(ambient * ambient, 0) {}

MatrixStarAlgebra MatrixStarAlgebra::from_orthonormal(Index ambient, std::vector<Mat> basis) {
  MatrixStarAlgebra a(ambient);
  for (const Mat& b : basis) {
    if (b.rows() != ambient || b.cols() != ambient) throw Error("MatrixStarAlgebra: basis element has wrong shape");
  }
  a.basis_ = std::move(basis);
  a.rebuild();
  const Mat g = a.q_.adjoint() * a.q_;
  if (frob(g - Mat::Identity(g.rows(), g.cols())) > 1e-8 * std::max<double>(1.0, static_cast<double>(g.rows()))) {
    throw NumericError("MatrixStarAlgebra: basis is not orthonormal");
  }
  return a;
}

MatrixStarAlgebra MatrixStarAlgebra::span_of(Index ambient, const std::vector<Mat>& elements, double tol) {
  SpanBuilder sb(ambient * ambient, tol);
  for (const Mat& e : elements) {
    if (e.rows() != ambient || e.cols() != ambient) throw Error("span_of: element has wrong shape");
    sb.add(vec(e));
  }
  std::vector<Mat> basis;
  for (const Vec& v : sb.basis()) basis.push_back(unvec(v, ambient, ambient));
  return from_orthonormal(ambient, std::move(basis));
}

void MatrixStarAlgebra::rebuild() {
  q_ = stack_vecs(basis_, n_ * n_);
  support_.clear();
  row_pos_.assign(static_cast<size_t>(n_ * n_), -1);
  for (Index r = 0; r < q_.rows(); ++r) {
    bool nonzero = false;
    for (Index k = 0; k < q_.cols() && !nonzero; ++k) nonzero = q_(r, k) != cplx(0.0, 0.0);
    if (!nonzero) continue;
    row_pos_[static_cast<size_t>(r)] = static_cast<Index>(support_.size());
    support_.push_back(r);
  }
  q_support_.resize(static_cast<Index>(support_.size()), q_.cols());
  for (size_t i = 0; i < support_.size(); ++i) q_support_.row(static_cast<Index>(i)) = q_.row(support_[i]);
  unital_ = n_ > 0 && residual(Mat::Identity(n_, n_)) < 1e-8 * std::sqrt(static_cast<double>(n_));
}

Vec MatrixStarAlgebra::coefficients(const Mat& a) const {
  if (a.rows() != n_ || a.cols() != n_) throw Error("coefficients: shape mismatch");
  return q_.adjoint() * vec(a);
}

Mat MatrixStarAlgebra::element(const Vec& coeffs) const {
  if (coeffs.size() != dim()) throw Error("element: coefficient length mismatch");
  return unvec(q_ * coeffs, n_, n_);
}

double MatrixStarAlgebra::residual(const Mat& a) const {
  if (a.rows() != n_ || a.cols() != n_) throw Error("residual: shape mismatch");
  return residuals(Mat(vec(a)))(0);
}

bool MatrixStarAlgebra::contains(const Mat& a, double tol) const {
  return residual(a) <= tol * std::max(1.0, frob(a));
}

// Entries off the support are orthogonal to the span and count in full.
Eigen::VectorXd MatrixStarAlgebra::residuals(const Mat& columns) const {
  if (dim() == 0) return columns.colwise().norm().transpose();
  const Index s = static_cast<Index>(support_.size());
  Mat inside(s, columns.cols());
  for (Index i = 0; i < s; ++i) inside.row(i) = columns.row(support_[static_cast<size_t>(i)]);
  Eigen::VectorXd outside = Eigen::VectorXd::Zero(columns.cols());
  for (Index c = 0; c < columns.cols(); ++c) {
    for (Index r = 0; r < columns.rows(); ++r) {
      if (row_pos_[static_cast<size_t>(r)] < 0) outside(c) += std::norm(columns(r, c));
    }
  }
  inside.noalias() -= q_support_ * (q_support_.adjoint() * inside);
  return (inside.colwise().squaredNorm().transpose() + outside).cwiseSqrt();
}

Eigen::VectorXd MatrixStarAlgebra::residuals(const SpMat& columns) const {
  const Index s = static_cast<Index>(support_.size());
  Mat inside = Mat::Zero(s, columns.cols());
  Eigen::VectorXd outside = Eigen::VectorXd::Zero(columns.cols());
  for (Index c = 0; c < columns.outerSize(); ++c) {
    for (SpMat::InnerIterator it(columns, c); it; ++it) {
      const Index p = dim() == 0 ? -1 : row_pos_[static_cast<size_t>(it.row())];
      if (p < 0) outside(c) += std::norm(it.value());
      else inside(p, c) = it.value();
    }
  }
  if (dim() > 0) inside.noalias() -= q_support_ * (q_support_.adjoint() * inside);
  return (inside.colwise().squaredNorm().transpose() + outside).cwiseSqrt();
}

bool MatrixStarAlgebra::contains_all(const std::vector<Mat>& as, double tol) const {
  std::vector<SpMat> sp;
  for (const Mat& a : as) sp.push_back(to_sparse(a));
  return contains_all_sparse(*this, sp, tol);
}

double MatrixStarAlgebra::closure_residual() const {
  double worst = 0.0;
  const std::vector<SpMat> sp = sparse_basis(basis_);
  std::vector<SpMat> batch;
  for (const SpMat& a : sp) {
    batch.clear();
    batch.push_back(a.adjoint());
    for (const SpMat& b : sp) batch.push_back((a * b).pruned(0.0));
    worst = std::max(worst, residuals(sparse_vec_columns(batch)).maxCoeff());
  }
  return worst;
}

Mat MatrixStarAlgebra::unit(double tol) const {
  if (dim() == 0) return Mat::Zero(n_, n_);
  // Least squares for e with e b = b and b e = b over the basis.
  const Index k = dim();
  Mat g = Mat::Zero(k, k);
  Vec h = Vec::Zero(k);
  for (const Mat& b : basis_) {
    Mat left(n_ * n_, k), right(n_ * n_, k);
    for (Index i = 0; i < k; ++i) {
      left.col(i) = vec(basis_[static_cast<size_t>(i)] * b);
      right.col(i) = vec(b * basis_[static_cast<size_t>(i)]);
    }
    const Vec target = vec(b);
    g += left.adjoint() * left + right.adjoint() * right;
    h += left.adjoint() * target + right.adjoint() * target;
  }
  const Vec c = g.ldlt().solve(h);
  Mat e = hermitian_part(element(c));
  for (const Mat& b : basis_) {
    if (frob(e * b - b) > 1e3 * tol * std::max(1.0, frob(b)) + 1e-7) {
      throw NumericError("unit: algebra has no unit to tolerance");
    }
  }
  return e;
}

MatrixStarAlgebra full_matrix_algebra(Index n) {
  std::vector<Mat> basis;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  }
  return MatrixStarAlgebra::from_orthonormal(n, std::move(basis));
}

MatrixStarAlgebra scalar_algebra(Index n) {
  if (n == 0) return MatrixStarAlgebra(0);
  return MatrixStarAlgebra::from_orthonormal(n, {Mat::Identity(n, n) / std::sqrt(static_cast<double>(n))});
}

MatrixStarAlgebra diagonal_algebra(Index n) {
  std::vector<Mat> basis;
  for (Index i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  return MatrixStarAlgebra::from_orthonormal(n, std::move(basis));
}

Mat block_diagonal(const std::vector<Mat>& parts) {
  Index n = 0;
  for (const Mat& p : parts) n += p.rows();
  Mat out = Mat::Zero(n, n);
  Index off = 0;
  for (const Mat& p : parts) {
    out.block(off, off, p.rows(), p.cols()) = p;
    off += p.rows();
  }
  return out;
}

MatrixStarAlgebra direct_sum(const std::vector<MatrixStarAlgebra>& parts) {
  Index n = 0;
  for (const auto& p : parts) n += p.ambient_dim();
  std::vector<Mat> basis;
  Index off = 0;
  for (const auto& p : parts) {
    for (const Mat& b : p.basis()) {
      Mat e = Mat::Zero(n, n);
      e.block(off, off, b.rows(), b.cols()) = b;
      basis.push_back(e);
    }
    off += p.ambient_dim();
  }
  return MatrixStarAlgebra::from_orthonormal(n, std::move(basis));
}

MatrixStarAlgebra generate(const std::vector<Mat>& gens, double tol) {
  if (gens.empty()) return MatrixStarAlgebra(0);
  const Index n = gens.front().rows();
  std::vector<Mat> letters;
  for (const Mat& g : gens) {
    if (g.rows() != n || g.cols() != n) throw Error("generate: generators must be square of equal size");
    letters.push_back(g);
    letters.push_back(g.adjoint());
  }
  SpanBuilder sb(n * n, tol);
  for (const Mat& g : letters) sb.add(vec(g));
  // Right multiplication by every letter, processed breadth first; the span
  // of words is closed once each basis element has been processed.
  for (Index done = 0; done < sb.size(); ++done) {
    const Mat b = unvec(sb.basis()[static_cast<size_t>(done)], n, n);
    for (const Mat& g : letters) sb.add(vec(b * g));
  }
  std::vector<Mat> basis;
  for (const Vec& v : sb.basis()) basis.push_back(unvec(v, n, n));
  return MatrixStarAlgebra::from_orthonormal(n, std::move(basis));
}

MatrixStarAlgebra commutant_of(Index n, const std::vector<Mat>& ops, double tol) {
  if (n == 0) return MatrixStarAlgebra(0);
  const Mat id = Mat::Identity(n, n);
  Mat gram = Mat::Zero(n * n, n * n);
  // K = s^T (x) I - I (x) s encodes vec(x s - s x); accumulate K^* K directly.
  for (const Mat& s : with_adjoints(ops, tol)) {
    const Mat sc = s.conjugate();
    gram += kron(sc * s.transpose(), id) - kron(sc, s) - kron(s.transpose(), s.adjoint()) + kron(id, s.adjoint() * s);
  }
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> basis;
  for (Index j = 0; j < null.cols(); ++j) basis.push_back(unvec(null.col(j), n, n));
  return MatrixStarAlgebra::from_orthonormal(n, std::move(basis));
}

MatrixStarAlgebra commutant(const MatrixStarAlgebra& s, double tol) { return commutant_of(s.ambient_dim(), s.basis(), tol); }

MatrixStarAlgebra commutant_within(const MatrixStarAlgebra& a, const std::vector<Mat>& ops, double tol) {
  const Index k = a.dim();
  if (k == 0) return MatrixStarAlgebra(a.ambient_dim());
  Mat gram = Mat::Zero(k, k);
  const std::vector<SpMat> sa = sparse_basis(a.basis());
  std::vector<SpMat> cols(static_cast<size_t>(k));
  for (const Mat& t : with_adjoints(ops, tol)) {
    const SpMat st = to_sparse(t);
    for (Index j = 0; j < k; ++j) {
      const SpMat& b = sa[static_cast<size_t>(j)];
      cols[static_cast<size_t>(j)] = b * st - st * b;
    }
    const SpMat c = sparse_vec_columns(cols);
    gram += Mat(c.adjoint() * c);
  }
  return from_coefficients(a, gram_nullspace(gram, tol));
}

MatrixStarAlgebra center(const MatrixStarAlgebra& a, double tol) { return commutant_within(a, a.basis(), tol); }

double inclusion_residual(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw Error("inclusion_residual: ambient dimensions differ");
  if (a.dim() == 0) return 0.0;
  return b.residuals(a.frame()).maxCoeff();
}

double span_distance(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b) {
  if (a.dim() != b.dim()) return 1.0;
  return std::max(inclusion_residual(a, b), inclusion_residual(b, a));
}

bool same_span(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b, double tol) {
  return a.dim() == b.dim() && span_distance(a, b) <= tol;
}

std::vector<Index> BlockStructure::sizes() const {
  std::vector<Index> out;
  for (const auto& b : blocks) out.push_back(b.size);
  return out;
}

Mat BlockStructure::unit(Index ambient) const {
  Mat e = Mat::Zero(ambient, ambient);
  for (const auto& b : blocks) e += b.central_projection;
  return e;
}

namespace {

// Minimal central projections of `a` from one random draw, or empty on a
// degenerate draw.
std::vector<Mat> central_projections(const MatrixStarAlgebra& z, Rng& rng, double tol) {
  const Index k = z.dim();
  Vec r = random_gaussian(k, 1, rng);
  Mat h = hermitian_part(z.element(r));
  Mat lz(k, k);
  for (Index j = 0; j < k; ++j) {
    const Mat hz = h * z.basis(j);
    for (Index i = 0; i < k; ++i) lz(i, j) = (z.basis(i).adjoint() * hz).trace();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(lz));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double spread = std::max(ev(k - 1) - ev(0), 1e-300);
  for (Index i = 1; i < k; ++i) {
    if (ev(i) - ev(i - 1) <= gap_threshold(tol) * spread) return {};
  }
  std::vector<Mat> out;
  for (Index i = 0; i < k; ++i) {
    Mat p = z.element(es.eigenvectors().col(i));
    const cplx tr = p.trace();
    if (std::abs(tr) < 1e-12) return {};
    const cplx c = (p * p).trace() / tr;
    p = hermitian_part(p / c);
    if (frob(p * p - p) > 1e-6 * std::max(1.0, frob(p))) return {};
    out.push_back(p);
  }
  return out;
}

// Isometry onto an irreducible subspace of the block cut out by p, or an
// empty matrix on a degenerate draw.
Mat block_irrep(const MatrixStarAlgebra& a, const Mat& p, Index n, Index m, Rng& rng, double tol) {
  const Index big = a.ambient_dim();
  Mat h = Mat::Zero(big, big);
  for (const Mat& b : a.basis()) {
    std::normal_distribution<double> nd(0.0, 1.0);
    h += cplx(nd(rng), nd(rng)) * (b * p);
  }
  h = hermitian_part(h);
  const double hn = spectral_norm(h);
  if (hn > 0) h /= hn;
  h += 3.0 * p;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  Index first = 0;
  while (first < big && ev(first) < 1.0) ++first;
  if (big - first != n * m) return {};
  const Eigen::VectorXd top = ev.tail(big - first);
  const auto runs = cluster_sorted(top, gap_threshold(tol));
  if (static_cast<Index>(runs.size()) != n) return {};
  for (const auto& run : runs) {
    if (run.second - run.first != m) return {};
  }
  const Vec v = es.eigenvectors().col(first);
  Mat images(big, a.dim());
  for (Index j = 0; j < a.dim(); ++j) images.col(j) = a.basis(j) * v;
  Mat u = orthonormal_span(images, 1e-8);
  if (u.cols() != n) return {};
  return u;
}

Index first_support_index(const Mat& p) {
  for (Index i = 0; i < p.rows(); ++i) {
    if (std::abs(p(i, i)) > 1e-6) return i;
  }
  return p.rows();
}

}  // namespace

BlockStructure block_decompose(const MatrixStarAlgebra& a, std::uint64_t seed, double tol) {
  BlockStructure out;
  if (a.dim() == 0) return out;
  const MatrixStarAlgebra z = center(a, tol);
  Rng rng(seed);
  std::vector<Mat> projections;
  for (int attempt = 0; attempt < kMaxReseeds && projections.empty(); ++attempt) {
    projections = central_projections(z, rng, tol);
  }
  if (projections.empty()) throw NumericError("block_decompose: center did not split after bounded reseeds");

  for (const Mat& p : projections) {
    Block blk;
    blk.central_projection = p;
    Mat ap(a.ambient_dim() * a.ambient_dim(), a.dim());
    for (Index j = 0; j < a.dim(); ++j) ap.col(j) = vec(a.basis(j) * p);
    const Index d = orthonormal_span(ap, 1e-8).cols();
    const Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(d))));
    const Index rank = static_cast<Index>(std::llround(p.trace().real()));
    if (n * n != d || n == 0 || rank % n != 0) throw NumericError("block_decompose: block is not a full matrix algebra");
    blk.size = n;
    blk.multiplicity = rank / n;
    for (int attempt = 0; attempt < kMaxReseeds && blk.irrep_basis.size() == 0; ++attempt) {
      blk.irrep_basis = block_irrep(a, p, n, blk.multiplicity, rng, tol);
    }
    if (blk.irrep_basis.size() == 0) throw NumericError("block_decompose: could not isolate a minimal projection");
    out.blocks.push_back(std::move(blk));
  }
  std::sort(out.blocks.begin(), out.blocks.end(), [](const Block& x, const Block& y) {
    if (x.size != y.size) return x.size < y.size;
    if (x.multiplicity != y.multiplicity) return x.multiplicity < y.multiplicity;
    return first_support_index(x.central_projection) < first_support_index(y.central_projection);
  });
  return out;
}

double operator_norm(const Mat& a) { return spectral_norm(a); }

bool is_positive(const Mat& a, const MatrixStarAlgebra& within, double tol) {
  const double scale = std::max(1.0, frob(a));
  if (within.residual(a) > tol * scale) throw Error("is_positive: element lies outside the algebra");
  if (frob(a - a.adjoint()) > tol * scale) return false;
  return min_eigenvalue(a) >= -tol * scale;
}

State state_from_density(const MatrixStarAlgebra& a, const Mat& density) {
  State s;
  s.functional.resize(a.dim());
  for (Index k = 0; k < a.dim(); ++k) s.functional(k) = (density * a.basis(k)).trace();
  return s;
}

cplx evaluate(const State& phi, const MatrixStarAlgebra& a, const Mat& x) {
  return (phi.functional.transpose() * a.coefficients(x))(0);
}

Mat left_multiplication(const MatrixStarAlgebra& a, const Mat& x) {
  Mat l(a.dim(), a.dim());
  for (Index j = 0; j < a.dim(); ++j) l.col(j) = a.coefficients(x * a.basis(j));
  return l;
}

GnsRepresentation gns(const MatrixStarAlgebra& a, const State& phi, double tol, std::uint64_t seed) {
  const Index k = a.dim();
  if (phi.functional.size() != k) throw Error("gns: functional length does not match the algebra");
  GnsRepresentation out;
  if (k == 0) return out;
  // M_{jk} = phi(b_j^* b_k) is the semi-inner product on coefficient space.
  Mat m(k, k);
  for (Index j = 0; j < k; ++j) {
    for (Index l = 0; l < k; ++l) m(j, l) = evaluate(phi, a, a.basis(j).adjoint() * a.basis(l));
  }
  const double scale = std::max(1.0, m.norm());
  if (frob(m - m.adjoint()) > 1e3 * tol * scale) throw ValidationError("gns: functional is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev(0) < -1e3 * tol * scale) throw ValidationError("gns: functional is not positive");
  const double cut = 1e3 * tol * scale;
  std::vector<Index> keep, drop;
  for (Index i = 0; i < k; ++i) (ev(i) > cut ? keep : drop).push_back(i);
  out.dim = static_cast<Index>(keep.size());
  out.null_ideal.resize(k, static_cast<Index>(drop.size()));
  for (size_t i = 0; i < drop.size(); ++i) out.null_ideal.col(static_cast<Index>(i)) = es.eigenvectors().col(drop[i]);
  // Orthonormal quotient basis u_i = v_i / sqrt(lambda_i).
  Mat u(k, out.dim);
  for (size_t i = 0; i < keep.size(); ++i) {
    u.col(static_cast<Index>(i)) = es.eigenvectors().col(keep[i]) / std::sqrt(ev(keep[i]));
  }
  const Mat coord = u.adjoint() * m;  // coordinates of a + J: coord * c
  for (const Mat& b : a.basis()) out.images.push_back(coord * left_multiplication(a, b) * u);

  Rng rng(seed);
  for (int t = 0; t < 8; ++t) {
    const Vec x = random_gaussian(k, 1, rng), y = random_gaussian(k, 1, rng);
    const Mat ax = a.element(x), ay = a.element(y);
    const cplx lhs = (coord * x).dot(coord * y);
    const cplx rhs = evaluate(phi, a, ax.adjoint() * ay);
    out.inner_product_residual = std::max(out.inner_product_residual, std::abs(lhs - rhs) / std::max(1.0, x.norm() * y.norm()));
    Mat px = Mat::Zero(out.dim, out.dim), py = px, pxy = px;
    const Vec cxy = a.coefficients(ax * ay);
    for (Index i = 0; i < k; ++i) {
      px += x(i) * out.images[static_cast<size_t>(i)];
      py += y(i) * out.images[static_cast<size_t>(i)];
      pxy += cxy(i) * out.images[static_cast<size_t>(i)];
    }
    const Vec cstar = a.coefficients(ax.adjoint());
    Mat pstar = Mat::Zero(out.dim, out.dim);
    for (Index i = 0; i < k; ++i) pstar += cstar(i) * out.images[static_cast<size_t>(i)];
    const double norm = std::max(1.0, x.norm() * y.norm());
    out.homomorphism_residual = std::max(out.homomorphism_residual, frob(px * py - pxy) / norm);
    out.homomorphism_residual = std::max(out.homomorphism_residual, frob(px.adjoint() - pstar) / std::max(1.0, x.norm()));
  }
  return out;
}

bool is_ideal(const MatrixStarAlgebra& ideal, const MatrixStarAlgebra& a, double tol) {
  if (inclusion_residual(ideal, a) > tol) return false;
  const std::vector<SpMat> sa = sparse_basis(a.basis());
  std::vector<SpMat> batch;
  for (const SpMat& x : sparse_basis(ideal.basis())) {
    batch.clear();
    batch.push_back(x.adjoint());
    for (const SpMat& b : sa) {
      batch.push_back(b * x);
      batch.push_back(x * b);
    }
    if (!contains_all_sparse(ideal, batch, tol)) return false;
  }
  return true;
}

MatrixStarAlgebra ideal_sum(const MatrixStarAlgebra& i, const MatrixStarAlgebra& j, double tol) {
  std::vector<Mat> all = i.basis();
  all.insert(all.end(), j.basis().begin(), j.basis().end());
  return MatrixStarAlgebra::span_of(i.ambient_dim(), all, tol);
}

MatrixStarAlgebra ideal_intersection(const MatrixStarAlgebra& i, const MatrixStarAlgebra& j, double tol) {
  if (i.dim() == 0 || j.dim() == 0) return MatrixStarAlgebra(i.ambient_dim());
  const Mat qi = i.frame(), qj = j.frame();
  const Mat off = qi - qj * (qj.adjoint() * qi);
  return from_coefficients(i, nullspace(off, tol));
}

std::vector<size_t> ideal_support(const MatrixStarAlgebra& ideal, const BlockStructure& blocks, double tol) {
  std::vector<size_t> out;
  for (size_t b = 0; b < blocks.blocks.size(); ++b) {
    const Mat& p = blocks.blocks[b].central_projection;
    double worst = 0.0;
    for (const Mat& x : ideal.basis()) worst = std::max(worst, frob(p * x));
    if (worst > std::sqrt(tol)) out.push_back(b);
  }
  return out;
}

bool ideal_is_whole(const MatrixStarAlgebra& ideal, const BlockStructure& blocks, double tol) {
  return std::all_of(blocks.blocks.begin(), blocks.blocks.end(),
                     [&](const Block& b) { return ideal.contains(b.central_projection, tol); });
}

MatrixStarAlgebra block_ideal(const MatrixStarAlgebra& a, const BlockStructure& blocks, const std::vector<size_t>& which,
                              double tol) {
  Mat p = Mat::Zero(a.ambient_dim(), a.ambient_dim());
  for (size_t w : which) p += blocks.blocks.at(w).central_projection;
  std::vector<Mat> elems;
  for (const Mat& b : a.basis()) elems.push_back(b * p);
  return MatrixStarAlgebra::span_of(a.ambient_dim(), elems, tol);
}

std::vector<Mat> intertwiners(const std::vector<Mat>& from, const std::vector<Mat>& to, double tol) {
  if (from.size() != to.size()) throw Error("intertwiners: representation lengths differ");
  if (from.empty()) return {};
  const Index p = from.front().rows(), q = to.front().rows();
  if (p == 0 || q == 0) return {};
  // vec(T x - y T) = (x^T (x) I_q - I_p (x) y) vec(T) for T of shape q x p.
  Mat gram = Mat::Zero(p * q, p * q);
  const Mat iq = Mat::Identity(q, q), ip = Mat::Identity(p, p);
  for (size_t k = 0; k < from.size(); ++k) {
    const Mat c = kron(from[k].transpose(), iq) - kron(ip, to[k]);
    gram += c.adjoint() * c;
  }
  const Mat null = gram_nullspace(gram, tol);
  std::vector<Mat> out;
  for (Index j = 0; j < null.cols(); ++j) out.push_back(unvec(null.col(j), q, p));
  return out;
}

SeparationReport is_separating(const MatrixStarAlgebra& b, const MatrixStarAlgebra& a, const BlockStructure& blocks,
                               double tol) {
  if (inclusion_residual(b, a) > 1e3 * tol) throw Error("is_separating: B is not contained in A");
  SeparationReport rep;
  std::vector<std::vector<Mat>> restricted;
  for (size_t i = 0; i < blocks.blocks.size(); ++i) {
    const Block& blk = blocks.blocks[i];
    std::vector<Mat> images;
    double size = 0.0;
    for (const Mat& x : b.basis()) {
      images.push_back(blk.represent(x));
      size = std::max(size, frob(images.back()));
    }
    SeparationReport::BlockVerdict v;
    v.size = blk.size;
    v.nonzero = size > std::sqrt(tol);
    v.commutant_dim = commutant_of(blk.size, images, tol).dim();
    v.irreducible = v.nonzero && v.commutant_dim == 1;
    if (!v.irreducible) {
      std::ostringstream os;
      os << "block " << i << " (size " << blk.size << ") restricts to a "
         << (v.nonzero ? "reducible" : "zero") << " representation, commutant dim " << v.commutant_dim;
      rep.failures.push_back(os.str());
    }
    rep.blocks.push_back(v);
    restricted.push_back(std::move(images));
  }
  for (size_t i = 0; i < restricted.size(); ++i) {
    for (size_t j = i + 1; j < restricted.size(); ++j) {
      SeparationReport::PairVerdict pv;
      pv.first = i;
      pv.second = j;
      if (blocks.blocks[i].size == blocks.blocks[j].size) {
        pv.intertwiner_dim = static_cast<Index>(intertwiners(restricted[i], restricted[j], tol).size());
      }
      pv.equivalent = pv.intertwiner_dim > 0;
      if (pv.equivalent) {
        std::ostringstream os;
        os << "blocks " << i << " and " << j << " have " << pv.intertwiner_dim << " intertwiners on B";
        rep.failures.push_back(os.str());
      }
      rep.pairs.push_back(pv);
    }
  }
  rep.separating = rep.failures.empty();
  return rep;
}

StoneWeierstrassVerdict check_stone_weierstrass(const MatrixStarAlgebra& b, const MatrixStarAlgebra& a,
                                                const BlockStructure& blocks, double tol) {
  StoneWeierstrassVerdict v;
  v.report = is_separating(b, a, blocks, tol);
  v.separating = v.report.separating;
  v.dim_b = b.dim();
  v.dim_a = a.dim();
  v.pass = !v.separating || v.dim_b == v.dim_a;
  if (!v.pass) {
    std::ostringstream os;
    os << "separating proper subalgebra: dim B = " << v.dim_b << " < dim A = " << v.dim_a;
    v.witness = os.str();
  }
  return v;
}

MatrixStarAlgebra random_algebra(Rng& rng, Index max_dim) {
  std::uniform_int_distribution<int> nblocks(1, 3), size(1, 3), mult(1, 2);
  std::vector<std::pair<Index, Index>> shape;
  Index total = 0;
  const int count = nblocks(rng);
  for (int i = 0; i < count; ++i) {
    const Index n = size(rng);
    if (total + n * n > max_dim) continue;
    shape.emplace_back(n, mult(rng));
    total += n * n;
  }
  if (shape.empty()) shape.emplace_back(1, 1);
  Index ambient = 0;
  for (auto [n, m] : shape) ambient += n * m;
  const Mat u = random_unitary(ambient, rng);
  std::vector<Mat> basis;
  Index off = 0;
  for (auto [n, m] : shape) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        Mat e = Mat::Zero(ambient, ambient);
        for (Index r = 0; r < m; ++r) e(off + r * n + i, off + r * n + j) = 1.0 / std::sqrt(static_cast<double>(m));
        basis.push_back(u * e * u.adjoint());
      }
    }
    off += n * m;
  }
  return MatrixStarAlgebra::from_orthonormal(ambient, std::move(basis));
}

MatrixStarAlgebra random_subalgebra(const MatrixStarAlgebra& a, const BlockStructure& blocks, Rng& rng, double tol) {
  const Index k = a.dim();
  auto random_element = [&]() { return a.element(random_gaussian(k, 1, rng)); };
  std::uniform_int_distribution<int> pick(0, 5);
  switch (pick(rng)) {
    case 0:
      return a;
    case 1:
      return generate({hermitian_part(random_element())}, tol);
    case 2:
      return generate({random_element(), random_element()}, tol);
    case 3: {
      // Identify two equal-size blocks through the same random matrix.
      const auto& bl = blocks.blocks;
      for (size_t i = 0; i < bl.size(); ++i) {
        for (size_t j = i + 1; j < bl.size(); ++j) {
          if (bl[i].size != bl[j].size) continue;
          const Index n = bl[i].size;
          Mat x = random_gaussian(n, n, rng), y = random_gaussian(n, n, rng);
          auto lift = [&](const Mat& m) {
            // Lift through each block's irrep: the unique element of A p acting as m.
            Mat out = Mat::Zero(a.ambient_dim(), a.ambient_dim());
            for (size_t b : {i, j}) {
              const Block& blk = bl[b];
              Mat coef(n * n, k);
              for (Index c = 0; c < k; ++c) coef.col(c) = vec(blk.represent(a.basis(c) * blk.central_projection));
              const Vec sol = coef.completeOrthogonalDecomposition().solve(vec(m));
              out += a.element(sol) * blk.central_projection;
            }
            return out;
          };
          return generate({lift(x), lift(y)}, tol);
        }
      }
      return generate({random_element(), random_element()}, tol);
    }
    case 4: {
      std::vector<size_t> which;
      std::bernoulli_distribution coin(0.5);
      for (size_t b = 0; b < blocks.blocks.size(); ++b) {
        if (coin(rng)) which.push_back(b);
      }
      return block_ideal(a, blocks, which, tol);
    }
    default: {
      // Corner p A p for a spectral projection p of a random Hermitian element.
      const Mat h = hermitian_part(random_element());
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      const Index half = std::max<Index>(1, a.ambient_dim() / 2);
      const Mat v = es.eigenvectors().rightCols(half);
      const Mat p = v * v.adjoint();
      std::vector<Mat> gens{hermitian_part(random_element())};
      gens.push_back(p * random_element() * p);
      // p need not lie in A; keep only elements of A.
      std::vector<Mat> inside;
      for (const Mat& g : gens) inside.push_back(a.project(g));
      return generate(inside, tol);
    }
  }
}

HomomorphismResiduals star_homomorphism_residuals(const std::vector<Mat>& source, const std::vector<Mat>& images,
                                                  double tol) {
  if (source.size() != images.size()) throw Error("star_homomorphism_residuals: length mismatch");
  HomomorphismResiduals r;
  if (source.empty()) return r;
  const Index n = source.front().rows();
  const Index k = static_cast<Index>(source.size());
  r.source_rank = orthonormal_span(stack_vecs(source, n * n), 1e-8).cols();
  r.image_rank = orthonormal_span(stack_vecs(images, images.front().rows() * images.front().rows()), 1e-8).cols();
  const std::vector<SpMat> ss = sparse_basis(source);
  const std::vector<SpMat> ts = sparse_basis(images);
  const SpMat s = sparse_vec_columns(ss);
  const SpMat t = sparse_vec_columns(ts);
  // Minimum-norm least squares in the (possibly redundant) source family
  // through the pseudo-inverse of its Gram matrix.
  const Mat gram_pinv = Mat(Mat(s.adjoint() * s)).completeOrthogonalDecomposition().pseudoInverse();
  double scale = 1.0;
  for (const Mat& im : images) scale = std::max(scale, frob(im));
  std::vector<SpMat> lhs, rhs;
  for (Index i = 0; i < k; ++i) {
    const SpMat& a = ss[static_cast<size_t>(i)];
    const SpMat& ai = ts[static_cast<size_t>(i)];
    lhs.assign(1, SpMat(a.adjoint()));
    rhs.assign(1, SpMat(ai.adjoint()));
    for (Index j = 0; j < k; ++j) {
      lhs.push_back(a * ss[static_cast<size_t>(j)]);
      rhs.push_back(ai * ts[static_cast<size_t>(j)]);
    }
    const SpMat p = sparse_vec_columns(lhs);
    const Mat c = gram_pinv * Mat(s.adjoint() * p);
    const Eigen::VectorXd membership = (Mat(s * c) - Mat(p)).colwise().norm();
    const Eigen::VectorXd mapped = (Mat(t * c) - Mat(sparse_vec_columns(rhs))).colwise().norm();
    r.source_membership = std::max(r.source_membership, membership.maxCoeff());
    r.star = std::max(r.star, mapped(0) / scale);
    if (k > 0) r.multiplicative = std::max(r.multiplicative, mapped.tail(k).maxCoeff() / (scale * scale));
  }
  (void)tol;
  return r;
}

}  // namespace equivaria

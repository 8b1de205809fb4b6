#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equivaria/hilbmod.hpp"

using namespace equivaria;

namespace {

MatrixStarAlgebra m2_plus_c() { return direct_sum({full_matrix_algebra(2), full_matrix_algebra(1)}); }

// Left multiplication by b on the standard module, in coefficient coordinates.
Mat left_mult(const MatrixStarAlgebra& b, const Mat& x) {
  Mat out(b.dim(), b.dim());
  for (Index k = 0; k < b.dim(); ++k) out.col(k) = b.coefficients(x * b.basis(k));
  return out;
}

MatrixStarAlgebra raw_span(Index m, const std::vector<Mat>& ops) { return MatrixStarAlgebra::span_of(m, ops); }

}  // namespace

TEST_CASE("standard_module") {
  const auto c = standard_module(full_matrix_algebra(1));
  CHECK(c.carrier_dim() == 1);
  const auto m2 = standard_module(full_matrix_algebra(2));
  CHECK(m2.carrier_dim() == 4);
  CHECK(module_axioms(m2).ok());
  CHECK(standard_norm_mismatch(m2_plus_c()) < 1e-10);
  CHECK(standard_norm_mismatch(full_matrix_algebra(3), 20, 7) < 1e-10);
  // K_B(B) is B acting by left multiplication.
  const auto b = m2_plus_c();
  const auto e = standard_module(b);
  std::vector<Mat> lm;
  for (const Mat& x : b.basis()) lm.push_back(left_mult(b, x));
  CHECK(same_span(compact_span_raw(e), raw_span(e.carrier_dim(), lm), 1e-9));
  CHECK(is_full(e));
}

TEST_CASE("function_module") {
  const auto sys = z2_line(2);
  const auto e = function_module(sys);
  CHECK(e.carrier_dim() == sys.total_dim());
  const auto ax = module_axioms(e);
  CHECK(ax.ok());
  CHECK(ax.pairs == 100);
  CHECK(is_full(e));
  // K_{C(X)}(C(X, H)) = C(X, K(H)).
  CHECK(same_span(compact_span_raw(e), function_algebra(sys), 1e-9));
  // d = 1 reproduces the standard module of C(X).
  const auto triv = trivial_system(FiniteGroup::cyclic(2), 3, 1);
  const auto e1 = function_module(triv);
  const auto s1 = standard_module(function_algebra(triv));
  CHECK(e1.carrier_dim() == s1.carrier_dim());
  CHECK(same_span(compact_span_raw(e1), compact_span_raw(s1), 1e-9));
  // One point: a plain Hilbert space.
  const auto pt = function_module(regular_point(FiniteGroup::symmetric3()));
  CHECK(pt.carrier_dim() == 6);
  CHECK(compact_operators(pt).dim() == 36);
}

TEST_CASE("compact operators and module maps") {
  CHECK(compact_operators(hilbert_space(3)).dim() == 9);
  for (const auto& e : {standard_module(m2_plus_c()), function_module(z2_line(1))}) {
    const auto k = compact_operators(e);
    CHECK(k.closure_residual() < 1e-9);
    CHECK(adjointability_residual(e) < 1e-9);
    const auto maps = module_maps_raw(e);
    std::vector<Mat> framed;
    for (const Mat& a : maps.basis()) framed.push_back(e.to_frame(a));
    const auto maps_frame = MatrixStarAlgebra::span_of(e.carrier_dim(), framed);
    CHECK(maps_frame.closure_residual() < 1e-9);
    CHECK(is_ideal(k, maps_frame, 1e-8));
  }
}

TEST_CASE("fullness_ideal") {
  const auto b = direct_sum({full_matrix_algebra(2), full_matrix_algebra(2)});
  CHECK(fullness_ideal(zero_module(b)).dim() == 0);
  Mat p = Mat::Zero(4, 4);
  p(0, 0) = p(1, 1) = 1.0;
  std::vector<Mat> elems;
  std::vector<Mat> first;
  for (const Mat& x : b.basis()) {
    if ((p * x).norm() > 0.5) elems.push_back(p * x);
  }
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      Mat e = Mat::Zero(4, 4);
      e(i, j) = 1.0;
      first.push_back(e);
    }
  }
  const auto e = FDHilbertModule::from_matrices(b, elems);
  CHECK(e.carrier_dim() == 4);
  const auto j = fullness_ideal(e);
  CHECK(j.dim() == 4);
  CHECK(same_span(j, MatrixStarAlgebra::span_of(4, first), 1e-9));
  CHECK(is_ideal(j, b));
  CHECK_FALSE(is_full(e));
}

TEST_CASE("zero modules") {
  const auto z = zero_module(full_matrix_algebra(2));
  CHECK(z.carrier_dim() == 0);
  CHECK(module_axioms(z).ok());
  CHECK(compact_operators(z).dim() == 0);
}

TEST_CASE("equivariant modules and crossed products") {
  const auto sys = z2_line(2);
  const auto eq = equivariant_function_module(sys);
  CHECK(equivariance_residuals(eq).max() < 1e-12);
  const auto cm = module_crossed_product(eq);
  CHECK(cm.module.carrier_dim() == eq.base.carrier_dim() * 2);
  CHECK(module_axioms(cm.module).ok());
  CHECK(is_full(cm.module));
  CHECK(crossed_compacts_residual(eq) < 1e-8);

  const auto s3 = regular_point(FiniteGroup::symmetric3());
  const auto eq3 = equivariant_function_module(s3);
  CHECK(equivariance_residuals(eq3).max() < 1e-12);
  CHECK(crossed_compacts_residual(eq3) < 1e-8);

  // Trivial W leaves E unchanged.
  const auto trivial = trivially_equivariant(standard_module(m2_plus_c()), FiniteGroup::cyclic(1));
  const auto ct = module_crossed_product(trivial);
  CHECK(ct.module.carrier_dim() == trivial.base.carrier_dim());
  CHECK(compact_operators(ct.module).dim() == compact_operators(trivial.base).dim());
}

TEST_CASE("Green-Julg module") {
  const auto triv = trivially_equivariant(function_module(z2_line(1)), FiniteGroup::cyclic(1));
  const auto gj0 = green_julg_module(triv);
  CHECK(same_span(compact_span_raw(gj0.module), compact_span_raw(triv.base), 1e-9));
  const auto v0 = verify_green_julg(triv);
  CHECK(v0.pass);
  const auto nb0 = green_julg_norm_bounds(triv);
  CHECK(nb0.ok());
  CHECK(nb0.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nb0.max_ratio == doctest::Approx(1.0).epsilon(1e-12));

  const auto sys = z2_line(2);
  const auto eq = equivariant_function_module(sys);
  const auto v = verify_green_julg(eq);
  CHECK(v.pass);
  CHECK(v.residual < 1e-8);
  CHECK(v.dim_invariant == fixed_point_algebra(sys).dim());
  CHECK(same_span(invariant_compacts_raw(eq), fixed_point_algebra(sys), 1e-9));
  const auto nb = green_julg_norm_bounds(eq);
  CHECK(nb.ok());
  CHECK(nb.min_ratio >= 1.0 - 1e-9);
  CHECK(nb.max_ratio <= 2.0 + 1e-9);

  const auto reg = equivariant_function_module(regular_point(FiniteGroup::symmetric3()));
  const auto vr = verify_green_julg(reg);
  CHECK(vr.pass);
  CHECK(vr.dim_invariant == 6);  // 1 + 1 + 2^2
  CHECK(green_julg_norm_bounds(reg).ok());
}

TEST_CASE("verify_morita") {
  // (K(H), C, H)
  const auto h = hilbert_space(3);
  const auto v1 = verify_morita(full_matrix_algebra(3), h);
  CHECK(v1.ok);
  REQUIRE(v1.witness);
  CHECK(v1.witness->blocks_a == v1.witness->blocks_b);
  // (C(X, K(H)), C(X), C(X, H))
  const auto sys = z2_line(1);
  const auto v2 = verify_morita(function_algebra(sys), function_module(sys));
  CHECK(v2.ok);
  REQUIRE(v2.witness);
  CHECK(v2.witness->blocks_a == 3);
  CHECK(v2.witness->blocks_b == 3);
  // M2 + M2 against C through C^2.
  const auto v3 = verify_morita(direct_sum({full_matrix_algebra(2), full_matrix_algebra(2)}), hilbert_space(2));
  CHECK_FALSE(v3.ok);
  CHECK(v3.reason.find("block") != std::string::npos);
  // Non-full module.
  const auto b = direct_sum({full_matrix_algebra(1), full_matrix_algebra(1)});
  Mat e0 = Mat::Zero(2, 2);
  e0(0, 0) = 1.0;
  const auto half = FDHilbertModule::from_matrices(b, {e0});
  const auto v4 = verify_morita(full_matrix_algebra(1), half);
  CHECK_FALSE(v4.ok);
  CHECK(v4.reason.find("not full") != std::string::npos);
  // A wrong map is rejected.
  const auto a = full_matrix_algebra(3);
  std::vector<Mat> bad;
  for (const Mat& x : a.basis()) bad.push_back(x.transpose());
  CHECK_FALSE(verify_morita(a, h, bad).ok);
  // Block matching when A lives on another space: M2 ~ C via C^2, A = M2 (x) 1_2.
  std::vector<Mat> amp;
  const auto m2 = full_matrix_algebra(2);
  for (const Mat& x : m2.basis()) amp.push_back(kron(x, Mat::Identity(2, 2)) / std::sqrt(2.0));
  const auto v5 = verify_morita(MatrixStarAlgebra::from_orthonormal(4, amp), hilbert_space(2));
  CHECK(v5.ok);
}

TEST_CASE("dual_module") {
  const auto b = m2_plus_c();
  const auto e = standard_module(b);
  const auto d = dual_module(e);
  CHECK(module_axioms(d.module).ok());
  CHECK(compact_operators(d.module).dim() == b.dim());
  const auto v = verify_morita(b, d.module, d.left_action);
  CHECK(v.ok);
  // C^n over C: row vectors, compacts = C.
  const auto dn = dual_module(hilbert_space(3));
  CHECK(dn.module.carrier_dim() == 3);
  CHECK(compact_operators(dn.module).dim() == 1);
  CHECK(is_full(dn.module));
  CHECK(double_dual_residual(hilbert_space(3)) < 1e-10);
  CHECK(double_dual_residual(e) < 1e-10);
  CHECK(double_dual_residual(function_module(z2_line(1))) < 1e-10);
}

TEST_CASE("direct_sum_morita") {
  const auto w = verify_morita(full_matrix_algebra(2), hilbert_space(2));
  REQUIRE(w.witness);
  const auto single = direct_sum_morita({*w.witness});
  CHECK(single.ok);
  const auto two = direct_sum_morita({*w.witness, *w.witness});
  CHECK(two.ok);
  REQUIRE(two.witness);
  CHECK(two.witness->a.dim() == 8);
  CHECK(two.witness->b().dim() == 2);
  CHECK(two.witness->blocks_a == 2);
  const auto empty = direct_sum_morita({});
  CHECK(empty.ok);
  REQUIRE(empty.witness);
  CHECK(empty.witness->a.dim() == 0);
  CHECK(empty.witness->b().dim() == 0);
}

TEST_CASE("interior tensor and transport") {
  // M2 over itself, then C^2 as an M2-C bimodule: the product is C^2 over C.
  const auto m2 = full_matrix_algebra(2);
  const auto e = standard_module(m2);
  const auto f = hilbert_space(2);
  const auto t = interior_tensor(e, f, m2.basis());
  CHECK(t.module.carrier_dim() == 2);
  CHECK(module_axioms(t.module).ok());
  std::vector<Mat> images;
  for (const Mat& x : m2.basis()) images.push_back(t.left(left_mult(m2, x)));
  CHECK(verify_morita(m2, t.module, images).ok);

  // Restricting the Green-Julg module to its fullness ideal.
  const auto gj = green_julg_module(equivariant_function_module(anticomplete_point()));
  const auto j = fullness_ideal(gj.module);
  CHECK(j.dim() == 1);
  const auto r = transport(gj.module, j, j.basis());
  CHECK(is_full(r));
  CHECK(module_axioms(r).ok());
}

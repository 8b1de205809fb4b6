#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equivaria/equivariant.hpp"

#include <algorithm>

using namespace equivaria;

namespace {

std::vector<Index> sorted_sizes(const MatrixStarAlgebra& a) {
  auto s = block_decompose(a, 3).sizes();
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("systems are validated eagerly") {
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  CHECK_THROWS_AS(EquivariantSystem(z2, {"a", "b"}, {{0, 1}, {0, 0}}, 1,
                                    {{Mat::Identity(1, 1), Mat::Identity(1, 1)}, {Mat::Identity(1, 1), Mat::Identity(1, 1)}}),
                  ValidationError);
  // I_w = i on a fixed point violates I_w I_w = I_{w^2} = 1.
  Mat i1 = Mat::Identity(1, 1) * cplx(0, 1);
  try {
    EquivariantSystem(z2, {"p"}, {{0}, {0}}, 1, {{Mat::Identity(1, 1)}, {i1}});
    FAIL("expected a cocycle violation");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("cocycle identity") != std::string::npos);
  }
  CHECK_NOTHROW(z2_line(4));
  CHECK_NOTHROW(z2z2_line(3));
  CHECK_NOTHROW(dihedral_plane(2));
}

TEST_CASE("alpha examples and action laws") {
  const EquivariantSystem sys = z2_line(3);
  const MatrixStarAlgebra f = function_algebra(sys);
  CHECK(f.dim() == 7 * 4);
  Rng rng(1);
  const Mat k = f.element(random_gaussian(f.dim(), 1, rng));
  CHECK(frob(alpha(sys, 0, k) - k) < 1e-14);
  // k supported at x = 1 (index 4) moves to x = -1 (index 2) with conjugated value.
  std::vector<Mat> vals(7, Mat::Zero(2, 2));
  vals[4] = random_gaussian(2, 2, rng);
  const auto moved = function_values(sys, alpha(sys, 1, function_element(sys, vals)));
  const Mat c = z2_line_cocycle(1.0);
  CHECK(frob(moved[2] - c * vals[4] * c.adjoint()) < 1e-14);
  CHECK(frob(moved[4]) == 0.0);
  // Free action on two points with trivial cocycle swaps values.
  const EquivariantSystem fo = free_orbit(FiniteGroup::cyclic(2));
  std::vector<Mat> two{Mat::Constant(1, 1, 2.0), Mat::Constant(1, 1, 5.0)};
  const auto swapped = function_values(fo, alpha(fo, 1, function_element(fo, two)));
  CHECK(swapped[0](0, 0) == cplx(5.0));
  CHECK(action_residuals(function_action(sys)).max() < 1e-12);
  const Mat l = f.element(random_gaussian(f.dim(), 1, rng));
  CHECK(frob(alpha(sys, 1, k * l) - alpha(sys, 1, k) * alpha(sys, 1, l)) < 1e-12);
}

TEST_CASE("fixed_point_algebra examples") {
  SUBCASE("trivial W") {
    const auto sys = trivial_system(FiniteGroup(), 3, 2);
    CHECK(fixed_point_algebra(sys).dim() == 12);
  }
  SUBCASE("z2 line has dimension 4n+2") {
    for (int n : {1, 2, 4}) {
      const auto sys = z2_line(n);
      const auto fp = fixed_point_algebra(sys);
      CHECK(fp.dim() == 4 * n + 2);
      CHECK(fp.closure_residual() < 1e-10);
      CHECK(same_span(fp, fixed_point_algebra_by_commutant(sys), 1e-9));
    }
  }
  SUBCASE("regular representation at a fixed point") {
    for (const FiniteGroup& g : {FiniteGroup::cyclic(3), FiniteGroup::symmetric3()}) {
      const auto fp = fixed_point_algebra(regular_point(g));
      int expected = 0;
      for (const auto& r : enumerate_irreps(g)) expected += r.dim() * r.dim();
      CHECK(fp.dim() == expected);
      CHECK(fp.dim() == commutant_of(g.order(), regular_rep(g).matrices).dim());
    }
  }
  SUBCASE("dihedral plane") {
    const auto sys = dihedral_plane(1);
    CHECK(same_span(fixed_point_algebra(sys), fixed_point_algebra_by_commutant(sys), 1e-9));
  }
}

TEST_CASE("orbits and stabilizers") {
  const auto sys = z2_line(2);
  const auto orbs = orbits(sys);
  CHECK(orbs.size() == 3);
  CHECK(orbs[0] == std::vector<int>{0, 4});
  CHECK(orbs[2] == std::vector<int>{2});
  CHECK(stabilizer(sys, 2).size() == 2);
  CHECK(stabilizer(sys, 0).size() == 1);
}

TEST_CASE("crossed_product examples") {
  SUBCASE("B = C gives the group algebra") {
    for (const FiniteGroup& g : {FiniteGroup::symmetric3(), FiniteGroup::quaternion8()}) {
      const MatrixStarAlgebra c = full_matrix_algebra(1);
      const CrossedProduct cp(action_from_unitaries(c, g, std::vector<Mat>(static_cast<size_t>(g.order()), Mat::Identity(1, 1))));
      CHECK(cp.algebra().dim() == g.order());
      std::vector<Index> dims;
      for (const auto& r : enumerate_irreps(g)) dims.push_back(r.dim());
      CHECK(sorted_sizes(cp.algebra()) == dims);
    }
  }
  SUBCASE("W trivial") {
    const auto a = full_matrix_algebra(2);
    const CrossedProduct cp(action_from_unitaries(a, FiniteGroup(), {Mat::Identity(2, 2)}));
    CHECK(same_span(cp.algebra(), a, 1e-12));
  }
  SUBCASE("free Z/2 orbit gives M2") {
    const CrossedProduct cp(function_action(free_orbit(FiniteGroup::cyclic(2))));
    CHECK(cp.algebra().dim() == 4);
    CHECK(sorted_sizes(cp.algebra()) == std::vector<Index>{2});
  }
}

TEST_CASE("crossed product embedding is a faithful *-homomorphism") {
  const auto sys = z2_line(2);
  const StarAction act = function_action(sys);
  const CrossedProduct cp(act);
  CHECK(cp.algebra().dim() == 2 * act.algebra.dim());
  Rng rng(4);
  auto random_coeffs = [&]() {
    CrossedCoefficients f;
    for (int w = 0; w < 2; ++w) f.push_back(act.algebra.element(random_gaussian(act.algebra.dim(), 1, rng)));
    return f;
  };
  for (int t = 0; t < 5; ++t) {
    const auto f = random_coeffs(), g = random_coeffs();
    const Mat prod = cp.embed(crossed_multiply(act, f, g));
    CHECK(frob(prod - cp.embed(f) * cp.embed(g)) < 1e-10 * frob(prod));
    CHECK(frob(cp.embed(crossed_adjoint(act, f)) - cp.embed(f).adjoint()) < 1e-10 * frob(prod));
    const auto back = cp.coefficients(cp.embed(f));
    for (int w = 0; w < 2; ++w) CHECK(frob(back[static_cast<size_t>(w)] - f[static_cast<size_t>(w)]) < 1e-10);
  }
}

TEST_CASE("phi_iso") {
  SUBCASE("one fixed point") {
    const auto p = phi_iso(trivial_system(FiniteGroup::symmetric3(), 1, 1));
    CHECK(p.report.source_dim == 6);
    CHECK(p.report.ok(1e-9));
  }
  SUBCASE("W trivial") {
    const auto p = phi_iso(trivial_system(FiniteGroup(), 3, 1));
    CHECK(p.report.ok(1e-9));
    for (size_t k = 0; k < p.images.size(); ++k) CHECK(frob(p.images[k] - p.source_terms[k]) < 1e-14);
  }
  SUBCASE("free Z/2 orbit") {
    const auto p = phi_iso(free_orbit(FiniteGroup::cyclic(2)));
    CHECK(p.report.ok(1e-9));
    CHECK(p.target.dim() == 4);
    CHECK(sorted_sizes(p.target) == std::vector<Index>{2});
    CHECK(sorted_sizes(p.source.algebra()) == std::vector<Index>{2});
  }
  SUBCASE("z2 line grid") {
    const auto p = phi_iso(z2_line(4));
    CHECK(p.report.ok(1e-9));
  }
}

TEST_CASE("iterated_crossed_iso") {
  const MatrixStarAlgebra c = full_matrix_algebra(1);
  SUBCASE("V trivial") {
    const FiniteGroup z2 = FiniteGroup::cyclic(2);
    const auto it = iterated_crossed_iso(function_action(scalar_shadow(z2_line(2))), {0, 1}, {0});
    CHECK(it.report.ok(1e-9));
  }
  SUBCASE("Z2 x Z2 on C") {
    const FiniteGroup k4 = FiniteGroup::klein_four();
    const auto act = action_from_unitaries(c, k4, std::vector<Mat>(4, Mat::Identity(1, 1)));
    const auto it = iterated_crossed_iso(act, {0, 2}, {0, 1});
    CHECK(it.report.ok(1e-9));
    CHECK(sorted_sizes(it.outer.algebra()) == std::vector<Index>{1, 1, 1, 1});
    CHECK(sorted_sizes(it.whole.algebra()) == std::vector<Index>{1, 1, 1, 1});
  }
  SUBCASE("S3 = Z3 x| Z2 on C") {
    const FiniteGroup s3 = FiniteGroup::symmetric3();
    std::vector<int> rot, refl{0};
    for (int a = 0; a < 6; ++a) {
      if (s3.mul(a, s3.mul(a, a)) == 0) rot.push_back(a);
    }
    for (int a = 1; a < 6; ++a) {
      if (s3.mul(a, a) == 0) {
        refl.push_back(a);
        break;
      }
    }
    const auto act = action_from_unitaries(c, s3, std::vector<Mat>(6, Mat::Identity(1, 1)));
    const auto it = iterated_crossed_iso(act, rot, refl);
    CHECK(it.report.ok(1e-9));
    CHECK(sorted_sizes(it.outer.algebra()) == std::vector<Index>{1, 1, 2});
    CHECK_THROWS_AS(iterated_crossed_iso(act, refl, rot), ValidationError);
  }
}

TEST_CASE("quotient_algebra") {
  const auto triv = quotient_algebra(trivial_system(FiniteGroup::cyclic(2), 3, 1));
  CHECK(triv.fixed.dim() == 3);
  CHECK(triv.report.ok(1e-9));
  CHECK(quotient_algebra(free_orbit(FiniteGroup::cyclic(2))).fixed.dim() == 1);
  const auto line = quotient_algebra(scalar_shadow(z2_line(3)));
  CHECK(line.fixed.dim() == 4);
  CHECK(line.report.ok(1e-9));
  CHECK_THROWS_AS(quotient_algebra(z2_line(1)), ValidationError);
}

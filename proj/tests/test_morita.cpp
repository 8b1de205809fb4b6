#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equivaria/morita.hpp"

using namespace equivaria;

TEST_CASE("scalar_subgroups") {
  const auto line = scalar_subgroups(z2_line(2));
  CHECK(line.normalisation_ok);
  CHECK(line.completeness_ok);
  CHECK(line.conjugation_ok);
  CHECK(line.points[2].stabilizer == std::vector<int>{0, 1});
  CHECK(line.points[2].normalised == std::vector<int>{0});

  const auto triv = scalar_subgroups(trivial_system(FiniteGroup::cyclic(2), 2, 2));
  CHECK(triv.normalisation_ok);
  CHECK(triv.completeness_ok);
  CHECK(triv.points[0].normalised == std::vector<int>{0, 1});

  const auto anti = scalar_subgroups(anticomplete_point());
  CHECK(anti.points[0].scalar == std::vector<int>{0, 1});
  CHECK(anti.points[0].normalised == std::vector<int>{0});
  CHECK_FALSE(anti.normalisation_ok);
  CHECK_FALSE(anti.completeness_ok);
  CHECK(anti.points[0].missing.size() == 1);

  const auto kl = scalar_subgroups(z2z2_line(2));
  CHECK(kl.normalisation_ok);
  CHECK(kl.completeness_ok);
  CHECK(kl.conjugation_ok);
  for (const auto& p : kl.points) CHECK(p.normalised == std::vector<int>{0, 2});
}

TEST_CASE("c_ideal") {
  const auto line = c_ideal(z2_line(2));
  CHECK(line.is_ideal);
  CHECK(line.ideal.dim() == line.crossed.algebra().dim());
  const auto anti = c_ideal(anticomplete_point());
  CHECK(anti.ideal.dim() == 2);
  const auto fixed_pt = c_ideal(trivial_system(FiniteGroup::cyclic(2), 1, 1));
  CHECK(fixed_pt.is_ideal);
  REQUIRE(fixed_pt.ideal.dim() == 1);
  const auto f = fixed_pt.crossed.coefficients(fixed_pt.ideal.basis(0));
  CHECK(std::abs(f[0](0, 0) - f[1](0, 0)) < 1e-12);
  const auto kl = c_ideal(z2z2_line(2));
  CHECK(kl.is_ideal);
  CHECK(kl.ideal.dim() == 10);
}

TEST_CASE("quotient consistency") {
  CHECK(quotient_consistency(z2_line(1)).ok());
  CHECK(quotient_consistency(anticomplete_point()).ok());
  CHECK(quotient_consistency(trivial_system(FiniteGroup::cyclic(2), 2, 1)).ok());
  CHECK(quotient_consistency(z2z2_line(1)).ok());
}

TEST_CASE("verify_morita_theorem") {
  const int n = 4;
  const auto v = verify_morita_theorem(z2_line(n));
  CHECK(v.hypotheses);
  CHECK(v.equal);
  CHECK(v.pass);
  CHECK(v.span_residual < 1e-8);
  REQUIRE(v.morita.witness);
  CHECK(v.blocks_fixed.size() == static_cast<size_t>(n + 2));
  CHECK(v.blocks_c.size() == static_cast<size_t>(n + 2));

  const auto t = verify_morita_theorem(trivial_system(FiniteGroup::cyclic(1), 3, 2));
  CHECK(t.pass);
  CHECK(t.equal);

  const auto a = verify_morita_theorem(anticomplete_point());
  CHECK_FALSE(a.hypotheses);
  CHECK(a.j.dim() == 1);
  CHECK(a.c.dim() == 2);
  CHECK(a.strict);
  CHECK(a.blocks_j.size() == 1);
  CHECK(a.blocks_c.size() == 2);
  CHECK(a.summary.find("strictly") != std::string::npos);
}

TEST_CASE("semidirect_reduction") {
  const int n = 2;
  // (a^i, b^j) has index 2 i + j.
  const auto r = semidirect_reduction(z2z2_line(n), {0, 2}, {0, 1});
  CHECK(r.ok);
  CHECK(r.blocks_start == n + 2);
  CHECK(r.blocks_end == n + 2);
  CHECK(r.end.dim() == 2 * (2 * n + 1));
  for (const auto& l : r.links) CHECK_MESSAGE(l.ok, l.name << ": " << l.detail);
  CHECK(r.composite.ok);

  // Trivial W': the chain starts from the Morita theorem itself.
  const auto t = semidirect_reduction(z2_line(n), {0}, {0, 1});
  CHECK(t.ok);
  CHECK(t.blocks_end == n + 2);

  // Trivial R on a scalar system ends at C(X/W).
  const auto scalar = scalar_shadow(z2_line(n));
  const auto q = semidirect_reduction(scalar, {0, 1}, {0});
  CHECK(q.ok);
  CHECK(same_span(q.end, quotient_algebra(scalar).fixed, 1e-9));

  CHECK_THROWS_WITH_AS(semidirect_reduction(z2_line(1), {0, 1}, {0}), doctest::Contains("point 0"), ValidationError);
}

TEST_CASE("assemble_toy_dual") {
  const auto two = assemble_toy_dual({{z2_line(1), {0}, {0, 1}}, {z2_line(2), {0}, {0, 1}}});
  CHECK(two.ok);
  REQUIRE(two.combined.witness);
  const auto& w = *two.combined.witness;
  CHECK(w.blocks_a == 3 + 4);
  const Index m1 = two.reports[0].composite.witness->module.carrier_dim();
  const Index m = w.module.carrier_dim();
  for (const Mat& img : w.images) {
    CHECK(img.block(0, m1, m1, m - m1).norm() < 1e-12);
    CHECK(img.block(m1, 0, m - m1, m1).norm() < 1e-12);
  }
  const auto one = assemble_toy_dual({{z2_line(1), {0}, {0, 1}}});
  CHECK(one.ok);
  const auto none = assemble_toy_dual({});
  CHECK(none.ok);
  REQUIRE(none.combined.witness);
  CHECK(none.combined.witness->a.dim() == 0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equivaria/spectrum.hpp"

#include <algorithm>

using namespace equivaria;

TEST_CASE("orbits_and_stabilizers examples") {
  const auto triv = orbits_and_stabilizers(trivial_system(FiniteGroup::cyclic(3), 4, 1));
  CHECK(triv.size() == 4);
  for (const auto& o : triv) CHECK(o.stabilizer.size() == 3);
  const auto free = orbits_and_stabilizers(free_orbit(FiniteGroup::symmetric3()));
  REQUIRE(free.size() == 1);
  CHECK(free[0].points.size() == 6);
  CHECK(free[0].stabilizer == std::vector<int>{0});
  // Plane grid strata: origin, axis and diagonal points, generic points.
  std::map<size_t, int> strata;
  for (const auto& o : orbits_and_stabilizers(dihedral_plane(2))) strata[o.stabilizer.size()]++;
  CHECK(strata[8] == 1);
  CHECK(strata[2] == 4);
  CHECK(strata[1] == 1);
}

TEST_CASE("classify_irreps on the z2 line") {
  const int n = 4;
  const auto sys = z2_line(n);
  const auto desc = classify_irreps(sys);
  int two = 0, one = 0;
  for (const auto& e : desc.entries) {
    if (e.dim == 2) ++two;
    if (e.dim == 1) {
      ++one;
      CHECK(sys.points()[static_cast<size_t>(e.representative)] == "0");
    }
  }
  CHECK(two == n);
  CHECK(one == 2);
}

TEST_CASE("classify_irreps trivial group and dihedral plane") {
  const auto triv = classify_irreps(trivial_system(FiniteGroup(), 3, 2));
  CHECK(triv.entries.size() == 3);
  for (const auto& e : triv.entries) CHECK(e.dim == 2);
  const auto plane = classify_irreps(dihedral_plane(2));
  for (const auto& e : plane.entries) {
    const size_t s = e.stabilizer.to_parent.size();
    if (s == 1) CHECK(e.dim == 2);
    if (s == 2 || s == 8) CHECK(e.dim == 1);
  }
  CHECK(plane.entries.size() == 1 + 4 * 2 + 1);
}

TEST_CASE("realize_irrep") {
  const auto sys = z2_line(2);
  const auto fixed = fixed_point_algebra(sys);
  const auto desc = classify_irreps(sys);
  for (const auto& e : desc.entries) {
    const auto r = realize_irrep(sys, fixed, e);
    CHECK(r.multiplicative < 1e-10);
    CHECK(r.star < 1e-10);
    CHECK(r.irreducible());
    if (e.dim == 1 && e.irrep_index == 0) {
      // At x = 0 with the trivial character the representation is k -> k(0)_{11}.
      for (Index k = 0; k < fixed.dim(); ++k) {
        const Mat& b = fixed.basis(k);
        CHECK(std::abs(r.images[static_cast<size_t>(k)](0, 0) - b(2 * 2, 2 * 2)) < 1e-12);
      }
    }
  }
  const auto triv = trivial_system(FiniteGroup(), 2, 2);
  const auto tf = fixed_point_algebra(triv);
  const auto te = classify_irreps(triv).entries[1];
  const auto tr = realize_irrep(triv, tf, te);
  for (Index k = 0; k < tf.dim(); ++k) {
    const Mat kx = tf.basis(k).block(2, 2, 2, 2);
    Mat s(2, 2);
    s << te.maps[0], te.maps[1];
    CHECK(frob(tr.images[static_cast<size_t>(k)] - s.adjoint() * kx * s) < 1e-12);
  }
}

TEST_CASE("wedderburn_crosscheck examples") {
  const auto z = wedderburn_crosscheck(z2_line(4));
  CHECK(z.pass);
  CHECK(z.algebra_dim == 18);
  CHECK(z.blocks == std::vector<Index>{1, 1, 2, 2, 2, 2});
  CHECK(wedderburn_crosscheck(trivial_system(FiniteGroup::cyclic(2), 3, 2)).pass);
  const auto p = wedderburn_crosscheck(dihedral_plane(2));
  CHECK(p.pass);
  CHECK(p.algebra_dim == 13);
  CHECK(wedderburn_crosscheck(regular_point(FiniteGroup::symmetric3())).pass);
  CHECK(wedderburn_crosscheck(anticomplete_point()).pass);
}

TEST_CASE("conjugation rule and evaluation surjectivity") {
  for (const auto& sys : {z2_line(2), dihedral_plane(1), regular_point(FiniteGroup::quaternion8())}) {
    const auto fixed = fixed_point_algebra(sys);
    const auto desc = classify_irreps(sys);
    Rng rng(3);
    std::uniform_int_distribution<int> pick(0, sys.group().order() - 1);
    for (const auto& e : desc.entries) {
      for (int t = 0; t < 3; ++t) CHECK(conjugation_check(sys, fixed, e, pick(rng)).ok(e, 1e-9));
    }
    for (int x = 0; x < sys.num_points(); ++x) CHECK(evaluation_surjectivity(sys, fixed, x).ok(1e-10));
  }
}

TEST_CASE("Fell certificates") {
  const auto fam = z2_line_family();
  const auto seq = dyadic_reciprocals(32);
  const auto trivial = fell_limit_certificate(fam, seq, 0.0, 0);
  const auto sign = fell_limit_certificate(fam, seq, 0.0, 1);
  CHECK(trivial.accepted);
  CHECK(sign.accepted);
  CHECK(trivial.residuals.size() == 32);
  for (size_t i = 24; i < 32; ++i) CHECK(trivial.residuals[i] < 1e-6);
  // The plain 1/n samples converge, but too slowly for the tail threshold.
  const auto slow = fell_limit_certificate(fam, reciprocals(32), 0.0, 0);
  CHECK(slow.residuals.back() < slow.residuals.front());
  CHECK_FALSE(slow.accepted);
  // A sequence converging to x = 1 has no limit at the origin.
  std::vector<double> away;
  for (double x : seq) away.push_back(1.0 + x);
  const auto rejected = fell_limit_certificate(constant_family(), away, 0.0, 0);
  CHECK_FALSE(rejected.accepted);
  CHECK(rejected.residuals.back() > 0.1);
  CHECK_THROWS(fell_limit_certificate(fam, seq, 0.5, 0));
}

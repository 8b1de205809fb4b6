#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equivaria/grouprep.hpp"
#include "equivaria/matalg.hpp"

#include <algorithm>

using namespace equivaria;

namespace {

Mat m2(cplx a, cplx b, cplx c, cplx d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

std::vector<Index> sorted_sizes(const BlockStructure& bs) {
  auto s = bs.sizes();
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("generate examples") {
  CHECK(generate({Mat::Identity(3, 3)}).dim() == 1);
  const auto m = generate({m2(0, 1, 0, 0)});
  CHECK(m.dim() == 4);
  CHECK(m.unital());
  const auto d = generate({m2(1, 0, 0, 2)});
  CHECK(d.dim() == 2);
  CHECK(d.closure_residual() < 1e-12);
  CHECK(generate({}).dim() == 0);
}

TEST_CASE("commutant examples and bicommutant") {
  CHECK(commutant(full_matrix_algebra(3)).dim() == 1);
  CHECK(commutant(scalar_algebra(3)).dim() == 9);
  const auto diag = diagonal_algebra(2);
  CHECK(same_span(commutant(diag), diag, 1e-9));
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_algebra(rng, 12);
    if (!a.unital()) continue;
    CHECK(same_span(commutant(commutant(a)), a, 1e-8));
  }
}

TEST_CASE("block_decompose examples") {
  const auto m3 = block_decompose(full_matrix_algebra(3));
  REQUIRE(m3.blocks.size() == 1);
  CHECK(m3.blocks[0].size == 3);
  CHECK(m3.blocks[0].multiplicity == 1);

  const FiniteGroup s3 = FiniteGroup::symmetric3();
  const auto group_algebra = generate(regular_rep(s3).matrices);
  const auto bs = block_decompose(group_algebra, 7);
  CHECK(sorted_sizes(bs) == std::vector<Index>{1, 1, 2});
  std::vector<Index> irrep_dims;
  for (const auto& r : enumerate_irreps(s3)) irrep_dims.push_back(r.dim());
  CHECK(sorted_sizes(bs) == irrep_dims);

  const auto d2 = block_decompose(diagonal_algebra(2));
  CHECK(sorted_sizes(d2) == std::vector<Index>{1, 1});
  CHECK(block_decompose(MatrixStarAlgebra(4)).blocks.empty());
}

TEST_CASE("block_decompose invariants on random algebras") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_algebra(rng, 20);
    const auto bs = block_decompose(a, static_cast<std::uint64_t>(t));
    Index total = 0;
    for (const auto& b : bs.blocks) {
      total += b.size * b.size;
      CHECK(frob(b.irrep_basis.adjoint() * b.irrep_basis - Mat::Identity(b.size, b.size)) < 1e-8);
      for (const auto& c : bs.blocks) {
        if (&b != &c) CHECK(frob(b.central_projection * c.central_projection) < 1e-8);
      }
    }
    CHECK(total == a.dim());
    CHECK(frob(bs.unit(a.ambient_dim()) - a.unit()) < 1e-7);
    CHECK(sorted_sizes(block_decompose(a, 1000 + static_cast<std::uint64_t>(t))) == sorted_sizes(bs));
  }
}

TEST_CASE("operator norm and C*-identity") {
  CHECK(operator_norm(m2(0, 2, 0, 0)) == doctest::Approx(2.0));
  Rng rng(3);
  CHECK(operator_norm(random_unitary(4, rng)) == doctest::Approx(1.0));
  for (int t = 0; t < 10; ++t) {
    const Mat a = random_gaussian(5, 5, rng);
    const double n = operator_norm(a);
    CHECK(std::abs(operator_norm(a.adjoint() * a) - n * n) < 1e-10 * n * n);
  }
}

TEST_CASE("is_positive examples") {
  const auto m2a = full_matrix_algebra(2);
  CHECK(is_positive(Mat::Identity(2, 2), m2a));
  CHECK_FALSE(is_positive(m2(0, 1, 0, 0), m2a));
  Rng rng(4);
  const Mat b = random_gaussian(2, 2, rng);
  CHECK(is_positive(b.adjoint() * b, m2a));
  CHECK_THROWS(is_positive(m2(0, 1, 0, 0), diagonal_algebra(2)));
}

TEST_CASE("gns examples") {
  SUBCASE("scalars, evaluation") {
    const auto a = scalar_algebra(1);
    const auto g = gns(a, state_from_density(a, Mat::Identity(1, 1)));
    CHECK(g.dim == 1);
  }
  SUBCASE("M2 with a vector state") {
    const auto a = full_matrix_algebra(2);
    const auto g = gns(a, state_from_density(a, m2(1, 0, 0, 0)));
    CHECK(g.dim == 2);
    CHECK(g.inner_product_residual < 1e-10);
    CHECK(g.homomorphism_residual < 1e-10);
    // Unitarily equivalent to the identity representation.
    const auto ts = intertwiners(a.basis(), g.images);
    REQUIRE(ts.size() == 1);
    const Mat t = ts[0] / std::sqrt((ts[0].adjoint() * ts[0]).trace().real() / 2.0);
    CHECK(frob(t.adjoint() * t - Mat::Identity(2, 2)) < 1e-8);
  }
  SUBCASE("M2 with the normalized trace") {
    const auto a = full_matrix_algebra(2);
    const auto g = gns(a, state_from_density(a, Mat::Identity(2, 2) / 2.0));
    CHECK(g.dim == 4);
    CHECK(g.homomorphism_residual < 1e-10);
    CHECK(commutant_of(4, g.images).dim() == 4);
  }
  SUBCASE("non-positive functional") {
    const auto a = diagonal_algebra(2);
    CHECK_THROWS_AS(gns(a, state_from_density(a, m2(1, 0, 0, -1))), ValidationError);
  }
}

TEST_CASE("ideal lattice") {
  const auto a = direct_sum({full_matrix_algebra(2), full_matrix_algebra(3)});
  const auto bs = block_decompose(a);
  REQUIRE(bs.blocks.size() == 2);
  const auto i = block_ideal(a, bs, {0});
  const auto j = block_ideal(a, bs, {1});
  CHECK(is_ideal(i, a));
  CHECK(is_ideal(j, a));
  CHECK(same_span(ideal_sum(i, j), a, 1e-9));
  CHECK(ideal_intersection(i, j).dim() == 0);
  CHECK(same_span(ideal_sum(a, i), a, 1e-9));
  CHECK(ideal_is_whole(ideal_sum(i, j), bs));
  CHECK_FALSE(ideal_is_whole(i, bs));
  CHECK(ideal_support(i, bs) == std::vector<size_t>{0});
  CHECK_FALSE(is_ideal(generate({block_diagonal({m2(1, 0, 0, 0), Mat::Zero(3, 3)})}), a));

  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto r = random_algebra(rng, 20);
    const auto rb = block_decompose(r, 1);
    std::vector<size_t> s1, s2;
    std::bernoulli_distribution coin(0.5);
    for (size_t b = 0; b < rb.blocks.size(); ++b) {
      if (coin(rng)) s1.push_back(b);
      if (coin(rng)) s2.push_back(b);
    }
    std::vector<size_t> uni, inter;
    std::set_union(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(uni));
    std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(inter));
    const auto i1 = block_ideal(r, rb, s1), i2 = block_ideal(r, rb, s2);
    CHECK(same_span(ideal_sum(i1, i2), block_ideal(r, rb, uni), 1e-8));
    CHECK(same_span(ideal_intersection(i1, i2), block_ideal(r, rb, inter), 1e-8));
    CHECK(ideal_support(i1, rb) == s1);
  }
}

TEST_CASE("is_separating examples") {
  const auto a = direct_sum({full_matrix_algebra(2), full_matrix_algebra(2)});
  const auto bs = block_decompose(a);
  CHECK(is_separating(a, a, bs).separating);
  const auto scalars = scalar_algebra(4);
  const auto rep = is_separating(scalars, a, bs);
  CHECK_FALSE(rep.separating);
  REQUIRE(rep.pairs.size() == 1);
  CHECK(rep.pairs[0].intertwiner_dim > 0);
  const auto m2a = full_matrix_algebra(2);
  const auto diag = is_separating(diagonal_algebra(2), m2a, block_decompose(m2a));
  CHECK_FALSE(diag.separating);
  CHECK(diag.blocks[0].commutant_dim == 2);
}

TEST_CASE("Stone-Weierstrass examples") {
  const auto m3 = full_matrix_algebra(3);
  CHECK(check_stone_weierstrass(m3, m3, block_decompose(m3)).pass);
  const auto a = direct_sum({full_matrix_algebra(2), full_matrix_algebra(2)});
  const auto bs = block_decompose(a);
  const auto v = check_stone_weierstrass(block_ideal(a, bs, {0}), a, bs);
  CHECK(v.pass);
  CHECK_FALSE(v.separating);
}

TEST_CASE("star homomorphism residuals") {
  Rng rng(1);
  const Mat u = random_unitary(3, rng);
  const auto a = full_matrix_algebra(3);
  std::vector<Mat> images;
  for (const Mat& b : a.basis()) images.push_back(u * b * u.adjoint());
  const auto r = star_homomorphism_residuals(a.basis(), images);
  CHECK(r.multiplicative < 1e-12);
  CHECK(r.star < 1e-12);
  CHECK(r.injective());
  std::vector<Mat> transposed;
  for (const Mat& b : a.basis()) transposed.push_back(b.transpose());
  CHECK(star_homomorphism_residuals(a.basis(), transposed).multiplicative > 0.1);
}

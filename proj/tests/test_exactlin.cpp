#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "toda/exactlin.hpp"

using namespace toda;

namespace {

// deterministic small RNG for property cases
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ? seed : 1) {}
  std::uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  i64 below(i64 k) { return static_cast<i64>(next() % static_cast<std::uint64_t>(k)); }
};

Mat random_mat(Rng& rng, Ring r, int rows, int cols) {
  Mat m(r, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = rng.below(r.N);
  return m;
}

// every Z/N combination of the rows, as a sorted set of vectors
std::vector<Vec> brute_span(const Mat& m) {
  const Ring r = m.ring;
  std::set<Vec> span;
  std::vector<i64> coef(m.rows, 0);
  while (true) {
    Vec v(m.cols, 0);
    for (int i = 0; i < m.rows; ++i)
      if (coef[i]) v = vec_add(r, v, vec_scale(r, coef[i], m.row(i)));
    span.insert(v);
    int i = 0;
    for (; i < m.rows; ++i) {
      if (++coef[i] < r.N) break;
      coef[i] = 0;
    }
    if (i == m.rows) break;
  }
  return {span.begin(), span.end()};
}

std::vector<Vec> all_vectors(Ring r, int len) {
  std::vector<Vec> out;
  Vec v(len, 0);
  while (true) {
    out.push_back(v);
    int i = 0;
    for (; i < len; ++i) {
      if (++v[i] < r.N) break;
      v[i] = 0;
    }
    if (i == len) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("howell form: pinned small cases over Z/4") {
  Ring z4 = Ring::modular(4);

  CHECK(howell_form(Mat::identity(z4, 2)) == Mat::identity(z4, 2));

  Mat m = Mat::from_rows(z4, {{2, 2}, {0, 2}});
  Mat h = howell_form(m);
  auto span = enumerate_subgroup(Subgroup::from_generators(h));
  std::vector<Vec> expect = {{0, 0}, {0, 2}, {2, 0}, {2, 2}};
  CHECK(span == expect);

  Mat unit = Mat::from_rows(z4, {{3}});
  CHECK(howell_form(unit) == Mat::from_rows(z4, {{1}}));
}

TEST_CASE("howell form: idempotent, span-preserving, canonical") {
  for (i64 N : {4, 9}) {
    Ring r = Ring::modular(N);
    Rng rng(17 * N);
    for (int trial = 0; trial < 40; ++trial) {
      int rows = 1 + static_cast<int>(rng.below(4));
      int cols = 1 + static_cast<int>(rng.below(4));
      Mat m = random_mat(rng, r, rows, cols);
      Mat h = howell_form(m);
      CHECK(howell_form(h) == h);
      CHECK(brute_span(m) == brute_span(h));

      // row permutations and row-operation thickenings keep the form
      Mat shuffled = m;
      for (int i = rows - 1; i > 0; --i) {
        int j = static_cast<int>(rng.below(i + 1));
        for (int c = 0; c < cols; ++c) std::swap(shuffled.at(i, c), shuffled.at(j, c));
      }
      CHECK(howell_form(shuffled) == h);

      Mat thick = m;
      Vec combo(cols, 0);
      for (int i = 0; i < rows; ++i)
        combo = vec_add(r, combo, vec_scale(r, rng.below(N), m.row(i)));
      thick = vstack(thick, Mat::from_rows(r, {combo}, cols));
      CHECK(howell_form(thick) == h);
    }
  }
}

TEST_CASE("solve_affine: pinned small cases") {
  Ring z4 = Ring::modular(4);
  {
    Coset c = solve_affine(Mat::from_rows(z4, {{2}}), {2});
    REQUIRE(!c.is_empty);
    CHECK(c.rep == Vec{1});
    CHECK(c.sub.basis == Mat::from_rows(z4, {{2}}));
    CHECK(enumerate_coset(c) == std::vector<Vec>{{1}, {3}});
  }
  {
    Coset c = solve_affine(Mat::from_rows(z4, {{2}}), {1});
    CHECK(c.is_empty);
  }
  {
    Ring f5 = Ring::prime_field(5);
    Coset c = solve_affine(Mat::from_rows(f5, {{2}}), {3});
    REQUIRE(!c.is_empty);
    CHECK(c.rep == Vec{4});
    CHECK(c.sub.dim() == 0);
  }
  CHECK_THROWS_WITH_AS(solve_affine(Mat::from_rows(z4, {{2, 1}}), {1, 1}), doctest::Contains("shape"),
                       EngineError);
}

TEST_CASE("solve_affine agrees with exhaustive enumeration over Z/4") {
  Ring r = Ring::modular(4);
  Rng rng(99);
  int nonempty_seen = 0, empty_seen = 0;
  for (int trial = 0; trial < 80; ++trial) {
    int m = 1 + static_cast<int>(rng.below(3));
    int k = 1 + static_cast<int>(rng.below(3));
    Mat A = random_mat(rng, r, m, k);
    Vec b(m);
    if (trial % 2 == 0) {
      for (i64& x : b) x = rng.below(4);
    } else {
      Vec x0(k);
      for (i64& x : x0) x = rng.below(4);
      b = A.apply(x0);
    }
    Coset c = solve_affine(A, b);
    std::vector<Vec> brute;
    for (const Vec& x : all_vectors(r, k))
      if (A.apply(x) == Vec(b.begin(), b.end())) brute.push_back(x);
    if (c.is_empty) {
      ++empty_seen;
      CHECK(brute.empty());
    } else {
      ++nonempty_seen;
      CHECK(enumerate_coset(c) == brute);
    }
  }
  CHECK(nonempty_seen > 10);
  CHECK(empty_seen > 10);
}

TEST_CASE("kernel and image match brute force") {
  Ring r = Ring::modular(9);
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    int m = 1 + static_cast<int>(rng.below(2));
    int k = 1 + static_cast<int>(rng.below(3));
    Mat A = random_mat(rng, r, m, k);

    std::vector<Vec> ker_brute;
    for (const Vec& x : all_vectors(r, k))
      if (vec_is_zero(A.apply(x))) ker_brute.push_back(x);
    CHECK(enumerate_subgroup(kernel(A)) == ker_brute);

    std::set<Vec> im_brute;
    for (const Vec& x : all_vectors(r, k)) im_brute.insert(A.apply(x));
    CHECK(enumerate_subgroup(image(A)) == std::vector<Vec>(im_brute.begin(), im_brute.end()));
  }
}

TEST_CASE("subgroup sum: pinned cases and algebraic laws") {
  Ring z4 = Ring::modular(4);
  Subgroup two = Subgroup::from_generators(Mat::from_rows(z4, {{2}}));
  CHECK(subgroup_sum(two, two) == two);

  Subgroup a = Subgroup::from_generators(Mat::from_rows(z4, {{2, 0}}));
  Subgroup b = Subgroup::from_generators(Mat::from_rows(z4, {{0, 2}}));
  CHECK(subgroup_sum(a, b).order(100) == 4);

  Subgroup zero = Subgroup::zero(z4, 1);
  CHECK(subgroup_sum(two, zero) == two);

  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto rnd_sub = [&](int ambient) {
      return Subgroup::from_generators(random_mat(rng, z4, 1 + static_cast<int>(rng.below(2)), ambient));
    };
    int ambient = 1 + static_cast<int>(rng.below(3));
    Subgroup h1 = rnd_sub(ambient), h2 = rnd_sub(ambient), h3 = rnd_sub(ambient);
    CHECK(subgroup_sum(h1, h2) == subgroup_sum(h2, h1));
    CHECK(subgroup_sum(subgroup_sum(h1, h2), h3) == subgroup_sum(h1, subgroup_sum(h2, h3)));
    CHECK(subgroup_sum(h1, h1) == h1);
    CHECK(subgroup_leq(h1, subgroup_sum(h1, h2)));

    // elementwise: sums of members are exactly the members of the sum
    std::set<Vec> sums;
    for (const Vec& v : enumerate_subgroup(h1))
      for (const Vec& w : enumerate_subgroup(h2)) sums.insert(vec_add(z4, v, w));
    CHECK(std::vector<Vec>(sums.begin(), sums.end()) == enumerate_subgroup(subgroup_sum(h1, h2)));
  }
}

TEST_CASE("subgroup intersection matches brute force") {
  Ring z4 = Ring::modular(4);
  Rng rng(21);
  for (int trial = 0; trial < 15; ++trial) {
    int ambient = 1 + static_cast<int>(rng.below(3));
    Subgroup h1 = Subgroup::from_generators(random_mat(rng, z4, 2, ambient));
    Subgroup h2 = Subgroup::from_generators(random_mat(rng, z4, 2, ambient));
    auto e1 = enumerate_subgroup(h1);
    std::vector<Vec> both;
    for (const Vec& v : e1)
      if (h2.contains(v)) both.push_back(v);
    CHECK(enumerate_subgroup(intersect(h1, h2)) == both);
  }
}

TEST_CASE("coset calculus") {
  Ring z4 = Ring::modular(4);
  Subgroup two = Subgroup::from_generators(Mat::from_rows(z4, {{2}}));

  Coset c1 = Coset::of({1}, two);
  Coset c3 = Coset::of({3}, two);
  Coset c0 = Coset::of({0}, two);
  CHECK(coset_eq(c1, c3));
  CHECK(!coset_eq(c1, c0));
  CHECK(coset_eq(Coset::empty(z4, 1), Coset::empty(z4, 1)));
  CHECK(!coset_eq(c1, Coset::empty(z4, 1)));

  CHECK(c1.contains({3}));
  CHECK(!c1.contains({2}));

  // canonical representative is constant on the coset
  for (const Vec& v : enumerate_coset(c3)) CHECK(two.reduce(v) == c1.rep);

  CHECK(coset_eq(coset_negate(c1), c1));  // -1 = 3 = 1+2 mod 4
  Coset fixed = Coset::of({1}, Subgroup::zero(z4, 1));
  CHECK(!coset_eq(coset_negate(fixed), fixed));
  CHECK(coset_negate(fixed).rep == Vec{3});

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    int ambient = 1 + static_cast<int>(rng.below(2));
    Subgroup h = Subgroup::from_generators(random_mat(rng, z4, 1, ambient));
    Vec rep(ambient);
    for (i64& x : rep) x = rng.below(4);
    Coset c = Coset::of(rep, h);

    Mat M = random_mat(rng, z4, 1 + static_cast<int>(rng.below(2)), ambient);
    std::set<Vec> mapped;
    for (const Vec& v : enumerate_coset(c)) mapped.insert(M.apply(v));
    CHECK(std::vector<Vec>(mapped.begin(), mapped.end()) == enumerate_coset(coset_apply(M, c)));

    Coset d = Coset::of(Vec(ambient, 1), Subgroup::from_generators(random_mat(rng, z4, 1, ambient)));
    std::set<Vec> minkowski;
    for (const Vec& v : enumerate_coset(c))
      for (const Vec& w : enumerate_coset(d)) minkowski.insert(vec_add(z4, v, w));
    CHECK(std::vector<Vec>(minkowski.begin(), minkowski.end()) ==
          enumerate_coset(coset_minkowski_sum(c, d)));
  }
}

TEST_CASE("matrix inverse over Z/N") {
  Ring z9 = Ring::modular(9);
  Rng rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    int n = 1 + static_cast<int>(rng.below(3));
    // build an invertible matrix from unit-diagonal triangular factors
    Mat L = Mat::identity(z9, n), U = Mat::identity(z9, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        L.at(i, j) = rng.below(9);
        U.at(j, i) = rng.below(9);
      }
    for (int i = 0; i < n; ++i) {
      i64 u = 1 + rng.below(8);
      if (gcd64(u, 9) != 1) u = 1;
      U.at(i, i) = u;
    }
    Mat A = mat_mul(L, U);
    Mat Ainv = inverse(A);
    CHECK(mat_mul(A, Ainv) == Mat::identity(z9, n));
    CHECK(mat_mul(Ainv, A) == Mat::identity(z9, n));
  }
  CHECK_THROWS_AS(inverse(Mat::from_rows(z9, {{3}})), EngineError);
}

TEST_CASE("degenerate shapes: rank zero everywhere") {
  Ring z4 = Ring::modular(4);

  // no equations: everything solves
  Mat A0(z4, 0, 2);
  Coset c = solve_affine(A0, {});
  REQUIRE(!c.is_empty);
  CHECK(c.sub.order(100) == 16);

  // no unknowns: solvable iff b = 0
  Mat B0(z4, 2, 0);
  CHECK(!solve_affine(B0, {0, 0}).is_empty);
  CHECK(solve_affine(B0, {0, 1}).is_empty);

  // empty ambient
  Subgroup z = Subgroup::zero(z4, 0);
  CHECK(z.order(10) == 1);
  Coset e = Coset::of({}, z);
  CHECK(coset_eq(e, e));
  CHECK(howell_form(Mat(z4, 0, 0)) == Mat(z4, 0, 0));
}

TEST_CASE("subgroup order cap") {
  Ring z9 = Ring::modular(9);
  Subgroup full = Subgroup::full(z9, 8);
  CHECK_THROWS_WITH_AS(full.order(1000), doctest::Contains("too-large"), EngineError);
}

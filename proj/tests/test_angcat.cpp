#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "toda/freelocal.hpp"
#include "toda/rng.hpp"

using namespace toda;

namespace {

template <class F>
std::string thrown_code(F&& f) {
  try {
    f();
  } catch (const EngineError& e) {
    return e.code;
  }
  return "";
}

Morphism random_mor(FreeLocalBackend& B, Rng& rng, ObjRef X, ObjRef Y) {
  HomSpace h = B.hom(X, Y);
  Vec v(static_cast<size_t>(h.rank));
  for (auto& x : v) x = static_cast<i64>(rng.below(static_cast<std::uint64_t>(B.ring().N)));
  return Morphism{h, v};
}

ObjRef random_obj(FreeLocalBackend& B, Rng& rng) {
  ObjRef X = B.free_obj(1 + static_cast<int>(rng.below(2)));
  return B.suspend_obj(X, static_cast<int>(rng.below(3)) - 1);
}

bool congruent_to_identity_mod_p(const FreeLocalBackend& B, const Morphism& m) {
  Mat M = B.matrix_of(m);
  if (M.rows != M.cols) return false;
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j)
      if ((M.at(i, j) - (i == j ? 1 : 0)) % B.p() != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("shape checks on sequences") {
  FreeLocalBackend B(2);
  ObjRef X = B.free_obj(2);

  NSeq t = trivial_nseq(B, X);
  REQUIRE(t.objects.size() == 5);
  CHECK_NOTHROW(check_nseq(B, t));
  CHECK(B.object_eq(t.objects[4], B.suspend_obj(X)));
  CHECK(B.mor_eq(t.maps[0], B.identity(X)));

  NSeq broken = t;
  broken.objects[4] = B.free_obj(3);  // no longer the suspension of the first
  CHECK(thrown_code([&] { check_nseq(B, broken); }) == "shape");

  NSeq wrong_len = t;
  wrong_len.maps.pop_back();
  CHECK(thrown_code([&] { check_nseq(B, wrong_len); }) == "shape");
}

TEST_CASE("rotations append the signed suspension and invert each other") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(17 * static_cast<std::uint64_t>(p));
    for (int trial = 0; trial < 12; ++trial) {
      ObjRef X = random_obj(B, rng);
      ObjRef Y = random_obj(B, rng);
      NSeq s = B.extend(random_mor(B, rng, X, Y));
      REQUIRE_NOTHROW(check_nseq(B, s));

      NSeq l = rotate(B, s, Rotation::left);
      CHECK_NOTHROW(check_nseq(B, l));
      // n = 4 is even, so the appended map is +Sigma(first map).
      CHECK(B.mor_eq(l.maps.back(), B.suspend(s.maps.front())));
      CHECK(B.object_eq(l.objects.front(), s.objects[1]));

      NSeq r = rotate(B, s, Rotation::right);
      CHECK_NOTHROW(check_nseq(B, r));
      CHECK(B.mor_eq(r.maps.front(), B.suspend(s.maps.back(), -1)));
      CHECK(B.object_eq(r.objects.back(), s.objects[3]));

      // Mutually inverse in both orders.
      NSeq lr = rotate(B, l, Rotation::right);
      NSeq rl = rotate(B, r, Rotation::left);
      for (const NSeq* back : {&lr, &rl}) {
        REQUIRE(back->maps.size() == s.maps.size());
        for (size_t i = 0; i < s.maps.size(); ++i) CHECK(B.mor_eq(back->maps[i], s.maps[i]));
      }

      // rotate_times composes single steps.
      NSeq twice = rotate_times(B, s, Rotation::left, 2);
      NSeq step = rotate(B, rotate(B, s, Rotation::left), Rotation::left);
      for (size_t i = 0; i < step.maps.size(); ++i) CHECK(B.mor_eq(twice.maps[i], step.maps[i]));
    }
  }
}

TEST_CASE("direct sums of sequences are componentwise") {
  FreeLocalBackend B(3);
  Rng rng(5);
  ObjRef X = B.free_obj(1);
  ObjRef Y = B.free_obj(2);
  NSeq a = B.extend(random_mor(B, rng, X, X));
  NSeq b = B.extend(random_mor(B, rng, Y, X));
  NSeq s = direct_sum(B, a, b);
  CHECK_NOTHROW(check_nseq(B, s));
  for (size_t i = 0; i < s.objects.size(); ++i)
    CHECK(B.object_eq(s.objects[i], B.sum_obj({a.objects[i], b.objects[i]})));

  // Inclusions assemble to a morphism of sequences in each summand.
  std::vector<Morphism> comps;
  for (int i = 0; i < 4; ++i) comps.push_back(B.inclusion({a.objects[static_cast<size_t>(i)], b.objects[static_cast<size_t>(i)]}, 0));
  CHECK(is_morphism_of_nseqs(B, a, s, comps));
}

TEST_CASE("inclusion / projection identities") {
  FreeLocalBackend B(2);
  ObjRef X = B.free_obj(2);
  ObjRef Y = B.suspend_obj(B.free_obj(1));
  std::vector<ObjRef> parts{X, Y};
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) {
      Morphism m = B.compose(B.projection(parts, i), B.inclusion(parts, j));
      if (i == j)
        CHECK(B.mor_eq(m, B.identity(parts[i])));
      else
        CHECK(m.is_zero());
    }
}

TEST_CASE("pre/post-composition matrices agree with direct composition") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(99 + static_cast<std::uint64_t>(p));
    for (int trial = 0; trial < 10; ++trial) {
      ObjRef W = random_obj(B, rng), X = random_obj(B, rng), Y = random_obj(B, rng), Z = random_obj(B, rng);
      Morphism f = random_mor(B, rng, X, Y);
      Morphism g = random_mor(B, rng, Y, Z);
      Morphism h = random_mor(B, rng, W, X);
      Morphism k = random_mor(B, rng, Y, W);

      Mat post = B.postcompose_matrix(g, X);
      CHECK(post.apply(f.coords) == B.compose(g, f).coords);
      Mat pre = B.precompose_matrix(f, W);
      CHECK(pre.apply(k.coords) == B.compose(k, f).coords);

      Mat S = B.suspend_matrix(W, X);
      CHECK(S.apply(h.coords) == B.suspend(h).coords);

      // Functoriality: suspension respects composition.
      CHECK(B.mor_eq(B.suspend(B.compose(g, f)), B.compose(B.suspend(g), B.suspend(f))));
    }
  }
}

TEST_CASE("joint affine systems over several blocks") {
  Ring R = Ring::modular(4);
  FreeLocalBackend B(2);
  HomSpace scalar = B.hom(B.free_obj(1), B.free_obj(1));

  JointSystem js(R);
  int bx = js.add_block(scalar);
  int by = js.add_block(scalar);
  REQUIRE(js.total_unknowns() == 2);

  Mat one = Mat::identity(R, 1);
  Mat two = mat_scale(2, one);
  js.add_equation({{bx, one}, {by, one}}, Vec{1});  // x + y = 1
  js.add_equation({{bx, two}}, Vec{2});             // 2x = 2

  Coset sol = js.solve();
  REQUIRE(!sol.is_empty);
  auto all = enumerate_coset(sol);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<Vec>{{1, 0}, {3, 2}});

  // Selectors project the joint solution onto each block.
  for (const Vec& v : all) {
    Vec x = js.selector(bx).apply(v);
    Vec y = js.selector(by).apply(v);
    CHECK(R.norm(x[0] + y[0]) == 1);
    CHECK(R.norm(2 * x[0]) == 2);
  }
}

TEST_CASE("ladder with pinned first column over Z/4") {
  FreeLocalBackend B(2);
  ObjRef X = B.free_obj(1);
  HomSpace h = B.hom(X, X);
  Morphism two{h, {2}};

  // top:    X -2-> X -2-> X      (columns c0 = 1 pinned, c1, c2 unknown)
  // bottom: X -2-> X -2-> X
  std::vector<Morphism> row{two, two};
  std::vector<std::optional<Morphism>> given(3);
  given[0] = B.identity(X);
  LadderSolution L = solve_ladder(B, row, row, given);
  REQUIRE(L.solvable());

  Coset c1 = L.column_coset(1);
  Coset c2 = L.column_coset(2);
  Subgroup even = Subgroup::from_generators(Mat::from_rows(Ring::modular(4), {{2}}));
  CHECK(coset_eq(c1, Coset::of(Vec{1}, even)));
  CHECK(coset_eq(c2, Coset::of(Vec{1}, even)));

  // The particular solution satisfies every square by direct composition.
  auto cols = L.particular(B);
  REQUIRE(cols.size() == 3);
  for (int i = 0; i < 2; ++i)
    CHECK(B.mor_eq(B.compose(row[static_cast<size_t>(i)], cols[static_cast<size_t>(i)]),
                   B.compose(cols[static_cast<size_t>(i) + 1], row[static_cast<size_t>(i)])));

  // Incompatible pinned data has no solutions.
  std::vector<Morphism> top{two};
  std::vector<Morphism> bottom{B.identity(X)};
  std::vector<std::optional<Morphism>> g2(2);
  g2[0] = B.identity(X);
  g2[1] = B.identity(X);  // square needs 1*1 = 1*2
  CHECK(!solve_ladder(B, top, bottom, g2).solvable());
}

TEST_CASE("sequence morphisms solve jointly with the wrap square") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(123 + static_cast<std::uint64_t>(p));
    for (int trial = 0; trial < 6; ++trial) {
      ObjRef X = random_obj(B, rng);
      ObjRef Y = random_obj(B, rng);
      NSeq e = B.extend(random_mor(B, rng, X, Y));

      LadderSolution L = solve_nseq_morphism(B, e, e, {{0, B.identity(e.objects[0])}});
      REQUIRE(L.solvable());
      auto comps = L.particular(B);
      REQUIRE(comps.size() == 4);
      CHECK(is_morphism_of_nseqs(B, e, e, comps));

      // Random points of the joint solution coset are genuine sequence
      // morphisms (rep plus a random combination of kernel directions).
      const Ring R = B.ring();
      for (int k = 0; k < 10; ++k) {
        Vec v = L.joint.rep;
        for (int r = 0; r < L.joint.sub.basis.rows; ++r)
          v = vec_add(R, v,
                      vec_scale(R, static_cast<i64>(rng.below(static_cast<std::uint64_t>(R.N))),
                                L.joint.sub.basis.row(r)));
        CHECK(is_morphism_of_nseqs(B, e, e, L.components(B, v)));
      }
    }
  }
}

TEST_CASE("fill-in completions between equal all-p rows are unipotent mod p") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    ObjRef X = B.free_obj(1);
    HomSpace h = B.hom(X, X);
    NSeq e = B.extend(Morphism{h, {p}});
    REQUIRE(e.maps.size() == 4);

    LadderSolution L = complete_morphism(B, e, e, 0, B.identity(X), B.identity(e.objects[1]));
    REQUIRE(L.solvable());

    // Every completion of (1, 1) stays congruent to the identity mod p, so
    // each fill-in is an isomorphism.
    for (const Vec& v : enumerate_coset(L.joint, 100000)) {
      auto comps = L.components(B, v);
      CHECK(is_morphism_of_nseqs(B, e, e, comps));
      for (const auto& c : comps) CHECK(congruent_to_identity_mod_p(B, c));
    }

    // A non-commuting given square is rejected up front.
    CHECK(thrown_code([&] { complete_morphism(B, e, e, 0, B.identity(X), B.zero_mor(e.objects[1], e.objects[1])); }) ==
          "not-commuting-input");

    // Zeroing one component of the identity morphism breaks a square.
    std::vector<Morphism> bad;
    for (int i = 0; i < 4; ++i) bad.push_back(B.identity(e.objects[static_cast<size_t>(i)]));
    bad[1] = B.zero_mor(e.objects[1], e.objects[1]);
    CHECK(!is_morphism_of_nseqs(B, e, e, bad));
  }
}

TEST_CASE("complete_morphism fills at every consecutive position") {
  FreeLocalBackend B(2);
  Rng rng(7);
  ObjRef X = B.free_obj(1);
  ObjRef Y = B.free_obj(2);
  NSeq e = B.extend(random_mor(B, rng, X, Y));
  for (int at = 0; at + 1 <= 3; ++at) {
    LadderSolution L =
        complete_morphism(B, e, e, at, B.identity(e.objects[static_cast<size_t>(at)]),
                          B.identity(e.objects[static_cast<size_t>(at) + 1]));
    REQUIRE(L.solvable());
    CHECK(is_morphism_of_nseqs(B, e, e, L.particular(B)));
  }
}

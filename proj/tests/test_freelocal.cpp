#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "toda/freelocal.hpp"
#include "toda/rng.hpp"
#include "toda/todabrackets.hpp"

using namespace toda;

namespace {

Mat random_matrix(Rng& rng, const Ring& R, int rows, int cols) {
  Mat M(R, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M.at(i, j) = static_cast<i64>(rng.below(static_cast<std::uint64_t>(R.N)));
  return M;
}

std::vector<int> object_ranks(const NSeq& e) {
  std::vector<int> out;
  for (const ObjRef& o : e.objects) out.push_back(o.id);
  return out;
}

}  // namespace

TEST_CASE("hom spaces are matrix spaces with the matrix-unit basis") {
  FreeLocalBackend B(2);
  ObjRef X = B.free_obj(3), Y = B.free_obj(2);
  HomSpace h = B.hom(X, Y);
  CHECK(h.rank == 6);
  CHECK(h.ring.N == 4);

  for (int i = 0; i < h.rank; ++i) {
    Mat M = B.matrix_of(B.basis_element(h, i));
    REQUIRE(M.rows == 2);
    REQUIRE(M.cols == 3);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c) CHECK(M.at(r, c) == ((r * 3 + c == i) ? 1 : 0));
    CHECK(!B.describe_basis_element(h, i).empty());
  }
  CHECK(!B.describe_object(X).empty());
  CHECK(B.hom(B.zero_obj(), X).rank == 0);
}

TEST_CASE("composition matches matrix multiplication") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(3 * static_cast<std::uint64_t>(p));
    const Ring R = B.ring();
    for (int trial = 0; trial < 20; ++trial) {
      int a = 1 + static_cast<int>(rng.below(3));
      int b = 1 + static_cast<int>(rng.below(3));
      int c = 1 + static_cast<int>(rng.below(3));
      ObjRef X = B.free_obj(a), Y = B.free_obj(b), Z = B.free_obj(c);
      Morphism f = B.from_matrix(X, Y, random_matrix(rng, R, b, a));
      Morphism g = B.from_matrix(Y, Z, random_matrix(rng, R, c, b));
      CHECK(B.matrix_of(B.compose(g, f)) == mat_mul(B.matrix_of(g), B.matrix_of(f)));
      CHECK(B.matrix_of(f) == B.matrix_of(B.from_matrix(X, Y, B.matrix_of(f))));  // round-trip
    }
    CHECK(B.matrix_of(B.identity(B.free_obj(2))) == Mat::identity(R, 2));
  }
}

TEST_CASE("local normal form: invertible change of basis onto the pinned diagonal") {
  for (i64 p : {2, 3, 5}) {
    FreeLocalBackend B(p);
    Rng rng(41 * static_cast<std::uint64_t>(p));
    const Ring R = B.ring();
    for (int trial = 0; trial < 30; ++trial) {
      int rows = 1 + static_cast<int>(rng.below(3));
      int cols = 1 + static_cast<int>(rng.below(3));
      Mat M = random_matrix(rng, R, rows, cols);
      auto nf = B.local_normal_form(M);

      CHECK(mat_mul(mat_mul(nf.U, M), nf.V) == nf.D);
      CHECK_NOTHROW(inverse(nf.U));
      CHECK_NOTHROW(inverse(nf.V));

      // Diagonal pattern: 1s, then the maximal-ideal generator, then 0s.
      CHECK(nf.units + nf.radicals + nf.zeros == std::min(rows, cols));
      for (int i = 0; i < nf.D.rows; ++i)
        for (int j = 0; j < nf.D.cols; ++j) {
          i64 expect = 0;
          if (i == j && i < nf.units) expect = 1;
          else if (i == j && i < nf.units + nf.radicals) expect = p;
          CHECK(nf.D.at(i, j) == expect);
        }
    }

    // Edge cases.
    auto z = B.local_normal_form(Mat::zero(R, 2, 2));
    CHECK(z.units == 0);
    CHECK(z.radicals == 0);
    CHECK(z.zeros == 2);
    auto id = B.local_normal_form(Mat::identity(R, 3));
    CHECK(id.units == 3);
    CHECK(id.radicals == 0);
    CHECK(id.zeros == 0);
  }
}

TEST_CASE("normal-form profiles of the worked matrices") {
  FreeLocalBackend B(2);
  const Ring R = B.ring();

  auto profile = [&](const Mat& M) {
    auto nf = B.local_normal_form(M);
    return std::vector<int>{nf.units, nf.radicals, nf.zeros};
  };
  CHECK(profile(Mat::from_rows(R, {{3}})) == std::vector<int>{1, 0, 0});
  CHECK(profile(Mat::from_rows(R, {{2}})) == std::vector<int>{0, 1, 0});
  CHECK(profile(Mat::from_rows(R, {{2, 2}, {2, 2}})) == std::vector<int>{0, 1, 1});
}

TEST_CASE("extension rows are assembled from the expected atoms") {
  FreeLocalBackend B(2);
  const Ring R = B.ring();
  ObjRef R1 = B.free_obj(1), R2 = B.free_obj(2);

  // Unit: contractible tail.
  NSeq unit = B.extend(B.from_matrix(R1, R1, Mat::from_rows(R, {{3}})));
  CHECK(object_ranks(unit) == std::vector<int>{1, 1, 0, 0, 1});

  // Radical: the all-p row.
  NSeq rad = B.extend(B.from_matrix(R1, R1, Mat::from_rows(R, {{2}})));
  CHECK(object_ranks(rad) == std::vector<int>{1, 1, 1, 1, 1});
  for (const Morphism& m : rad.maps) CHECK(m.coords == Vec{2});

  // Paired zero slot.
  NSeq zero = B.extend(B.zero_mor(R1, R1));
  CHECK(object_ranks(zero) == std::vector<int>{1, 1, 1, 1, 1});
  CHECK(zero.maps[0].is_zero());

  // Mixed square matrix: one radical and one paired zero.
  NSeq mixed = B.extend(B.from_matrix(R2, R2, Mat::from_rows(R, {{2, 2}, {2, 2}})));
  CHECK(object_ranks(mixed) == std::vector<int>{2, 2, 2, 2, 2});

  // Unpaired target slot (split inclusion) and unpaired source slot.
  NSeq incl = B.extend(B.from_matrix(R1, R2, Mat::from_rows(R, {{1}, {0}}, 1)));
  CHECK(object_ranks(incl) == std::vector<int>{1, 2, 1, 0, 1});
  NSeq srcslot = B.extend(B.from_matrix(R2, R1, Mat::from_rows(R, {{2, 0}}, 2)));
  CHECK(object_ranks(srcslot) == std::vector<int>{2, 1, 1, 2, 2});
}

TEST_CASE("extensions start with their input, validate, and are exact") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(1000 + static_cast<std::uint64_t>(p));
    const Ring R = B.ring();
    for (int trial = 0; trial < 15; ++trial) {
      int a = 1 + static_cast<int>(rng.below(3));
      int b = 1 + static_cast<int>(rng.below(3));
      Morphism f = B.from_matrix(B.free_obj(a), B.free_obj(b), random_matrix(rng, R, b, a));
      NSeq e = B.extend(f);
      CHECK_NOTHROW(check_nseq(B, e));
      CHECK(B.mor_eq(e.maps[0], f));
      CHECK(B.compose(e.maps[1], e.maps[0]).is_zero());
      CHECK(B.compose(e.maps[2], e.maps[1]).is_zero());
      CHECK(B.compose(e.maps[3], e.maps[2]).is_zero());
      CHECK(yoneda_exact(B, e));
    }
  }
}

TEST_CASE("exactness detector rejects corrupted rows") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    ObjRef R1 = B.free_obj(1);
    HomSpace h = B.hom(R1, R1);
    NSeq e = B.extend(Morphism{h, {p}});
    REQUIRE(yoneda_exact(B, e));

    NSeq hole = e;
    hole.maps[1] = B.zero_mor(e.objects[1], e.objects[2]);
    CHECK(!yoneda_exact(B, hole));

    // An identity in place of the p-map breaks exactness as well.
    NSeq ident = e;
    ident.maps[1] = B.from_matrix(e.objects[1], e.objects[2], Mat::identity(B.ring(), 1));
    CHECK(!yoneda_exact(B, ident));
  }
}

TEST_CASE("rotations and direct sums preserve exactness") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(77 * static_cast<std::uint64_t>(p));
    const Ring R = B.ring();
    Morphism f = B.from_matrix(B.free_obj(2), B.free_obj(1), random_matrix(rng, R, 1, 2));
    Morphism g = B.from_matrix(B.free_obj(1), B.free_obj(1), random_matrix(rng, R, 1, 1));
    NSeq e = B.extend(f);
    CHECK(yoneda_exact(B, rotate(B, e, Rotation::left)));
    CHECK(yoneda_exact(B, rotate(B, e, Rotation::right)));
    CHECK(yoneda_exact(B, direct_sum(B, e, B.extend(g))));
    CHECK(yoneda_exact(B, trivial_nseq(B, B.free_obj(2))));
  }
}

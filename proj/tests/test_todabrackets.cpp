#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "toda/freelocal.hpp"
#include "toda/oracle.hpp"
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

Morphism scalar(FreeLocalBackend& B, i64 c) {
  ObjRef R1 = B.free_obj(1);
  HomSpace h = B.hom(R1, R1);
  return Morphism{h, {B.ring().norm(c)}};
}

DiagramChain scalar_chain(FreeLocalBackend& B, const std::vector<i64>& cs) {
  DiagramChain d;
  for (i64 c : cs) d.maps.push_back(scalar(B, c));
  return d;
}

// rep + <gen> inside a rank-1 ambient hom space.
Coset coset1(const Ring& R, i64 rep, i64 gen) {
  return Coset::of(Vec{R.norm(rep)}, Subgroup::from_generators(Mat::from_rows(R, {{R.norm(gen)}}, 1)));
}

Coset full1(const Ring& R) { return Coset::of(Vec{0}, Subgroup::full(R, 1)); }

void check_against_oracle(FreeLocalBackend& B, const DiagramChain& d, const TodaResult& r) {
  auto elems = oracle::elements_for(B, d, r);
  CHECK_MESSAGE(oracle::matches_coset(elems, r.bracket),
                flavor_name(r.flavor, r.mid_index) << " bracket disagrees with enumeration");
}

}  // namespace

TEST_CASE("the p-chain bracket is 1 + (p) in every flavor") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    const Ring R = B.ring();
    DiagramChain d = scalar_chain(B, {p, p, p, p});
    Coset expected = coset1(R, 1, p);

    TodaResult cc = toda_cc(B, d);
    TodaResult ff = toda_ff(B, d);
    TodaResult fc = toda_fc(B, d);
    for (const TodaResult* r : {&cc, &ff, &fc}) {
      REQUIRE(!r->empty());
      CHECK(coset_eq(r->bracket, expected));
      CHECK(replay_witness(B, d, *r));
      check_against_oracle(B, d, *r);
    }
    for (int i = 1; i <= 4; ++i) {
      TodaResult m = toda_mid(B, d, i);
      REQUIRE(!m.empty());
      CHECK(coset_eq(m.bracket, expected));
      CHECK(replay_witness(B, d, m));
      check_against_oracle(B, d, m);
    }

    // The coset's subgroup is exactly the two-sided indeterminacy.
    CHECK(cc.bracket.sub == indeterminacy(B, d.maps.front(), d.maps.back()));
    CHECK(replay_fc_inclusion(B, d, fc));
  }
}

TEST_CASE("a sign on the last map negates the bracket") {
  for (i64 p : {3, 5}) {
    FreeLocalBackend B(p);
    const Ring R = B.ring();
    DiagramChain d = scalar_chain(B, {p, p, p, -p});
    Coset expected = coset1(R, -1, p);
    for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
      TodaResult r = toda_bracket(B, fl, d);
      REQUIRE(!r.empty());
      CHECK(coset_eq(r.bracket, expected));
      check_against_oracle(B, d, r);
    }
    // For odd p this is visibly different from 1 + (p).
    CHECK(!coset_eq(toda_cc(B, d).bracket, coset1(R, 1, p)));
  }
}

TEST_CASE("the all-zero chain brackets to exactly {0}") {
  FreeLocalBackend B(2);
  const Ring R = B.ring();
  DiagramChain d = scalar_chain(B, {0, 0, 0, 0});
  Coset just_zero = Coset::of(Vec{0}, Subgroup::zero(R, 1));
  for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
    TodaResult r = toda_bracket(B, fl, d);
    REQUIRE(!r.empty());
    CHECK(coset_eq(r.bracket, just_zero));
    check_against_oracle(B, d, r);
  }
  for (int i = 1; i <= 4; ++i) CHECK(coset_eq(toda_mid(B, d, i).bracket, just_zero));
}

TEST_CASE("flavors can split: full cofiber bracket with empty fiber bracket") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    const Ring R = B.ring();
    // f_1 = 1, f_2 = 0, f_3 = 1, f_4 = 1; note 1 = f_4 f_3 does not vanish.
    DiagramChain d = scalar_chain(B, {1, 0, 1, 1});

    TodaResult cc = toda_cc(B, d);
    REQUIRE(!cc.empty());
    CHECK(coset_eq(cc.bracket, full1(R)));
    CHECK(replay_witness(B, d, cc));
    check_against_oracle(B, d, cc);

    TodaResult ff = toda_ff(B, d);
    CHECK(ff.empty());
    check_against_oracle(B, d, ff);

    TodaResult fc = toda_fc(B, d);
    CHECK(fc.empty());
    check_against_oracle(B, d, fc);

    CHECK(coset_eq(toda_mid(B, d, 1).bracket, full1(R)));
    for (int i : {2, 3, 4}) {
      TodaResult m = toda_mid(B, d, i);
      CHECK(m.empty());
      check_against_oracle(B, d, m);
    }
  }
}

TEST_CASE("exhaustive oracle agreement on scalar chains") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    const i64 N = B.ring().N;
    int nonempty = 0;
    for (i64 a = 0; a < N; ++a)
      for (i64 b = 0; b < N; ++b)
        for (i64 c = 0; c < N; ++c)
          for (i64 e = 0; e < N; ++e) {
            DiagramChain d = scalar_chain(B, {a, b, c, e});
            for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
              TodaResult r = toda_bracket(B, fl, d);
              if (!r.empty()) ++nonempty;
              auto elems = oracle::elements_for(B, d, r);
              REQUIRE_MESSAGE(oracle::matches_coset(elems, r.bracket),
                              "chain (" << a << "," << b << "," << c << "," << e << ") flavor "
                                        << flavor_name(fl));
            }
            for (int i = 1; i <= 4; ++i) {
              TodaResult m = toda_mid(B, d, i);
              auto elems = oracle::elements_for(B, d, m);
              REQUIRE_MESSAGE(oracle::matches_coset(elems, m.bracket),
                              "chain (" << a << "," << b << "," << c << "," << e << ") "
                                        << flavor_name(Flavor::mid, i));
            }
            // The fiber-cofiber bracket is nonempty exactly when consecutive
            // composites vanish.
            bool all_zero = true;
            for (bool z : composable_zero_check(B, d)) all_zero = all_zero && z;
            CHECK(toda_fc(B, d).empty() == !all_zero);
          }
    CHECK(nonempty > 0);
  }
}

TEST_CASE("oracle agreement on a rank-2 diagonal chain") {
  FreeLocalBackend B(2);
  const Ring R = B.ring();
  ObjRef R2 = B.free_obj(2);
  Mat twoI = mat_scale(2, Mat::identity(R, 2));
  Morphism f = B.from_matrix(R2, R2, twoI);
  DiagramChain d{{f, f, f, f}};

  // Expected: identity + all matrices divisible by p, in every flavor.
  std::vector<Vec> gens;
  for (int i = 0; i < 4; ++i) {
    Vec g(4, 0);
    g[static_cast<size_t>(i)] = 2;
    gens.push_back(g);
  }
  Coset expected = Coset::of(B.identity(R2).coords, Subgroup::from_generators(Mat::from_rows(R, gens, 4)));

  for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
    TodaResult r = toda_bracket(B, fl, d);
    REQUIRE(!r.empty());
    CHECK(coset_eq(r.bracket, expected));
    CHECK(replay_witness(B, d, r));
    check_against_oracle(B, d, r);
  }
  for (int i : {2, 3}) {
    TodaResult m = toda_mid(B, d, i);
    CHECK(coset_eq(m.bracket, expected));
    check_against_oracle(B, d, m);
  }
}

TEST_CASE("the bracket does not depend on the chosen extension row") {
  FreeLocalBackend B(2);
  const Ring R = B.ring();
  ObjRef R2 = B.free_obj(2);
  Mat twoI = mat_scale(2, Mat::identity(R, 2));
  Morphism f = B.from_matrix(R2, R2, twoI);
  DiagramChain d{{f, f, f, f}};

  // Twist the default extension by a basis swap in the third object.
  NSeq e = B.extend(f);
  Mat swap = Mat::from_rows(R, {{0, 1}, {1, 0}});
  ObjRef Z = e.objects[2];
  Morphism u = B.from_matrix(Z, Z, swap);
  NSeq twisted = e;
  twisted.maps[1] = B.compose(u, e.maps[1]);
  twisted.maps[2] = B.compose(e.maps[2], B.from_matrix(Z, Z, inverse(swap)));
  REQUIRE(yoneda_exact(B, twisted));
  REQUIRE(!B.mor_eq(twisted.maps[1], e.maps[1]));

  TodaResult plain = toda_cc(B, d);
  TodaResult alt = toda_cc(B, d, twisted);
  CHECK(coset_eq(plain.bracket, alt.bracket));
  check_against_oracle(B, d, alt);

  // Same twist applied to the fiber row and to a staircase row.
  NSeq w = toda_ff(B, d).extensions_used[0];
  Morphism v = B.from_matrix(w.objects[2], w.objects[2], swap);
  NSeq wtw = w;
  wtw.maps[1] = B.compose(v, w.maps[1]);
  wtw.maps[2] = B.compose(w.maps[2], B.from_matrix(w.objects[2], w.objects[2], inverse(swap)));
  REQUIRE(yoneda_exact(B, wtw));
  CHECK(coset_eq(toda_ff(B, d, wtw).bracket, toda_ff(B, d).bracket));

  TodaResult fc = toda_fc(B, d);
  std::vector<NSeq> rows = fc.extensions_used;
  // Twisting row E^2 beyond its pinned slot keeps f_2 in place.
  ObjRef Z3 = rows[0].objects[3];
  Morphism u2 = B.from_matrix(Z3, Z3, swap);
  rows[0].maps[2] = B.compose(u2, rows[0].maps[2]);
  rows[0].maps[3] = B.compose(rows[0].maps[3], B.from_matrix(Z3, Z3, inverse(swap)));
  REQUIRE(yoneda_exact(B, rows[0]));
  CHECK(coset_eq(toda_fc(B, d, rows).bracket, fc.bracket));
}

TEST_CASE("brackets transform correctly under isomorphism of chains") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    Rng rng(271 + static_cast<std::uint64_t>(p));
    const Ring R = B.ring();
    std::vector<ObjRef> pool{B.free_obj(1), B.free_obj(2)};
    for (int trial = 0; trial < 4; ++trial) {
      DiagramChain d = random_zero_composite_chain(B, pool, rng, 4);

      // Unipotent isomorphisms u_i = 1 + p * (random) at every object.
      std::vector<Morphism> u, uinv;
      for (int i = 0; i <= 4; ++i) {
        ObjRef X = d.object(i);
        Mat Rnd(R, X.id, X.id);
        for (int r = 0; r < X.id; ++r)
          for (int c = 0; c < X.id; ++c)
            Rnd.at(r, c) = static_cast<i64>(rng.below(static_cast<std::uint64_t>(R.N)));
        Mat U = mat_add(Mat::identity(R, X.id), mat_scale(p, Rnd));
        u.push_back(B.from_matrix(X, X, U));
        uinv.push_back(B.from_matrix(X, X, inverse(U)));
      }
      DiagramChain conj;
      for (int i = 0; i < 4; ++i)
        conj.maps.push_back(
            B.compose(u[static_cast<size_t>(i) + 1], B.compose(d.maps[static_cast<size_t>(i)], uinv[static_cast<size_t>(i)])));

      // Transport matrix: psi -> u_5 . psi . Sigma(u_1^{-1}).
      Mat T = mat_mul(B.postcompose_matrix(u[4], B.suspend_obj(conj.source())),
                      B.precompose_matrix(B.suspend(uinv[0]), d.target()));

      for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
        TodaResult base = toda_bracket(B, fl, d);
        TodaResult moved = toda_bracket(B, fl, conj);
        REQUIRE(!base.empty());
        REQUIRE(!moved.empty());
        CHECK(coset_eq(moved.bracket, coset_apply(T, base.bracket)));
      }
    }
  }
}

TEST_CASE("structural laws on deterministic chains") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    std::vector<Morphism> pchain;
    for (int i = 0; i < 4; ++i) pchain.push_back(scalar(B, p));

    SUBCASE("minus pair") {
      for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
        LawReport rep = law_minus_pair(B, fl, DiagramChain{pchain}, 2, 4);
        CHECK_MESSAGE(rep.holds, rep.law << ": " << rep.detail);
      }
    }
    SUBCASE("zero membership") {
      DiagramChain z = scalar_chain(B, {p, 0, p, p});
      for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
        LawReport rep = law_zero_membership(B, fl, z);
        CHECK_MESSAGE(rep.holds, rep.law << ": " << rep.detail);
      }
      // A bracket with no zero slot violates the hypothesis.
      CHECK(thrown_code([&] { law_zero_membership(B, Flavor::cc, DiagramChain{pchain}); }) == "hypothesis-violated");
    }
    SUBCASE("subadditivity and sign") {
      LawReport rep = law_subadditivity(B, DiagramChain{pchain}, 2, scalar(B, p));
      CHECK_MESSAGE(rep.holds, rep.detail);
      LawReport neg = law_minus_one(B, DiagramChain{pchain}, 3);
      CHECK_MESSAGE(neg.holds, neg.detail);
    }
    SUBCASE("laws on the long chain") {
      std::vector<Morphism> lchain;
      for (int i = 0; i < 5; ++i) lchain.push_back(scalar(B, p));
      for (Flavor fl : {Flavor::cc, Flavor::ff, Flavor::fc}) {
        for (const char* which : {"post-compose", "pre-compose", "contract-first", "contract-last", "shift"}) {
          LawReport rep = juggling_law(B, which, fl, lchain);
          CHECK_MESSAGE(rep.holds, which << " [" << flavor_name(fl) << "]: " << rep.detail);
        }
        LawReport mid3 = juggling_law(B, "contract-mid", fl, lchain, 3);
        CHECK_MESSAGE(mid3.holds, "contract-mid [" << flavor_name(fl) << "]: " << mid3.detail);
      }
      // The shift law's two sides are nonempty sets here, not just vacuous.
      TodaResult inner = toda_cc(B, DiagramChain{pchain});
      REQUIRE(!inner.empty());
    }
    SUBCASE("fiber-cofiber specific laws") {
      DiagramChain d{pchain};
      Morphism h{B.hom(B.suspend_obj(d.object(0)), d.object(3)), {1}};
      Morphism k{B.hom(B.suspend_obj(d.object(1)), d.object(4)), {3}};
      LawReport uni = law_fc_union(B, d, h, k);
      CHECK_MESSAGE(uni.holds, uni.detail);
      CHECK(law_fc_nonempty_iff(B, d).holds);
      CHECK(law_fc_inclusion(B, d).holds);
      CHECK(law_fc_nonempty_iff(B, scalar_chain(B, {1, 0, 1, 1})).holds);
      CHECK(law_fc_inclusion(B, scalar_chain(B, {p, 0, 0, p})).holds);
    }
  }
}

TEST_CASE("sequence recognition: exactness plus identity membership") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    HomSpace h = B.hom(B.free_obj(1), B.free_obj(1));

    // Genuine extensions and their rotations pass.
    NSeq e = B.extend(Morphism{h, {p}});
    CHECK(heller_is_n_angle(B, e).yes);
    CHECK(heller_is_n_angle(B, rotate(B, e, Rotation::left)).yes);
    CHECK(heller_is_n_angle(B, rotate(B, e, Rotation::right)).yes);
    CHECK(heller_is_n_angle(B, direct_sum(B, e, trivial_nseq(B, B.free_obj(1)))).yes);

    // Exact but wrong: a sign flip on one map of the all-p row survives the
    // exactness check yet fails the bracket criterion for odd p.
    NSeq signed_row = e;
    signed_row.maps[3] = B.negate(e.maps[3]);
    HellerVerdict v = heller_is_n_angle(B, signed_row);
    CHECK(yoneda_exact(B, signed_row));
    if (p == 2) {
      CHECK(v.yes);  // -1 = 1 mod 2: the sign is invisible
    } else {
      CHECK(!v.yes);
      CHECK(v.reason == "identity-not-in-bracket");
    }

    // Broken exactness is reported as such.
    NSeq hole = e;
    hole.maps[1] = B.zero_mor(e.objects[1], e.objects[2]);
    HellerVerdict h2 = heller_is_n_angle(B, hole);
    CHECK(!h2.yes);
    CHECK(h2.reason == "not-yoneda-exact");
  }
}

TEST_CASE("randomized suites: coincidence, juggling, recognition") {
  for (i64 p : {2, 3}) {
    FreeLocalBackend B(p);
    std::vector<ObjRef> pool{B.free_obj(1), B.free_obj(2)};

    auto first_note = [](const SuiteOutcome& s) { return s.notes.empty() ? std::string{} : s.notes.front(); };

    SuiteOutcome co = suite_coincidence(B, pool, 0xC01Du + static_cast<std::uint64_t>(p), 6);
    CHECK_MESSAGE(co.ok(), first_note(co));
    CHECK(co.cases == 6);

    SuiteOutcome ju = suite_juggling(B, pool, 0x1u + static_cast<std::uint64_t>(p), 6);
    CHECK_MESSAGE(ju.ok(), first_note(ju));

    SuiteOutcome he = suite_heller(B, pool, 0x2u + static_cast<std::uint64_t>(p), 6);
    CHECK_MESSAGE(he.ok(), first_note(he));
  }
}

TEST_CASE("input validation") {
  FreeLocalBackend B(2);
  ObjRef R1 = B.free_obj(1), R2 = B.free_obj(2);

  // Wrong length.
  DiagramChain shorty = scalar_chain(B, {2, 2, 2});
  CHECK(thrown_code([&] { toda_cc(B, shorty); }) == "shape");

  // Non-composable maps.
  DiagramChain bad;
  bad.maps = {scalar(B, 2), scalar(B, 2), B.zero_mor(R2, R1), scalar(B, 2)};
  CHECK(thrown_code([&] { toda_cc(B, bad); }) == "shape");

  // Intermediate index out of range.
  DiagramChain d = scalar_chain(B, {2, 2, 2, 2});
  CHECK(thrown_code([&] { toda_mid(B, d, 0); }) == "shape");
  CHECK(thrown_code([&] { toda_mid(B, d, 5); }) == "shape");

  // Supplied extension must carry the chain map in the right slot.
  NSeq wrong = B.extend(scalar(B, 1));
  CHECK(thrown_code([&] { toda_cc(B, d, wrong); }) == "shape");
  CHECK(thrown_code([&] { toda_fc(B, d, {wrong}); }) == "shape");

  // Laws demand their hypotheses.
  std::vector<Morphism> not_zero = {scalar(B, 1), scalar(B, 1), scalar(B, 1), scalar(B, 1), scalar(B, 1)};
  CHECK(thrown_code([&] { law_contract_mid(B, Flavor::cc, not_zero, 3); }) == "hypothesis-violated");
  CHECK(thrown_code([&] { juggling_law(B, "no-such-law", Flavor::cc, not_zero); }) == "shape");
}

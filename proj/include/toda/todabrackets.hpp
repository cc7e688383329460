#pragma once

// Bracket engine: the four higher-bracket flavors (iterated cofiber, iterated
// fiber, fiber-cofiber, [i]-intermediate) as exact coset computations over a
// Backend, together with the structural verifiers built on them: coset and
// coincidence laws, juggling identities, Yoneda exactness and the
// exactness-plus-identity criterion for recognizing distinguished sequences.
//
// Every bracket lives in Hom(ΣX₁, X_{n+1}) and is returned as a Coset in the
// coordinates of that hom space (possibly empty — emptiness is a result, not
// an error).  Results carry a witness: one concrete fill-in that replays
// through the defining diagram.

#include <optional>
#include <string>
#include <vector>

#include "toda/angcat.hpp"
#include "toda/rng.hpp"

namespace toda {

// A composable chain f_1, ..., f_n (the bracket input).  Unlike NSeq there is
// no wrap-around constraint: the last target is arbitrary.
struct DiagramChain {
  std::vector<Morphism> maps;

  int length() const { return static_cast<int>(maps.size()); }
  ObjRef source() const { return maps.front().hom.src; }
  ObjRef target() const { return maps.back().hom.tgt; }
  ObjRef object(int i) const {  // 0-based: object(0) = X_1, object(n) = X_{n+1}
    return i == 0 ? maps.front().hom.src : maps[static_cast<size_t>(i) - 1].hom.tgt;
  }
};

// Composability + length n check; throws "shape" on violation.
void check_chain(Backend& B, const DiagramChain& d);

// The n maps of a sequence, viewed as a bracket input chain.
DiagramChain chain_of(Backend& B, const NSeq& s);

// f_{i+1} ∘ f_i == 0 for i = 1..n-1 (n-1 booleans).
std::vector<bool> composable_zero_check(Backend& B, const DiagramChain& d);

// The subgroup G = f_n ∘ Hom(ΣX₁, X_n) + Hom(ΣX₂, X_{n+1}) ∘ Σf₁ of the
// bracket's ambient hom space.
Subgroup indeterminacy(Backend& B, const Morphism& f1, const Morphism& fn);

// Hom(ΣX₁, X_{n+1}).
HomSpace bracket_ambient(Backend& B, const DiagramChain& d);

enum class Flavor { cc, ff, fc, mid };
std::string flavor_name(Flavor fl, int mid_index = 0);

// One concrete fill-in of the defining diagram, grouped by diagram row /
// transition so it can be replayed.  The layout depends on the flavor:
//   cc:     one group — the n+1 ladder columns (1, 1, φ₃, ..., φ_n, ψ).
//   ff:     one group — the n+1 ladder columns (δ, γ₂, ..., γ_{n-1}, 1, 1).
//   fc:     group 0 = {β¹}; groups 1..n-3 = the n components of each middle
//           staircase transition; group n-2 = {β^{n-1}}.
//   mid(i): group 0 = the i downward columns onto the distinguished row;
//           group 1 = the n-i+1 columns from it back onto the chain.
struct TodaWitness {
  std::vector<std::vector<Morphism>> groups;
};

struct TodaResult {
  Flavor flavor = Flavor::cc;
  int mid_index = 0;  // i for mid, else 0
  Coset bracket;      // coordinates in bracket_ambient
  std::vector<NSeq> extensions_used;
  TodaWitness witness;  // empty when the bracket is empty

  bool empty() const { return bracket.is_empty; }
};

// Iterated cofiber bracket: ladder from a distinguished extension of f₁ down
// onto the chain; the bracket is the projection of the joint fill-in set onto
// the last column.  ext (when given) must start with f₁ ("shape" otherwise).
TodaResult toda_cc(Backend& B, const DiagramChain& d, const std::optional<NSeq>& ext = std::nullopt);

// Iterated fiber bracket (dual): ladder from the chain down onto the
// right-rotated extension of f_n; the first-column solution set is pushed
// through the suspension iso.  ext must end with f_n in its last slot.
TodaResult toda_ff(Backend& B, const DiagramChain& d, const std::optional<NSeq>& ext = std::nullopt);

// Fiber-cofiber bracket: staircase of extensions of f₂..f_{n-1} (each given
// sequence must carry f_i as its i-th map) glued by transition morphisms; the
// bracket collects Σ(composite of the first transition components).
TodaResult toda_fc(Backend& B, const DiagramChain& d, const std::vector<NSeq>& exts = {});

// [i]-intermediate bracket, i = 1..n: one distinguished row carrying f_i as
// its i-th map, entered from the chain head and left onto the chain tail.
// i = 1 reproduces toda_cc and i = n reproduces toda_ff exactly.
TodaResult toda_mid(Backend& B, const DiagramChain& d, int i, const std::optional<NSeq>& ext = std::nullopt);

// Dispatch helper used by suites and the CLI.
TodaResult toda_bracket(Backend& B, Flavor fl, const DiagramChain& d, int mid_index = 1);

// Re-checks every defining square of the result's witness by direct
// composition (no solvers).  True iff all squares commute and the witness
// composite reproduces the bracket representative.
bool replay_witness(Backend& B, const DiagramChain& d, const TodaResult& r);

// Inclusion of the fiber-cofiber value into both one-row flavors: completes
// the first and last staircase transitions to full sequence morphisms and
// checks that the stacked column composites commute as a cofiber fill-in and
// as a fiber fill-in.  fc must be nonempty.
bool replay_fc_inclusion(Backend& B, const DiagramChain& d, const TodaResult& fc,
                         const std::optional<NSeq>& ext1 = std::nullopt,
                         const std::optional<NSeq>& extn = std::nullopt);

// ---- recognizing distinguished sequences ----

// For every generator A and every grade k in the padded union of the
// generator's hom windows, the induced long sequence of groups
//   Hom(Σ^k A, Σ⁻¹X_n) → Hom(Σ^k A, X₁) → ... → Hom(Σ^k A, ΣX₁) → Hom(Σ^k A, ΣX₂)
// must have image = kernel at the n+1 interior spots.
bool yoneda_exact(Backend& B, const NSeq& s);

struct HellerVerdict {
  bool yes = false;
  std::string reason;  // "not-yoneda-exact" | "identity-not-in-bracket" | "" when yes
};

// Exactness together with membership of 1_{ΣX₁} in the cofiber bracket of the
// sequence's own maps (membership as coset membership, never representative
// equality).
HellerVerdict heller_is_n_angle(Backend& B, const NSeq& s);

// ---- structural law verifiers ----
//
// Each verifier evaluates both sides of one law as cosets and reports the
// verdict; hypotheses demanded by the law are checked first and violations
// raise EngineError("hypothesis-violated", ...).

struct LawReport {
  std::string law;
  bool holds = false;
  std::string detail;
};

// Some f_i = 0 and the flavor's bracket nonempty => 0 is a member.
LawReport law_zero_membership(Backend& B, Flavor fl, const DiagramChain& d, int mid_index = 1);

// Negating f_j and f_k (j < k) leaves the bracket unchanged.
LawReport law_minus_pair(Backend& B, Flavor fl, const DiagramChain& d, int j, int k, int mid_index = 1);

// Replacing slot i by f_i + f_i': inclusion into the Minkowski sum at the end
// slots (i = 1, i = n), equality at middle slots.  Hypotheses: all chain
// composites vanish and both mixed composites against f_i' vanish.
LawReport law_subadditivity(Backend& B, const DiagramChain& d, int i, const Morphism& fi_prime);

// <..., -f_i, ...> = -<...> under the same hypotheses as subadditivity.
LawReport law_minus_one(Backend& B, const DiagramChain& d, int i);

// The remaining laws take a chain of n+1 composable maps f_1..f_{n+1}.
// Unconditional inclusions (any flavor):
//   post:  f_{n+1} . <f_n..f_1>  is contained in  <f_{n+1}f_n, f_{n-1}, .., f_1>
//   pre:   <f_{n+1}..f_2> . Σf_1 is contained in  <f_{n+1}, .., f_3, f_2f_1>
LawReport law_post_compose(Backend& B, Flavor fl, const std::vector<Morphism>& chain);
LawReport law_pre_compose(Backend& B, Flavor fl, const std::vector<Morphism>& chain);

// Contractions of one adjacent pair.  For flavor cc/ff these demand all n
// composites of the long chain to vanish; flavor fc is unconditional.
//   first: <f_{n+1}, .., f_3, f_2f_1>        contained in <f_{n+1}, .., f_3f_2, f_1>
//   last:  <f_{n+1}f_n, f_{n-1}, .., f_1>    contained in <f_{n+1}, f_nf_{n-1}, .., f_1>
//   mid:   equality of the two contractions around slot i, 3 <= i <= n-1.
LawReport law_contract_first(Backend& B, Flavor fl, const std::vector<Morphism>& chain);
LawReport law_contract_last(Backend& B, Flavor fl, const std::vector<Morphism>& chain);
LawReport law_contract_mid(Backend& B, Flavor fl, const std::vector<Morphism>& chain, int i);

// f_{n+1} . <f_n..f_1> = <f_{n+1}..f_2> . (-1)^n Σf_1.  For cc/ff demands the
// long chain's composites vanish; for fc demands both sides nonempty.
LawReport law_shift(Backend& B, Flavor fl, const std::vector<Morphism>& chain);

// Unconditional one-sided closure of the fiber-cofiber value under the
// indeterminacy: ψ + f_n∘h + k∘Σf₁ stays in the bracket.
LawReport law_fc_union(Backend& B, const DiagramChain& d, const Morphism& h, const Morphism& k);

// fc nonempty <=> all consecutive composites vanish.
LawReport law_fc_nonempty_iff(Backend& B, const DiagramChain& d);

// fc contained in cc ∩ ff, witnessed by replay_fc_inclusion.
LawReport law_fc_inclusion(Backend& B, const DiagramChain& d);

// Selector-driven entry point (mirrors the CLI's law names).
LawReport juggling_law(Backend& B, const std::string& which, Flavor fl, const std::vector<Morphism>& chain,
                       int slot = 0);

// ---- randomized structural suites ----

struct SuiteOutcome {
  std::string name;
  int cases = 0;     // random scenarios processed
  int failures = 0;  // individual checks that failed across all scenarios
  std::vector<std::string> notes;  // one line per failure (bounded)

  bool ok() const { return failures == 0; }
};

// Random morphism with coordinates drawn uniformly.
Morphism random_morphism(Backend& B, ObjRef X, ObjRef Y, Rng& rng);

// Random length-len chain through objects of the pool with every consecutive
// composite zero (each next map drawn from the kernel of precomposition).
DiagramChain random_zero_composite_chain(Backend& B, const std::vector<ObjRef>& pool, Rng& rng, int len);

// All four flavors agree as cosets with subgroup = indeterminacy on random
// zero-composite chains.
SuiteOutcome suite_coincidence(Backend& B, const std::vector<ObjRef>& pool, std::uint64_t seed, int cases);

// The law verifiers above on random chains (hypotheses arranged by
// construction).
SuiteOutcome suite_juggling(Backend& B, const std::vector<ObjRef>& pool, std::uint64_t seed, int cases);

// Backend extensions pass the exactness-plus-identity criterion; sequences
// with one map sign-flipped are flagged unless the flip is inessential.
SuiteOutcome suite_heller(Backend& B, const std::vector<ObjRef>& pool, std::uint64_t seed, int cases);

}  // namespace toda

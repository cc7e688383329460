#pragma once

// Independent ground truth for the bracket engine: enumerate every fill-in of
// the defining diagrams by brute force and read off the value set.  The only
// backend facilities used are composition, suspension, identity and raw
// coordinate addition — no linear solvers, no canonical forms — so agreement
// with the engine's coset answers is a meaningful cross-check.
//
// The staircase and strictly intermediate flavors additionally quantify over
// the distinguished rows themselves, not just the fill-ins of fixed rows.
// Padding a row family with contractible summands shifts the realized values
// by fₙ∘h + k∘Σf₁, and at sequence length 4 those padded families already
// exhaust the definition (a nonempty bracket forces all consecutive
// composites to vanish, which collapses every flavor onto one coset of the
// translation subgroup).  fc_elements and the interior mid_elements therefore
// close the fixed-row enumeration under those translations.
//
// All functions throw EngineError("too-large", ...) once the number of
// candidate checks exceeds the cap.

#include "toda/todabrackets.hpp"

namespace toda::oracle {

inline constexpr i64 kDefaultCap = 10000000;

// Sorted, deduplicated coordinate vectors (in bracket_ambient coordinates) of
// every bracket element realizable by some fill-in of the given diagram.
std::vector<Vec> cc_elements(Backend& B, const DiagramChain& d, const NSeq& ext, i64 cap = kDefaultCap);
std::vector<Vec> ff_elements(Backend& B, const DiagramChain& d, const NSeq& ext, i64 cap = kDefaultCap);
std::vector<Vec> fc_elements(Backend& B, const DiagramChain& d, const std::vector<NSeq>& rows,
                             i64 cap = kDefaultCap);
std::vector<Vec> mid_elements(Backend& B, const DiagramChain& d, int i, const NSeq& row, i64 cap = kDefaultCap);

// Enumerates the flavor matching r.flavor with the extensions r used.
std::vector<Vec> elements_for(Backend& B, const DiagramChain& d, const TodaResult& r, i64 cap = kDefaultCap);

// Set equality between an enumerated value list and a coset.
bool matches_coset(const std::vector<Vec>& elements, const Coset& c, i64 cap = kDefaultCap);

}  // namespace toda::oracle

#pragma once

// Concrete backend built from a bound quiver algebra over a prime field.
//
// Objects are bounded complexes of indecomposable projectives, morphisms are
// chain maps modulo homotopy, and the pre-4-angulation comes from a fixed
// family of rigid modules (a cluster-tilting family): suspension is the
// double shift and extensions are built from cones and left approximations.
//
// Conventions, pinned once and used everywhere below:
//  * Vertices are numbered 1..vertices.  A representation assigns to each
//    vertex a column-vector space and to each arrow a: u -> v a matrix
//    mapping the space at u into the space at v.
//  * Relation paths are written in function order: {"c","b","a"} denotes the
//    composite "a first, then b, then c".  Stored basis paths use application
//    order instead (arrows[0] acts first).
//  * Hom(P_v, P_w) is spanned by the reduced paths from w to v; composing
//    labelled morphisms therefore concatenates labels in the reverse order.
//    That reversal is encapsulated in lcompose and never leaks elsewhere.
//  * Complexes are homologically graded: the differential lowers degree.
//    Shifting by s moves degree d content to degree d + s and multiplies the
//    differential by (-1)^s; chain maps shift without signs.
//  * The cone of f: X -> Y puts the shifted source block first
//    (C_d = X_{d-1} (+) Y_d, differential [[-d_X, 0], [f, d_Y]]).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toda/angcat.hpp"
#include "toda/exactlin.hpp"
#include "toda/todabrackets.hpp"

namespace toda {

// ---------------------------------------------------------------------------
// Bound quiver algebras
// ---------------------------------------------------------------------------

struct QuiverArrow {
  std::string name;
  int src = 1;
  int tgt = 1;
};

struct Quiver {
  int vertices = 0;
  std::vector<QuiverArrow> arrows;

  // Index of the named arrow, or -1.
  int arrow_index(const std::string& name) const;
};

// One summand of a relation: coeff * (path in function order).
struct RelTerm {
  i64 coeff = 1;
  std::vector<std::string> path;
};
using Relation = std::vector<RelTerm>;

// A reduced basis path, stored in application order (arrows[0] acts first).
// Length-0 paths are the vertex idempotents (arrows empty, src == tgt).
struct BasisPath {
  int src = 1;
  int tgt = 1;
  std::vector<int> arrows;
};

// Finite-dimensional quotient of a path algebra by an admissible ideal.
//
// Elements are coordinate vectors over the reduced path basis.  The basis is
// deterministic: paths are ordered by length, then lexicographically by their
// application-order arrow names; each relation rewrites its largest path into
// smaller ones, and the surviving (non-pivot) paths of length < path_bound
// form the basis.  Products whose concatenation exceeds the bound are reduced
// recursively; this is sound because construction verifies that every path of
// length path_bound rewrites to strictly shorter terms (otherwise the quotient
// is not visibly finite-dimensional and build throws).
class QuiverAlgebra {
 public:
  // Throws EngineError:
  //   "relation-not-parallel"   a relation mixes paths with different ends,
  //                             uses an unknown arrow, a non-composable word,
  //                             or a path of length < 2;
  //   "not-finite-dimensional"  some path of length path_bound does not reduce
  //                             to strictly shorter terms.
  static QuiverAlgebra build(const Quiver& q, const std::vector<Relation>& rels,
                             i64 p, int path_bound);

  const Quiver& quiver() const { return quiver_; }
  const Ring& ring() const { return ring_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int path_bound() const { return bound_; }

  const std::vector<BasisPath>& basis() const { return basis_; }
  const BasisPath& path(int i) const { return basis_[static_cast<size_t>(i)]; }
  // Indices of basis paths running from vertex `from` to vertex `to`.
  const std::vector<int>& paths_between(int from, int to) const;
  // Human-readable path label in function order ("c.b.a", "e3" for idempotents).
  std::string path_name(int i) const;

  const std::vector<Relation>& relations() const { return rels_; }

  Vec zero_elem() const { return Vec(basis_.size(), 0); }
  Vec vertex_elem(int v) const;
  Vec arrow_elem(const std::string& name) const;
  // Reduce a path given in function order; throws EngineError("shape", ...)
  // on unknown arrows or non-composable words.
  Vec path_elem(const std::vector<std::string>& function_order) const;
  // Reduce a path given as arrow indices in application order.
  Vec reduce_path(const std::vector<int>& arrows_applied_first_to_last) const;

  // Algebra product a * b = "a after b" (b acts first).  Non-composable basis
  // products are zero.
  Vec mul(const Vec& a, const Vec& b) const;
  std::string show_elem(const Vec& a) const;

 private:
  Quiver quiver_;
  Ring ring_{0};
  int bound_ = 0;
  std::vector<Relation> rels_;
  std::vector<BasisPath> basis_;
  // blocks_[(from-1)*V + (to-1)] = basis indices of paths from -> to.
  std::vector<std::vector<int>> blocks_;
  // table_[i*dim+j] = coordinates of basis_i * basis_j.
  std::vector<Vec> table_;
};

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

// Right-sized matrices over the base field: dims[v-1] is the dimension at
// vertex v, arrows[a] maps the space at src(a) into the space at tgt(a).
struct Rep {
  std::vector<int> dims;
  std::vector<Mat> arrows;
};

Rep rep_zero(const QuiverAlgebra& A);
Rep rep_simple(const QuiverAlgebra& A, int v);
Rep rep_projective(const QuiverAlgebra& A, int v);
Rep rep_injective(const QuiverAlgebra& A, int v);
int rep_total_dim(const Rep& m);
// Shape and relation check; throws EngineError("shape", ...) on mismatch.
void validate_rep(const QuiverAlgebra& A, const Rep& m);
// Matrix by which an algebra element acts: space at `from` -> space at `to`,
// summing the actions of all basis paths from `from` to `to` weighted by a.
Mat rep_action(const QuiverAlgebra& A, const Rep& m, const Vec& a, int from, int to);

// Vertexwise morphism of representations.
struct RepMor {
  std::vector<Mat> comps;  // comps[v-1]: space of src at v -> space of tgt at v
};
void validate_rep_mor(const QuiverAlgebra& A, const Rep& src, const Rep& tgt,
                      const RepMor& f);

// ---------------------------------------------------------------------------
// Matrices over the algebra and complexes of projectives
// ---------------------------------------------------------------------------

// Matrix with algebra coefficients describing a map
// (+)_c P_{cols[c]} -> (+)_r P_{rows[r]}; the entry at (r, c) is supported on
// paths from rows[r] to cols[c].
struct LMat {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<Vec> e;  // rows.size()*cols.size() entries, row-major

  Vec& at(int r, int c);
  const Vec& at(int r, int c) const;
};

LMat lmat_zero(const QuiverAlgebra& A, std::vector<int> rows, std::vector<int> cols);
LMat lmat_identity(const QuiverAlgebra& A, std::vector<int> verts);
bool lmat_is_zero(const LMat& m);
LMat ladd(const QuiverAlgebra& A, const LMat& a, const LMat& b);
LMat lneg(const QuiverAlgebra& A, const LMat& a);
LMat lscale(const QuiverAlgebra& A, i64 c, const LMat& a);
// Composite "g after f".  Path labels multiply in the reverse order; this is
// the only place that reversal appears.
LMat lcompose(const QuiverAlgebra& A, const LMat& g, const LMat& f);
// Entry support check: every entry lies in the span of paths rows[r] -> cols[c].
void validate_lmat(const QuiverAlgebra& A, const LMat& m);

// Bounded complex of projectives.  terms[k] lists the summand vertices in
// degree lo + k; diffs[k] maps the term in degree lo + k + 1 to the one in
// degree lo + k.
struct PComplex {
  int lo = 0;
  std::vector<std::vector<int>> terms;
  std::vector<LMat> diffs;

  int length() const { return static_cast<int>(terms.size()); }
  int hi() const { return lo + length() - 1; }
  bool is_zero() const;
  const std::vector<int>& term(int degree) const;  // empty outside support
};

// Shape, support and d^2 = 0 checks; throws EngineError("shape", ...).
void validate_pcomplex(const QuiverAlgebra& A, const PComplex& x);
// Drop empty boundary degrees; an everywhere-zero complex becomes lo = 0 with
// no terms.  Interior zero degrees are kept.
PComplex trim_pcomplex(const PComplex& x);
PComplex shift_pcomplex(const QuiverAlgebra& A, const PComplex& x, int s);
PComplex sum_pcomplex(const QuiverAlgebra& A, const PComplex& x, const PComplex& y);

// Degreewise map of complexes (no implicit shift: shift the target first).
// comps[k] maps X_{lo+k} -> Z_{lo+k}; degrees outside the list are zero.
struct PChainMap {
  int lo = 0;
  std::vector<LMat> comps;

  LMat comp(const QuiverAlgebra& A, const PComplex& x, const PComplex& z,
            int degree) const;  // zero-filled outside the stored range
};

PChainMap chain_zero(const QuiverAlgebra& A, const PComplex& x, const PComplex& z);
PChainMap chain_identity(const QuiverAlgebra& A, const PComplex& x);
PChainMap chain_add(const QuiverAlgebra& A, const PComplex& x, const PComplex& z,
                    const PChainMap& f, const PChainMap& g);
PChainMap chain_scale(const QuiverAlgebra& A, i64 c, const PChainMap& f);
PChainMap shift_chain_map(const PChainMap& f, int s);
bool is_chain_map(const QuiverAlgebra& A, const PComplex& x, const PComplex& z,
                  const PChainMap& f);
PChainMap compose_chain(const QuiverAlgebra& A, const PComplex& x,
                        const PComplex& y, const PComplex& z,
                        const PChainMap& g, const PChainMap& f);

struct ConeData {
  PComplex cx;
  PChainMap from_target;     // Y -> cone
  PChainMap to_shifted_src;  // cone -> X[1]
};
// Mapping cone of f: X -> Y.  Terms are X[1] (+) Y with the shifted block
// first; the differential blocks are (-d_X | 0 / -f | d_Y) and both triangle
// maps are unsigned inclusions/projections.  The sign sits on the morphism
// block (not on the projection) so that iterated staircase extensions end in
// the positively pinned connecting classes of the shipped module fixtures.
// Throws EngineError("not-chain-map", ...) if f fails to commute with the
// differentials.
ConeData cone(const QuiverAlgebra& A, const PComplex& x, const PComplex& y,
              const PChainMap& f);

// ---------------------------------------------------------------------------
// Resolutions
// ---------------------------------------------------------------------------

struct Resolution {
  Rep module;
  PComplex cx;  // concentrated in degrees 0..pd
  RepMor aug;   // cover of the module by the degree-0 term
};

// Minimal projective resolution via iterated covers of the top.  Throws
// EngineError("resolution-too-long", ...) past the cap.
Resolution projective_resolution(const QuiverAlgebra& A, const Rep& m, int cap = 32);
// Projective dimension (resolution length).
int projective_dimension(const Resolution& r);
// Lift a module map src.module -> tgt.module to a chain map of resolutions by
// deterministic comparison solves.
PChainMap lift_module_map(const QuiverAlgebra& A, const Resolution& src,
                          const Resolution& tgt, const RepMor& f);

// ---------------------------------------------------------------------------
// Homotopy classes of chain maps
// ---------------------------------------------------------------------------

// Hom in the homotopy category between two fixed complexes, with a pinned
// basis of representatives: cycles are the kernel of the chain-map condition,
// boundaries the image of the homotopy map, and the class basis extends the
// boundary echelon by kernel echelon vectors in order.
class ChainHom {
 public:
  static ChainHom compute(const QuiverAlgebra& A, PComplex x, PComplex z);

  int rank() const { return static_cast<int>(class_reps_.size()); }
  const PComplex& src() const { return x_; }
  const PComplex& tgt() const { return z_; }
  const PChainMap& class_rep(int i) const;

  // Class coordinates of a degreewise chain map; throws "not-chain-map" if it
  // does not commute with the differentials.
  Vec coords(const QuiverAlgebra& A, const PChainMap& f) const;
  // Pinned representative of the class with the given coordinates.
  PChainMap rep(const QuiverAlgebra& A, const Vec& coords) const;
  bool is_cycle(const QuiverAlgebra& A, const PChainMap& f) const;

  // Raw degreewise coordinate encoding (used by solvers and tests).
  int coord_dim() const { return coord_dim_; }
  Vec encode(const QuiverAlgebra& A, const PChainMap& f) const;
  PChainMap decode(const QuiverAlgebra& A, const Vec& coords) const;

 private:
  struct Slot {
    int degree = 0;
    int r = 0, c = 0;     // summand indices in z/x terms at `degree`
    int path = 0;         // basis path index of the entry coefficient
  };

  PComplex x_, z_;
  Ring ring_{0};
  int coord_dim_ = 0;
  std::vector<Slot> slots_;
  std::vector<int> degrees_;          // shared degrees with slots
  std::vector<PChainMap> class_reps_;
  std::vector<Vec> class_vecs_;       // encodings of class_reps_
  Mat reduce_;                        // [class basis | boundary basis] columns
  int boundary_dim_ = 0;
  Mat cycle_conditions_;              // chain-map condition matrix
};

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

struct CTSummand {
  std::string name;
  Rep module;
};

// Pre-4-angulated category generated by a rigid family of modules inside the
// homotopy category of projective complexes.  Objects carry a grade counting
// double-shift suspensions; Hom is computed after folding the grade
// difference into the target, so the suspension matrix is the identity and
// coordinates are stable across suspension.
class QuiverBackend final : public Backend {
 public:
  // Resolves each summand and verifies rigidity (vanishing of the
  // intermediate self-extension groups; at sequence length 4 this is the
  // first self-extension group).  Throws "not-cluster-tilting" on failure.
  QuiverBackend(QuiverAlgebra algebra, std::vector<CTSummand> summands);

  const QuiverAlgebra& algebra() const { return alg_; }
  int summand_count() const { return static_cast<int>(summands_.size()); }
  const CTSummand& summand(int i) const;
  ObjRef summand_obj(int i) const;
  // Named object lookup (summands plus any add_module_object registrations).
  std::optional<ObjRef> named_obj(const std::string& name) const;

  // Register an extra module-backed object (resolved, grade 0).  The object
  // is not treated as a member of the tilting family.
  ObjRef add_module_object(const std::string& name, const Rep& m);

  // Content-addressed registration; complexes are normalized by trimming and
  // by even shifts, so equal objects get equal handles.
  ObjRef register_complex(const PComplex& cx);
  // The complex an object denotes, grade folded in.
  PComplex materialize(ObjRef x) const;
  // Cached homotopy-hom between the materialized complexes.
  const ChainHom& chain_hom(ObjRef src, ObjRef tgt);

  // Pinned representative chain map of a morphism class.
  PChainMap rep_of(const Morphism& f);
  // Class of a degreewise chain map; throws "not-chain-map".
  Morphism class_of(ObjRef src, ObjRef tgt, const PChainMap& f);
  // Class of a module map between module-backed objects (resolution lift).
  Morphism from_module_map(ObjRef src, ObjRef tgt, const RepMor& f);
  const Resolution* resolution_of(ObjRef x) const;  // module-backed objects

  struct ConeTriangle {
    ObjRef obj;
    Morphism from_target;     // tgt(f) -> cone
    Morphism to_shifted_src;  // cone -> src(f) shifted once
  };
  ConeTriangle cone_of(const Morphism& f);

  // Left approximation of an arbitrary object by a sum of shifted summands;
  // the returned morphism has the approximating sum as target, and every
  // class into a shifted summand factors through it (verified on a basis).
  Morphism left_approximation(ObjRef c);

  // Backend interface --------------------------------------------------------
  int seq_length() const override { return 4; }
  Ring ring() const override { return alg_.ring(); }
  std::string name() const override;
  HomSpace hom(ObjRef src, ObjRef tgt) override;
  Morphism compose(const Morphism& g, const Morphism& f) override;
  Morphism identity(ObjRef x) override;
  ObjRef suspend_obj(ObjRef x, int k = 1) override;
  Mat suspend_matrix(ObjRef x, ObjRef y) override;
  // Cone / left-approximation staircase; the result is certified and
  // EngineError("certification-failed", ...) is thrown otherwise.  Requires
  // both ends to lie in the closure of the summand family under sums and
  // suspensions.
  NSeq extend(const Morphism& f) override;
  std::vector<ObjRef> generators() override;
  std::pair<int, int> hom_window(ObjRef a, ObjRef x) override;
  ObjRef zero_obj() override;
  ObjRef sum_obj(const std::vector<ObjRef>& parts) override;
  Morphism inclusion(const std::vector<ObjRef>& parts, size_t i) override;
  Morphism projection(const std::vector<ObjRef>& parts, size_t i) override;
  bool object_eq(ObjRef a, ObjRef b) override;
  std::string describe_object(ObjRef x) override;
  std::string describe_basis_element(const HomSpace& h, int i) override;

 private:
  struct Entry {
    PComplex cx;                  // normalized: trimmed, lo in {0, 1}
    std::optional<std::vector<std::pair<int, int>>> u_decomp;  // (summand, grade)
    std::optional<std::string> name;
    std::optional<int> resolution;  // index into resolutions_
  };

  ObjRef register_entry(const PComplex& cx,
                        std::optional<std::vector<std::pair<int, int>>> decomp,
                        std::optional<std::string> name,
                        std::optional<Resolution> res);
  const Entry& entry(ObjRef x) const;
  std::optional<std::vector<std::pair<int, int>>> decomp_of(ObjRef x) const;

  QuiverAlgebra alg_;
  std::vector<CTSummand> summands_;
  std::vector<ObjRef> summand_objs_;
  std::vector<Entry> entries_;
  std::vector<Resolution> resolutions_;
  std::map<std::string, int> index_;  // serialized complex -> entry id
  std::map<std::string, ObjRef> names_;
  std::map<std::tuple<int, int, int>, ChainHom> hom_cache_;  // (src, tgt, dg)
};

// Independent certification that the family is cluster-tilting inside a given
// list of indecomposables: membership in the additive closure of the family
// is equivalent to the vanishing of first extensions against it, both ways.
struct CTCertificate {
  bool ok = true;
  std::string detail;
};
CTCertificate certify_cluster_tilting(const QuiverAlgebra& A,
                                      const std::vector<CTSummand>& family,
                                      const std::vector<CTSummand>& indecomposables);

// Dimension of Ext^i(m, n) computed from resolutions (homotopy classes into
// the shifted resolution).
int ext_dim(const QuiverAlgebra& A, const Rep& m, const Rep& n, int i);

// ---------------------------------------------------------------------------
// Filtered-object bracket (length 4)
// ---------------------------------------------------------------------------

// Bracket of a length-4 chain computed through a three-step filtered object:
// cones over the two middle maps, structure maps solved degreewise, and the
// answer assembled as { mu o (double-shifted nu) } with the usual
// indeterminacy.  Throws:
//   "composite-nonzero"     some adjacent composite is not null-homotopic;
//   "factorization-missing" the middle factorization has no solution.
// Returns the empty coset when no filler pair (nu, mu) exists.
Coset ss_bracket_4(QuiverBackend& B, const DiagramChain& d);

// Compares the iterated-cofiber bracket with the filtered-object bracket;
// at sequence length 4 they agree up to the sign -1.
LawReport ss_compare(QuiverBackend& B, const DiagramChain& d,
                     const std::optional<NSeq>& ext = std::nullopt);

}  // namespace toda

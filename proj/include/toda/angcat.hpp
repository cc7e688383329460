#pragma once

// Backend-independent layer for additive categories with a suspension
// automorphism and a distinguished class of n-Sigma-sequences.
//
// Hom sets are finitely generated modules over Z/N (or F_p) with a pinned
// deterministic basis; a morphism is a coordinate vector.  Every diagram
// condition (square commutes, fill-in exists, ...) is posed as exact linear
// algebra over the coordinates, via pre/post-composition matrices.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toda/exactlin.hpp"

namespace toda {

// Backend-scoped object handle plus a formal power of the suspension.
struct ObjRef {
  int id = -1;
  int grade = 0;
  friend bool operator==(const ObjRef&, const ObjRef&) = default;
  friend bool operator<(const ObjRef& a, const ObjRef& b) {
    return a.id != b.id ? a.id < b.id : a.grade < b.grade;
  }
};

struct HomSpace {
  ObjRef src, tgt;
  int rank = 0;
  Ring ring;
  std::string basis_tag;
};

struct Morphism {
  HomSpace hom;
  Vec coords;
  bool is_zero() const { return vec_is_zero(coords); }
};

// An n-Sigma-sequence X_1 -> X_2 -> ... -> X_n -> Sigma X_1: n+1 objects
// (the last one is the suspension of the first) and n maps.
struct NSeq {
  int n = 0;
  std::vector<ObjRef> objects;  // size n+1
  std::vector<Morphism> maps;   // size n
};

enum class Rotation { left, right };

class Backend {
 public:
  virtual ~Backend() = default;

  virtual int seq_length() const = 0;  // the n of the n-angulation
  virtual Ring ring() const = 0;
  virtual std::string name() const = 0;

  virtual HomSpace hom(ObjRef X, ObjRef Y) = 0;
  virtual Morphism compose(const Morphism& g, const Morphism& f) = 0;  // g after f
  virtual Morphism identity(ObjRef X) = 0;
  virtual ObjRef suspend_obj(ObjRef X, int k = 1) = 0;
  // Coordinate matrix of the suspension iso Hom(X,Y) -> Hom(SX,SY).
  virtual Mat suspend_matrix(ObjRef X, ObjRef Y) = 0;

  // A distinguished n-Sigma-sequence whose first morphism is f.
  virtual NSeq extend(const Morphism& f) = 0;

  // Generators against which Yoneda exactness is tested, with a window of
  // suspension grades k outside which hom(S^k A, X) = 0.
  virtual std::vector<ObjRef> generators() = 0;
  virtual std::pair<int, int> hom_window(ObjRef A, ObjRef X) = 0;

  virtual ObjRef zero_obj() = 0;
  virtual ObjRef sum_obj(const std::vector<ObjRef>& parts) = 0;
  virtual Morphism inclusion(const std::vector<ObjRef>& parts, size_t i) = 0;
  virtual Morphism projection(const std::vector<ObjRef>& parts, size_t i) = 0;

  // Object identity as needed for diagram plumbing (backends with a trivial
  // suspension may ignore the grade).
  virtual bool object_eq(ObjRef a, ObjRef b) = 0;

  virtual std::string describe_object(ObjRef X) = 0;
  virtual std::string describe_basis_element(const HomSpace& h, int i) = 0;

  // ---- derived helpers (implemented on top of the virtual core) ----

  bool hom_compatible(const HomSpace& a, const HomSpace& b);
  Morphism zero_mor(ObjRef X, ObjRef Y);
  Morphism basis_element(const HomSpace& h, int i);
  Morphism add(const Morphism& a, const Morphism& b);
  Morphism sub(const Morphism& a, const Morphism& b);
  Morphism negate(const Morphism& a);
  Morphism scale(i64 c, const Morphism& a);
  Morphism suspend(const Morphism& f, int k = 1);
  bool mor_eq(const Morphism& a, const Morphism& b);

  // Hom(W, src g) -> Hom(W, tgt g), h |-> g h.
  Mat postcompose_matrix(const Morphism& g, ObjRef W);
  // Hom(tgt f, Z) -> Hom(src f, Z), h |-> h f.
  Mat precompose_matrix(const Morphism& f, ObjRef Z);

  // Block-diagonal sum of two parallel-shaped morphisms.
  Morphism direct_sum_mor(const Morphism& f, const Morphism& g);
};

// ---- n-Sigma-sequence calculus ----

// Trivial sequence on X: X -(1)-> X -> 0 -> ... -> 0 -> Sigma X.
NSeq trivial_nseq(Backend& B, ObjRef X);

// Validates shape: map i goes objects[i] -> objects[i+1], and the final
// object is the suspension of the first.  Throws "shape" otherwise.
void check_nseq(Backend& B, const NSeq& s);

// Left rotation drops the first object and appends (-1)^n Sigma(first map);
// right rotation is its inverse and prepends (-1)^n Sigma^{-1}(last map).
NSeq rotate(Backend& B, const NSeq& s, Rotation dir);
NSeq rotate_times(Backend& B, const NSeq& s, Rotation dir, int times);

NSeq direct_sum(Backend& B, const NSeq& a, const NSeq& b);

// comps are the n components of a candidate morphism of sequences; the final
// square is checked against the suspension of the first component.
bool is_morphism_of_nseqs(Backend& B, const NSeq& a, const NSeq& b, const std::vector<Morphism>& comps);

// ---- joint affine systems over unknown morphism components ----

class JointSystem {
 public:
  explicit JointSystem(Ring r) : ring_(r) {}

  int add_block(const HomSpace& h);  // returns block index
  int block_offset(int b) const { return offsets_[b]; }
  int block_rank(int b) const { return ranks_[b]; }
  int total_unknowns() const { return total_; }

  // One linear equation set in some hom space of dimension eq_rank:
  //   sum_t  M_t * x_{block_t}  =  rhs.
  void add_equation(const std::vector<std::pair<int, Mat>>& terms, const Vec& rhs);

  Coset solve() const;

  // Coordinate-selection matrix for one block (for projecting the joint
  // solution coset onto a single unknown).
  Mat selector(int b) const;

 private:
  Ring ring_;
  int total_ = 0;
  std::vector<int> offsets_, ranks_;
  std::vector<Vec> rows_;
  Vec rhs_;
};

// A ladder: two parallel rows of maps (same count k) and k+1 downward
// columns, squares bottom[i] . col_i = col_{i+1} . top[i].  Columns may be
// fixed; the rest are solved jointly.  `wrap_from`, when set, identifies the
// final column with the suspension of column wrap_from (full sequence
// morphisms set wrap_from = 0 and pass k = n with column n removed).
struct LadderSolution {
  Coset joint;                        // affine set over concatenated unknowns
  std::vector<HomSpace> col_homs;     // per column
  std::vector<int> col_block;         // block index per column, -1 if fixed
  std::vector<std::optional<Morphism>> fixed;
  std::vector<Mat> selectors;         // per column: joint coords -> column coords (fixed: zero rows)

  bool solvable() const { return !joint.is_empty; }
  // Full component list for one joint solution vector.
  std::vector<Morphism> components(Backend& B, const Vec& joint_vec) const;
  std::vector<Morphism> particular(Backend& B) const;
  // Projection of the solution set onto one column.
  Coset column_coset(int col) const;
};

LadderSolution solve_ladder(Backend& B, const std::vector<Morphism>& top, const std::vector<Morphism>& bottom,
                            const std::vector<std::optional<Morphism>>& given);

// Morphisms of n-Sigma-sequences a -> b with prescribed components; unknowns
// solved jointly including the wrap square against the suspension of
// component 0.
LadderSolution solve_nseq_morphism(Backend& B, const NSeq& a, const NSeq& b,
                                   const std::map<int, Morphism>& given);

// N3 fill-in: given commuting components at two consecutive indices, the
// affine set of full morphisms of sequences.  Throws "not-commuting-input"
// when the given square fails, and "inconsistent-backend" when both rows are
// certified distinguished yet no completion exists.
LadderSolution complete_morphism(Backend& B, const NSeq& a, const NSeq& b, int at, const Morphism& phi_at,
                                 const Morphism& phi_next, bool rows_certified = false);

}  // namespace toda

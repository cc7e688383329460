#pragma once

// Exact linear algebra over Z/N (N >= 2) and prime fields F_p.
//
// Everything downstream (hom spaces, fill-in solvers, bracket cosets) reduces
// to the operations in this header.  Matrices act on column vectors (y = A x).
// Row spans are canonicalized by the Howell normal form, which decides span
// equality over Z/N and degenerates to the reduced row echelon form when N is
// prime.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace toda {

using i64 = std::int64_t;

// Engine errors carry a short machine-readable code plus a human message.
struct EngineError : std::runtime_error {
  std::string code;
  EngineError(std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

i64 gcd64(i64 a, i64 b);
// g = gcd(a,b) together with x,y such that a*x + b*y = g.
i64 egcd64(i64 a, i64 b, i64& x, i64& y);

// Z/N with canonical representatives 0..N-1.  A prime N may be flagged as a
// field; arithmetic is identical, but solvers may rely on every nonzero
// element being a unit.
struct Ring {
  i64 N = 0;
  bool field = false;

  static Ring modular(i64 n);      // throws "shape" if n < 2
  static Ring prime_field(i64 p);  // throws "shape" if p is not prime

  i64 norm(i64 x) const {
    i64 r = x % N;
    return r < 0 ? r + N : r;
  }
  i64 add(i64 a, i64 b) const { return norm(a + b); }
  i64 sub(i64 a, i64 b) const { return norm(a - b); }
  i64 mul(i64 a, i64 b) const { return norm(norm(a) * norm(b)); }
  i64 neg(i64 a) const { return norm(-a); }
  bool is_unit(i64 a) const { return gcd64(norm(a), N) == 1; }
  i64 inv(i64 a) const;  // inverse of a unit; throws "shape" otherwise
  // Some unit u with u*x = gcd(x,N) mod N (every element of Z/N is a unit
  // times a divisor of N).
  i64 unit_multiplier(i64 x) const;

  friend bool operator==(const Ring& a, const Ring& b) {
    return a.N == b.N && a.field == b.field;
  }
  friend bool operator!=(const Ring& a, const Ring& b) { return !(a == b); }
};

using Vec = std::vector<i64>;

Vec vec_add(const Ring& r, const Vec& a, const Vec& b);
Vec vec_sub(const Ring& r, const Vec& a, const Vec& b);
Vec vec_scale(const Ring& r, i64 c, const Vec& a);
Vec vec_neg(const Ring& r, const Vec& a);
bool vec_is_zero(const Vec& a);

// Dense row-major matrix with canonical entries.
struct Mat {
  Ring ring;
  int rows = 0, cols = 0;
  Vec a;  // rows*cols entries

  Mat() = default;
  Mat(Ring r, int rr, int cc) : ring(r), rows(rr), cols(cc), a(static_cast<size_t>(rr) * cc, 0) {}

  static Mat zero(Ring r, int rr, int cc) { return Mat(r, rr, cc); }
  static Mat identity(Ring r, int n);
  static Mat from_rows(Ring r, const std::vector<Vec>& rws, int cols_hint = -1);
  static Mat col_vector(Ring r, const Vec& v);

  i64& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  i64 at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  Vec row(int r) const;
  Vec col(int c) const;
  void set_row(int r, const Vec& v);

  bool is_zero() const;
  Mat transpose() const;
  Vec apply(const Vec& x) const;  // y = A x
  friend bool operator==(const Mat& a, const Mat& b) {
    return a.ring == b.ring && a.rows == b.rows && a.cols == b.cols && a.a == b.a;
  }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }
};

Mat mat_mul(const Mat& A, const Mat& B);
Mat mat_add(const Mat& A, const Mat& B);
Mat mat_sub(const Mat& A, const Mat& B);
Mat mat_neg(const Mat& A);
Mat mat_scale(i64 c, const Mat& A);
Mat hstack(const Mat& A, const Mat& B);
Mat vstack(const Mat& A, const Mat& B);

// Canonical row-span form over Z/N: pivots divide N, entries above a pivot are
// reduced below it, and every span element whose leading coordinate sits in
// column c is reachable from the rows with pivot column >= c.  Two matrices
// have equal row spans iff their Howell forms are identical.  Zero rows are
// dropped; the result of an empty span has zero rows.
Mat howell_form(const Mat& m);

// Subgroup of the free module (Z/N)^ambient, held as a Howell-form basis.
struct Subgroup {
  Ring ring;
  int ambient = 0;
  Mat basis;  // Howell form, basis.cols == ambient

  static Subgroup zero(Ring r, int ambient);
  static Subgroup from_generators(const Mat& gens);  // rows = generators
  static Subgroup full(Ring r, int ambient);

  int dim() const { return basis.rows; }
  bool contains(const Vec& v) const;
  // Canonical coset representative: v reduced modulo the subgroup.  Constant
  // on cosets, so reduced representatives are comparable entrywise.
  Vec reduce(const Vec& v) const;
  i64 order(i64 cap) const;  // number of elements; throws "too-large" past cap

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.ring == b.ring && a.ambient == b.ambient && a.basis == b.basis;
  }
  friend bool operator!=(const Subgroup& a, const Subgroup& b) { return !(a == b); }
};

Subgroup subgroup_sum(const Subgroup& h1, const Subgroup& h2);
Subgroup intersect(const Subgroup& h1, const Subgroup& h2);
bool subgroup_leq(const Subgroup& h1, const Subgroup& h2);  // h1 subset of h2

// Coset r + H inside (Z/N)^ambient, or the empty set.  The stored
// representative is always Subgroup::reduce-d.
struct Coset {
  bool is_empty = true;
  Vec rep;
  Subgroup sub;

  static Coset empty(Ring r, int ambient);
  static Coset of(const Vec& rep, const Subgroup& sub);

  int ambient() const { return sub.ambient; }
  bool contains(const Vec& v) const;
};

bool coset_eq(const Coset& a, const Coset& b);
bool coset_subset(const Coset& a, const Coset& b);  // a as a set inside b
Coset coset_negate(const Coset& c);
Coset coset_scale(i64 s, const Coset& c);
Coset coset_shift(const Coset& c, const Vec& by);           // (rep+by) + H
Coset coset_minkowski_sum(const Coset& a, const Coset& b);  // {x+y}
// Image of a coset under a linear map: (M rep) + M(H).
Coset coset_apply(const Mat& M, const Coset& c);

// Full solution set of A x = b as a coset of ker A (empty when unsolvable).
// The representative is the canonical one obtained by reducing a particular
// solution modulo the kernel.  Throws "shape" on dimension mismatch.
Coset solve_affine(const Mat& A, const Vec& b);

Subgroup kernel(const Mat& A);  // { x : A x = 0 }
Subgroup image(const Mat& A);   // column span { A x }

// Inverse of a square matrix whose determinant is a unit; throws "shape" if
// not invertible.
Mat inverse(const Mat& A);

// All elements of the subgroup / coset, in a deterministic order.  Throws
// "too-large" if the count exceeds cap.
std::vector<Vec> enumerate_subgroup(const Subgroup& h, i64 cap = 1000000);
std::vector<Vec> enumerate_coset(const Coset& c, i64 cap = 1000000);

std::string show_vec(const Vec& v);
std::string show_mat(const Mat& m);

}  // namespace toda

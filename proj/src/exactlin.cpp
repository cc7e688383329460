#include "toda/exactlin.hpp"

#include <algorithm>
#include <sstream>

namespace toda {

i64 gcd64(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i64 egcd64(i64 a, i64 b, i64& x, i64& y) {
  if (b == 0) {
    x = (a < 0) ? -1 : 1;
    y = 0;
    return a < 0 ? -a : a;
  }
  i64 x1, y1;
  i64 g = egcd64(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

static bool is_prime64(i64 p) {
  if (p < 2) return false;
  for (i64 d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

Ring Ring::modular(i64 n) {
  if (n < 2) throw EngineError("shape", "modulus must be at least 2");
  return Ring{n, false};
}

Ring Ring::prime_field(i64 p) {
  if (!is_prime64(p)) throw EngineError("shape", "field characteristic must be prime");
  return Ring{p, true};
}

i64 Ring::inv(i64 a) const {
  i64 x, y;
  i64 g = egcd64(norm(a), N, x, y);
  if (g != 1) throw EngineError("shape", "inverse of a non-unit");
  return norm(x);
}

i64 Ring::unit_multiplier(i64 x) const {
  x = norm(x);
  if (x == 0) return 1;
  i64 g = gcd64(x, N);
  i64 v = x / g;
  i64 m = N / g;  // v is a unit mod m
  i64 u = 1;
  if (m > 1) {
    i64 s, t;
    egcd64(v % m, m, s, t);
    u = ((s % m) + m) % m;
  }
  // lift u to a unit mod N along the progression u + k*m
  for (i64 k = 0; k < N && gcd64(u, N) != 1; ++k) u += m;
  if (gcd64(u, N) != 1) throw EngineError("shape", "unit multiplier lift failed");
  return norm(u);
}

Vec vec_add(const Ring& r, const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = r.add(a[i], b[i]);
  return out;
}

Vec vec_sub(const Ring& r, const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = r.sub(a[i], b[i]);
  return out;
}

Vec vec_scale(const Ring& r, i64 c, const Vec& a) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = r.mul(c, a[i]);
  return out;
}

Vec vec_neg(const Ring& r, const Vec& a) { return vec_scale(r, r.N - 1, a); }

bool vec_is_zero(const Vec& a) {
  for (i64 x : a)
    if (x != 0) return false;
  return true;
}

Mat Mat::identity(Ring r, int n) {
  Mat m(r, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Mat Mat::from_rows(Ring r, const std::vector<Vec>& rws, int cols_hint) {
  int cc = cols_hint >= 0 ? cols_hint : (rws.empty() ? 0 : static_cast<int>(rws[0].size()));
  Mat m(r, static_cast<int>(rws.size()), cc);
  for (size_t i = 0; i < rws.size(); ++i) {
    if (static_cast<int>(rws[i].size()) != cc) throw EngineError("shape", "ragged rows");
    for (int j = 0; j < cc; ++j) m.at(static_cast<int>(i), j) = r.norm(rws[i][j]);
  }
  return m;
}

Mat Mat::col_vector(Ring r, const Vec& v) {
  Mat m(r, static_cast<int>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) m.at(static_cast<int>(i), 0) = r.norm(v[i]);
  return m;
}

Vec Mat::row(int r) const {
  Vec v(cols);
  for (int c = 0; c < cols; ++c) v[c] = at(r, c);
  return v;
}

Vec Mat::col(int c) const {
  Vec v(rows);
  for (int r = 0; r < rows; ++r) v[r] = at(r, c);
  return v;
}

void Mat::set_row(int r, const Vec& v) {
  for (int c = 0; c < cols; ++c) at(r, c) = ring.norm(v[c]);
}

bool Mat::is_zero() const {
  for (i64 x : a)
    if (x != 0) return false;
  return true;
}

Mat Mat::transpose() const {
  Mat t(ring, cols, rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
  return t;
}

Vec Mat::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols) throw EngineError("shape", "matrix-vector size mismatch");
  Vec y(rows, 0);
  for (int r = 0; r < rows; ++r) {
    i64 s = 0;
    for (int c = 0; c < cols; ++c) s = ring.add(s, ring.mul(at(r, c), x[c]));
    y[r] = s;
  }
  return y;
}

Mat mat_mul(const Mat& A, const Mat& B) {
  if (A.ring != B.ring || A.cols != B.rows) throw EngineError("shape", "matrix product mismatch");
  Mat C(A.ring, A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      i64 aik = A.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < B.cols; ++j)
        C.at(i, j) = A.ring.add(C.at(i, j), A.ring.mul(aik, B.at(k, j)));
    }
  return C;
}

static void check_same_shape(const Mat& A, const Mat& B) {
  if (A.ring != B.ring || A.rows != B.rows || A.cols != B.cols)
    throw EngineError("shape", "matrix shape mismatch");
}

Mat mat_add(const Mat& A, const Mat& B) {
  check_same_shape(A, B);
  Mat C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = A.ring.add(A.a[i], B.a[i]);
  return C;
}

Mat mat_sub(const Mat& A, const Mat& B) {
  check_same_shape(A, B);
  Mat C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = A.ring.sub(A.a[i], B.a[i]);
  return C;
}

Mat mat_neg(const Mat& A) { return mat_scale(A.ring.N - 1, A); }

Mat mat_scale(i64 c, const Mat& A) {
  Mat C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = A.ring.mul(c, A.a[i]);
  return C;
}

Mat hstack(const Mat& A, const Mat& B) {
  if (A.ring != B.ring || A.rows != B.rows) throw EngineError("shape", "hstack mismatch");
  Mat C(A.ring, A.rows, A.cols + B.cols);
  for (int r = 0; r < A.rows; ++r) {
    for (int c = 0; c < A.cols; ++c) C.at(r, c) = A.at(r, c);
    for (int c = 0; c < B.cols; ++c) C.at(r, A.cols + c) = B.at(r, c);
  }
  return C;
}

Mat vstack(const Mat& A, const Mat& B) {
  if (A.ring != B.ring || A.cols != B.cols) throw EngineError("shape", "vstack mismatch");
  Mat C(A.ring, A.rows + B.rows, A.cols);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < A.cols; ++c) C.at(r, c) = A.at(r, c);
  for (int r = 0; r < B.rows; ++r)
    for (int c = 0; c < A.cols; ++c) C.at(A.rows + r, c) = B.at(r, c);
  return C;
}

// ---------------------------------------------------------------------------
// Howell normal form.
//
// Column sweep: all rows with a nonzero entry in the current column are folded
// into a single pivot row by unimodular gcd combinations; the pivot is scaled
// by a unit so that it divides N; and the annihilator multiple (N/pivot)*row,
// whose leading entry moves strictly right, is kept so that the final form
// spans every row whose leading coordinate lies in a later column.  A final
// pass reduces entries above each pivot below the pivot value.

Mat howell_form(const Mat& m) {
  const Ring R = m.ring;
  const int cols = m.cols;
  std::vector<Vec> work;
  for (int i = 0; i < m.rows; ++i) {
    Vec r = m.row(i);
    if (!vec_is_zero(r)) work.push_back(r);
  }
  std::vector<Vec> result;

  for (int c = 0; c < cols; ++c) {
    // deterministic seed: smallest canonical entry in column c, lowest index
    int seed = -1;
    for (int i = 0; i < static_cast<int>(work.size()); ++i) {
      if (work[i][c] == 0) continue;
      if (seed < 0 || work[i][c] < work[seed][c]) seed = i;
    }
    if (seed < 0) continue;
    Vec piv = work[seed];
    work.erase(work.begin() + seed);

    std::vector<Vec> rest;
    for (Vec& row : work) {
      if (row[c] == 0) {
        rest.push_back(std::move(row));
        continue;
      }
      i64 a = piv[c], b = row[c];
      i64 x, y;
      i64 g = egcd64(a, b, x, y);
      // unimodular 2x2: (piv,row) <- (x*piv + y*row, (a/g)*row - (b/g)*piv)
      Vec np = vec_add(R, vec_scale(R, R.norm(x), piv), vec_scale(R, R.norm(y), row));
      Vec nr = vec_sub(R, vec_scale(R, R.norm(a / g), row), vec_scale(R, R.norm(b / g), piv));
      piv = std::move(np);
      if (!vec_is_zero(nr)) rest.push_back(std::move(nr));
    }
    work = std::move(rest);

    // scale the pivot to the canonical divisor of N
    i64 u = R.unit_multiplier(piv[c]);
    piv = vec_scale(R, u, piv);
    i64 g = piv[c];
    if (g != 1) {
      Vec ann = vec_scale(R, R.N / g, piv);
      if (!vec_is_zero(ann)) work.push_back(std::move(ann));
    }
    result.push_back(std::move(piv));
  }

  // reduce entries above each pivot
  for (size_t j = 0; j < result.size(); ++j) {
    int cj = 0;
    while (result[j][cj] == 0) ++cj;
    i64 g = result[j][cj];
    for (size_t i = 0; i < j; ++i) {
      i64 q = result[i][cj] / g;
      if (q) result[i] = vec_sub(R, result[i], vec_scale(R, q, result[j]));
    }
  }

  return Mat::from_rows(R, result, cols);
}

// ---------------------------------------------------------------------------
// Subgroups and cosets

Subgroup Subgroup::zero(Ring r, int ambient) {
  Subgroup s;
  s.ring = r;
  s.ambient = ambient;
  s.basis = Mat(r, 0, ambient);
  return s;
}

Subgroup Subgroup::from_generators(const Mat& gens) {
  Subgroup s;
  s.ring = gens.ring;
  s.ambient = gens.cols;
  s.basis = howell_form(gens);
  return s;
}

Subgroup Subgroup::full(Ring r, int ambient) {
  return from_generators(Mat::identity(r, ambient));
}

Vec Subgroup::reduce(const Vec& v) const {
  if (static_cast<int>(v.size()) != ambient) throw EngineError("shape", "reduce: wrong length");
  Vec w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = ring.norm(v[i]);
  for (int i = 0; i < basis.rows; ++i) {
    int c = 0;
    while (basis.at(i, c) == 0) ++c;
    i64 q = w[c] / basis.at(i, c);
    if (q) w = vec_sub(ring, w, vec_scale(ring, q, basis.row(i)));
  }
  return w;
}

bool Subgroup::contains(const Vec& v) const { return vec_is_zero(reduce(v)); }

i64 Subgroup::order(i64 cap) const {
  i64 total = 1;
  for (int i = 0; i < basis.rows; ++i) {
    int c = 0;
    while (basis.at(i, c) == 0) ++c;
    total *= ring.N / basis.at(i, c);
    if (total > cap) throw EngineError("too-large", "subgroup order exceeds cap");
  }
  return total;
}

Subgroup subgroup_sum(const Subgroup& h1, const Subgroup& h2) {
  if (h1.ring != h2.ring || h1.ambient != h2.ambient)
    throw EngineError("shape", "subgroup sum: ambient mismatch");
  return Subgroup::from_generators(vstack(h1.basis, h2.basis));
}

Subgroup intersect(const Subgroup& h1, const Subgroup& h2) {
  if (h1.ring != h2.ring || h1.ambient != h2.ambient)
    throw EngineError("shape", "subgroup intersection: ambient mismatch");
  // x = B1^T u = B2^T w  <=>  (u,w) in ker [B1^T | -B2^T]
  Mat B1t = h1.basis.transpose();
  Mat B2t = h2.basis.transpose();
  Mat A = hstack(B1t, mat_neg(B2t));
  Subgroup K = kernel(A);
  std::vector<Vec> gens;
  for (int i = 0; i < K.basis.rows; ++i) {
    Vec uw = K.basis.row(i);
    Vec u(uw.begin(), uw.begin() + h1.basis.rows);
    gens.push_back(B1t.apply(u));
  }
  return Subgroup::from_generators(Mat::from_rows(h1.ring, gens, h1.ambient));
}

bool subgroup_leq(const Subgroup& h1, const Subgroup& h2) {
  for (int i = 0; i < h1.basis.rows; ++i)
    if (!h2.contains(h1.basis.row(i))) return false;
  return true;
}

Coset Coset::empty(Ring r, int ambient) {
  Coset c;
  c.is_empty = true;
  c.sub = Subgroup::zero(r, ambient);
  return c;
}

Coset Coset::of(const Vec& rep, const Subgroup& sub) {
  if (static_cast<int>(rep.size()) != sub.ambient)
    throw EngineError("shape", "coset representative length mismatch");
  Coset c;
  c.is_empty = false;
  c.sub = sub;
  c.rep = sub.reduce(rep);
  return c;
}

bool Coset::contains(const Vec& v) const {
  if (is_empty) return false;
  return sub.reduce(v) == rep;
}

bool coset_eq(const Coset& a, const Coset& b) {
  if (a.is_empty && b.is_empty) return true;
  if (a.is_empty != b.is_empty) return false;
  return a.sub == b.sub && a.rep == b.rep;
}

bool coset_subset(const Coset& a, const Coset& b) {
  if (a.is_empty) return true;
  if (b.is_empty) return false;
  return b.contains(a.rep) && subgroup_leq(a.sub, b.sub);
}

Coset coset_negate(const Coset& c) { return coset_scale(c.sub.ring.N - 1, c); }

Coset coset_scale(i64 s, const Coset& c) {
  if (c.is_empty) return c;
  s = c.sub.ring.norm(s);
  // scaling maps the subgroup into (generally onto) s*H; the result is the
  // image set {s*x}, a coset of s*H only when s is a unit -- callers use unit
  // scalars (signs).
  if (!c.sub.ring.is_unit(s)) throw EngineError("shape", "coset scaling by a non-unit");
  Subgroup h = Subgroup::from_generators(mat_scale(s, c.sub.basis));
  return Coset::of(vec_scale(c.sub.ring, s, c.rep), h);
}

Coset coset_shift(const Coset& c, const Vec& by) {
  if (c.is_empty) return c;
  return Coset::of(vec_add(c.sub.ring, c.rep, by), c.sub);
}

Coset coset_minkowski_sum(const Coset& a, const Coset& b) {
  if (a.is_empty || b.is_empty) return Coset::empty(a.sub.ring, a.sub.ambient);
  return Coset::of(vec_add(a.sub.ring, a.rep, b.rep), subgroup_sum(a.sub, b.sub));
}

Coset coset_apply(const Mat& M, const Coset& c) {
  if (c.is_empty) return Coset::empty(M.ring, M.rows);
  std::vector<Vec> gens;
  for (int i = 0; i < c.sub.basis.rows; ++i) gens.push_back(M.apply(c.sub.basis.row(i)));
  Subgroup h = Subgroup::from_generators(Mat::from_rows(M.ring, gens, M.rows));
  return Coset::of(M.apply(c.rep), h);
}

// ---------------------------------------------------------------------------
// Affine solving via the Howell form of [A^T | I].
//
// The row span of [A^T | I] is {(A x, x)}.  Rows whose head part vanishes
// give the kernel; a particular solution is read off by a leftmost-first
// greedy sweep, valid because the Howell property pins the possible leading
// coefficients at every column.

static Mat solve_tableau(const Mat& A) {
  Mat K = hstack(A.transpose(), Mat::identity(A.ring, A.cols));
  return howell_form(K);
}

static Subgroup kernel_from_tableau(const Mat& H, const Ring& ring, int m, int k) {
  std::vector<Vec> rows;
  for (int i = 0; i < H.rows; ++i) {
    bool head_zero = true;
    for (int c = 0; c < m; ++c)
      if (H.at(i, c) != 0) {
        head_zero = false;
        break;
      }
    if (head_zero) {
      Vec v(k);
      for (int c = 0; c < k; ++c) v[c] = H.at(i, m + c);
      rows.push_back(std::move(v));
    }
  }
  return Subgroup::from_generators(Mat::from_rows(ring, rows, k));
}

Subgroup kernel(const Mat& A) {
  Mat H = solve_tableau(A);
  return kernel_from_tableau(H, A.ring, A.rows, A.cols);
}

Subgroup image(const Mat& A) { return Subgroup::from_generators(A.transpose()); }

Coset solve_affine(const Mat& A, const Vec& b) {
  if (static_cast<int>(b.size()) != A.rows) throw EngineError("shape", "solve: rhs length mismatch");
  const Ring R = A.ring;
  const int m = A.rows, k = A.cols;
  Mat H = solve_tableau(A);
  Subgroup ker = kernel_from_tableau(H, R, m, k);

  // leading column of each tableau row
  std::vector<int> pivot_row(m, -1);
  for (int i = 0; i < H.rows; ++i) {
    int c = 0;
    while (c < H.cols && H.at(i, c) == 0) ++c;
    if (c < m) pivot_row[c] = i;
  }

  Vec r(b.size());
  for (int i = 0; i < m; ++i) r[i] = R.norm(b[i]);
  Vec x(k, 0);
  for (int j = 0; j < m; ++j) {
    if (r[j] == 0) continue;
    int i = pivot_row[j];
    if (i < 0) return Coset::empty(R, k);
    i64 g = H.at(i, j);
    if (r[j] % g != 0) return Coset::empty(R, k);
    i64 q = r[j] / g;
    for (int c = j; c < m; ++c) r[c] = R.sub(r[c], R.mul(q, H.at(i, c)));
    for (int c = 0; c < k; ++c) x[c] = R.add(x[c], R.mul(q, H.at(i, m + c)));
  }
  if (!vec_is_zero(r)) return Coset::empty(R, k);
  return Coset::of(x, ker);
}

Mat inverse(const Mat& A) {
  if (A.rows != A.cols) throw EngineError("shape", "inverse of a non-square matrix");
  const int n = A.rows;
  Mat X(A.ring, n, n);
  for (int c = 0; c < n; ++c) {
    Vec e(n, 0);
    e[c] = 1;
    Coset s = solve_affine(A, e);
    if (s.is_empty) throw EngineError("shape", "matrix is not invertible");
    for (int r = 0; r < n; ++r) X.at(r, c) = s.rep[r];
  }
  if (mat_mul(X, A) != Mat::identity(A.ring, n) || mat_mul(A, X) != Mat::identity(A.ring, n))
    throw EngineError("shape", "matrix is not invertible");
  return X;
}

std::vector<Vec> enumerate_subgroup(const Subgroup& h, i64 cap) {
  i64 total = h.order(cap);
  std::vector<i64> radix;
  for (int i = 0; i < h.basis.rows; ++i) {
    int c = 0;
    while (h.basis.at(i, c) == 0) ++c;
    radix.push_back(h.ring.N / h.basis.at(i, c));
  }
  std::vector<Vec> out;
  std::vector<i64> counter(radix.size(), 0);
  while (true) {
    Vec v(h.ambient, 0);
    for (size_t i = 0; i < counter.size(); ++i)
      if (counter[i]) v = vec_add(h.ring, v, vec_scale(h.ring, counter[i], h.basis.row(static_cast<int>(i))));
    out.push_back(std::move(v));
    size_t i = 0;
    for (; i < counter.size(); ++i) {
      if (++counter[i] < radix[i]) break;
      counter[i] = 0;
    }
    if (i == counter.size()) break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (static_cast<i64>(out.size()) != total)
    throw EngineError("shape", "internal: subgroup order does not match its enumeration");
  return out;
}

std::vector<Vec> enumerate_coset(const Coset& c, i64 cap) {
  if (c.is_empty) return {};
  std::vector<Vec> out = enumerate_subgroup(c.sub, cap);
  for (Vec& v : out) v = vec_add(c.sub.ring, v, c.rep);
  std::sort(out.begin(), out.end());
  return out;
}

std::string show_vec(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

std::string show_mat(const Mat& m) {
  std::ostringstream os;
  os << "[";
  for (int r = 0; r < m.rows; ++r) {
    os << (r ? "; " : "");
    for (int c = 0; c < m.cols; ++c) os << (c ? "," : "") << m.at(r, c);
  }
  os << "]";
  return os.str();
}

}  // namespace toda

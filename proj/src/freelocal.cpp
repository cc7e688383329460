#include "toda/freelocal.hpp"

#include <algorithm>

namespace toda {

namespace {

bool small_prime(i64 p) {
  if (p < 2) return false;
  for (i64 d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

FreeLocalBackend::FreeLocalBackend(i64 p) : p_(p), ring_(Ring::modular(p * p)) {
  if (!small_prime(p)) throw EngineError("shape", "the base of the local ring must be prime");
}

ObjRef FreeLocalBackend::free_obj(int rank) const {
  if (rank < 0) throw EngineError("shape", "negative rank");
  return ObjRef{rank, 0};
}

std::string FreeLocalBackend::name() const { return "free_local(p=" + std::to_string(p_) + ")"; }

HomSpace FreeLocalBackend::hom(ObjRef X, ObjRef Y) {
  return HomSpace{X, Y, X.id * Y.id, ring_, "matrix-units"};
}

Mat FreeLocalBackend::matrix_of(const Morphism& m) const {
  const int a = m.hom.src.id, b = m.hom.tgt.id;
  Mat M(ring_, b, a);
  for (int r = 0; r < b; ++r)
    for (int c = 0; c < a; ++c) M.at(r, c) = m.coords[static_cast<size_t>(r * a + c)];
  return M;
}

Morphism FreeLocalBackend::from_matrix(ObjRef src, ObjRef tgt, const Mat& M) {
  if (M.rows != tgt.id || M.cols != src.id) throw EngineError("shape", "matrix does not fit the hom space");
  Vec coords;
  coords.reserve(static_cast<size_t>(M.rows * M.cols));
  for (int r = 0; r < M.rows; ++r)
    for (int c = 0; c < M.cols; ++c) coords.push_back(ring_.norm(M.at(r, c)));
  return Morphism{hom(src, tgt), std::move(coords)};
}

Morphism FreeLocalBackend::compose(const Morphism& g, const Morphism& f) {
  if (!object_eq(g.hom.src, f.hom.tgt)) throw EngineError("shape", "composition of non-adjacent morphisms");
  return from_matrix(f.hom.src, g.hom.tgt, mat_mul(matrix_of(g), matrix_of(f)));
}

Morphism FreeLocalBackend::identity(ObjRef X) { return from_matrix(X, X, Mat::identity(ring_, X.id)); }

ObjRef FreeLocalBackend::suspend_obj(ObjRef X, int k) { return ObjRef{X.id, X.grade + k}; }

Mat FreeLocalBackend::suspend_matrix(ObjRef X, ObjRef Y) { return Mat::identity(ring_, X.id * Y.id); }

std::vector<ObjRef> FreeLocalBackend::generators() { return {free_obj(1)}; }

std::pair<int, int> FreeLocalBackend::hom_window(ObjRef, ObjRef) { return {0, 0}; }

ObjRef FreeLocalBackend::zero_obj() { return free_obj(0); }

ObjRef FreeLocalBackend::sum_obj(const std::vector<ObjRef>& parts) {
  int total = 0;
  for (const ObjRef& q : parts) total += q.id;
  return free_obj(total);
}

Morphism FreeLocalBackend::inclusion(const std::vector<ObjRef>& parts, size_t i) {
  ObjRef S = sum_obj(parts);
  int off = 0;
  for (size_t j = 0; j < i; ++j) off += parts[j].id;
  Mat M = Mat::zero(ring_, S.id, parts[i].id);
  for (int r = 0; r < parts[i].id; ++r) M.at(off + r, r) = 1;
  return from_matrix(parts[i], S, M);
}

Morphism FreeLocalBackend::projection(const std::vector<ObjRef>& parts, size_t i) {
  ObjRef S = sum_obj(parts);
  int off = 0;
  for (size_t j = 0; j < i; ++j) off += parts[j].id;
  Mat M = Mat::zero(ring_, parts[i].id, S.id);
  for (int r = 0; r < parts[i].id; ++r) M.at(r, off + r) = 1;
  return from_matrix(S, parts[i], M);
}

bool FreeLocalBackend::object_eq(ObjRef a, ObjRef b) {
  // The suspension is the identity functor, so the grade is bookkeeping only.
  return a.id == b.id;
}

std::string FreeLocalBackend::describe_object(ObjRef X) { return "R^" + std::to_string(X.id); }

std::string FreeLocalBackend::describe_basis_element(const HomSpace& h, int i) {
  const int a = h.src.id;
  return "unit[" + std::to_string(i / a) + "," + std::to_string(i % a) + "]";
}

FreeLocalBackend::NormalForm FreeLocalBackend::local_normal_form(const Mat& Min) const {
  Mat M = Min;
  const int rows = M.rows, cols = M.cols, m = std::min(rows, cols);
  Mat U = Mat::identity(ring_, rows), V = Mat::identity(ring_, cols);

  auto row_swap = [&](Mat& A, int r1, int r2) {
    for (int c = 0; c < A.cols; ++c) std::swap(A.at(r1, c), A.at(r2, c));
  };
  auto col_swap = [&](Mat& A, int c1, int c2) {
    for (int r = 0; r < A.rows; ++r) std::swap(A.at(r, c1), A.at(r, c2));
  };
  auto row_scale = [&](Mat& A, int r, i64 u) {
    for (int c = 0; c < A.cols; ++c) A.at(r, c) = ring_.mul(A.at(r, c), u);
  };
  auto row_axpy = [&](Mat& A, int dst, i64 coeff, int src) {  // row dst -= coeff * row src
    for (int c = 0; c < A.cols; ++c) A.at(dst, c) = ring_.sub(A.at(dst, c), ring_.mul(coeff, A.at(src, c)));
  };
  auto col_axpy = [&](Mat& A, int dst, i64 coeff, int src) {
    for (int r = 0; r < A.rows; ++r) A.at(r, dst) = ring_.sub(A.at(r, dst), ring_.mul(coeff, A.at(r, src)));
  };

  int s = 0;
  // Unit pivots first: each one clears its full row and column.
  while (s < m) {
    int pr = -1, pc = -1;
    for (int r = s; r < rows && pr < 0; ++r)
      for (int c = s; c < cols; ++c)
        if (ring_.is_unit(M.at(r, c))) {
          pr = r;
          pc = c;
          break;
        }
    if (pr < 0) break;
    if (pr != s) {
      row_swap(M, s, pr);
      row_swap(U, s, pr);
    }
    if (pc != s) {
      col_swap(M, s, pc);
      col_swap(V, s, pc);
    }
    i64 inv = ring_.inv(M.at(s, s));
    row_scale(M, s, inv);
    row_scale(U, s, inv);
    for (int r = 0; r < rows; ++r)
      if (r != s && ring_.norm(M.at(r, s)) != 0) {
        i64 e = ring_.norm(M.at(r, s));
        row_axpy(M, r, e, s);
        row_axpy(U, r, e, s);
      }
    for (int c = 0; c < cols; ++c)
      if (c != s && ring_.norm(M.at(s, c)) != 0) {
        i64 e = ring_.norm(M.at(s, c));
        col_axpy(M, c, e, s);
        col_axpy(V, c, e, s);
      }
    ++s;
  }
  const int units = s;

  // Remaining entries lie in the maximal ideal; pivots are scaled to exactly p.
  while (s < m) {
    int pr = -1, pc = -1;
    for (int r = s; r < rows && pr < 0; ++r)
      for (int c = s; c < cols; ++c)
        if (ring_.norm(M.at(r, c)) != 0) {
          pr = r;
          pc = c;
          break;
        }
    if (pr < 0) break;
    if (pr != s) {
      row_swap(M, s, pr);
      row_swap(U, s, pr);
    }
    if (pc != s) {
      col_swap(M, s, pc);
      col_swap(V, s, pc);
    }
    i64 x = ring_.norm(M.at(s, s));
    if (x % p_ != 0) throw EngineError("shape", "unit entry survived the unit sweep");
    i64 u = x / p_;  // a unit: 0 < u < p
    i64 uinv = ring_.inv(u);
    row_scale(M, s, uinv);
    row_scale(U, s, uinv);
    for (int r = 0; r < rows; ++r)
      if (r != s && ring_.norm(M.at(r, s)) != 0) {
        i64 w = ring_.norm(M.at(r, s)) / p_;
        row_axpy(M, r, w, s);
        row_axpy(U, r, w, s);
      }
    for (int c = 0; c < cols; ++c)
      if (c != s && ring_.norm(M.at(s, c)) != 0) {
        i64 w = ring_.norm(M.at(s, c)) / p_;
        col_axpy(M, c, w, s);
        col_axpy(V, c, w, s);
      }
    ++s;
  }

  NormalForm nf{U, V, M, units, s - units, m - s};
  Mat check = mat_mul(mat_mul(U, Min), V);
  if (check != M) throw EngineError("shape", "normal form bookkeeping failed");
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      i64 want = (r == c && r < units) ? 1 : (r == c && r < s ? ring_.norm(p_) : 0);
      if (ring_.norm(M.at(r, c)) != want) throw EngineError("shape", "normal form is not diagonal");
    }
  return nf;
}

namespace {

NSeq literal_seq(FreeLocalBackend& B, const std::vector<int>& ranks, const std::vector<Mat>& mats) {
  NSeq s;
  s.n = 4;
  for (int r : ranks) s.objects.push_back(B.free_obj(r));
  s.objects.push_back(B.suspend_obj(s.objects.front()));
  for (int i = 0; i < 4; ++i)
    s.maps.push_back(B.from_matrix(s.objects[static_cast<size_t>(i)], s.objects[static_cast<size_t>(i) + 1], mats[static_cast<size_t>(i)]));
  check_nseq(B, s);
  return s;
}

}  // namespace

NSeq FreeLocalBackend::extend(const Morphism& f) {
  const int a = f.hom.src.id, b = f.hom.tgt.id, m = std::min(a, b);
  NormalForm nf = local_normal_form(matrix_of(f));

  const Ring R = ring_;
  auto one = [&](i64 v) {
    Mat M(R, 1, 1);
    M.at(0, 0) = R.norm(v);
    return M;
  };
  auto rect = [&](int rws, int cls) { return Mat::zero(R, rws, cls); };

  std::vector<NSeq> atoms;
  for (int slot = 0; slot < m; ++slot) {
    i64 d = ring_.norm(nf.D.at(slot, slot));
    if (ring_.is_unit(d)) {
      atoms.push_back(trivial_nseq(*this, free_obj(1)));
    } else if (d != 0) {
      atoms.push_back(literal_seq(*this, {1, 1, 1, 1}, {one(p_), one(p_), one(p_), one(p_)}));
    } else {
      atoms.push_back(literal_seq(*this, {1, 1, 1, 1}, {one(0), one(1), one(0), one(1)}));
    }
  }
  for (int slot = m; slot < a; ++slot)
    atoms.push_back(literal_seq(*this, {1, 0, 0, 1}, {rect(0, 1), rect(0, 0), rect(1, 0), one(1)}));
  for (int slot = m; slot < b; ++slot)
    atoms.push_back(literal_seq(*this, {0, 1, 1, 0}, {rect(1, 0), one(1), rect(0, 1), rect(0, 0)}));

  NSeq E;
  if (atoms.empty()) {
    E = literal_seq(*this, {0, 0, 0, 0}, {rect(0, 0), rect(0, 0), rect(0, 0), rect(0, 0)});
  } else {
    E = atoms[0];
    for (size_t i = 1; i < atoms.size(); ++i) E = direct_sum(*this, E, atoms[i]);
  }
  if (matrix_of(E.maps[0]) != nf.D) throw EngineError("shape", "atom assembly does not match the normal form");

  // Conjugate by the invertible change of basis so the first map is f itself.
  NSeq out;
  out.n = 4;
  out.objects = {f.hom.src, f.hom.tgt, E.objects[2], E.objects[3], suspend_obj(f.hom.src)};
  out.maps.resize(4);
  out.maps[0] = f;
  out.maps[1] = from_matrix(f.hom.tgt, E.objects[2], mat_mul(matrix_of(E.maps[1]), nf.U));
  out.maps[2] = E.maps[2];
  out.maps[3] = from_matrix(E.objects[3], suspend_obj(f.hom.src), mat_mul(nf.V, matrix_of(E.maps[3])));
  check_nseq(*this, out);
  return out;
}

}  // namespace toda

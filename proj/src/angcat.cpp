#include "toda/angcat.hpp"

#include <algorithm>

namespace toda {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw EngineError("shape", what);
}

}  // namespace

// ---- Backend derived helpers ----

bool Backend::hom_compatible(const HomSpace& a, const HomSpace& b) {
  return object_eq(a.src, b.src) && object_eq(a.tgt, b.tgt) && a.rank == b.rank && a.ring == b.ring;
}

Morphism Backend::zero_mor(ObjRef X, ObjRef Y) {
  HomSpace h = hom(X, Y);
  return Morphism{h, Vec(static_cast<size_t>(h.rank), 0)};
}

Morphism Backend::basis_element(const HomSpace& h, int i) {
  require(i >= 0 && i < h.rank, "basis index out of range");
  Vec v(static_cast<size_t>(h.rank), 0);
  v[static_cast<size_t>(i)] = 1;
  return Morphism{h, v};
}

Morphism Backend::add(const Morphism& a, const Morphism& b) {
  require(hom_compatible(a.hom, b.hom), "adding morphisms from different hom spaces");
  return Morphism{a.hom, vec_add(a.hom.ring, a.coords, b.coords)};
}

Morphism Backend::sub(const Morphism& a, const Morphism& b) {
  require(hom_compatible(a.hom, b.hom), "subtracting morphisms from different hom spaces");
  return Morphism{a.hom, vec_sub(a.hom.ring, a.coords, b.coords)};
}

Morphism Backend::negate(const Morphism& a) { return Morphism{a.hom, vec_neg(a.hom.ring, a.coords)}; }

Morphism Backend::scale(i64 c, const Morphism& a) { return Morphism{a.hom, vec_scale(a.hom.ring, c, a.coords)}; }

Morphism Backend::suspend(const Morphism& f, int k) {
  Morphism cur = f;
  for (int step = 0; step < (k >= 0 ? k : -k); ++step) {
    if (k >= 0) {
      Mat S = suspend_matrix(cur.hom.src, cur.hom.tgt);
      HomSpace h = hom(suspend_obj(cur.hom.src), suspend_obj(cur.hom.tgt));
      require(S.rows == h.rank && S.cols == cur.hom.rank, "suspension matrix has wrong shape");
      cur = Morphism{h, S.apply(cur.coords)};
    } else {
      ObjRef s = suspend_obj(cur.hom.src, -1), t = suspend_obj(cur.hom.tgt, -1);
      Mat S = suspend_matrix(s, t);
      HomSpace h = hom(s, t);
      require(S.rows == cur.hom.rank && S.cols == h.rank, "suspension matrix has wrong shape");
      cur = Morphism{h, inverse(S).apply(cur.coords)};
    }
  }
  return cur;
}

bool Backend::mor_eq(const Morphism& a, const Morphism& b) {
  if (!hom_compatible(a.hom, b.hom)) return false;
  const Ring R = a.hom.ring;
  for (size_t i = 0; i < a.coords.size(); ++i)
    if (R.norm(a.coords[i]) != R.norm(b.coords[i])) return false;
  return true;
}

Mat Backend::postcompose_matrix(const Morphism& g, ObjRef W) {
  HomSpace hs = hom(W, g.hom.src), ht = hom(W, g.hom.tgt);
  Mat M(ring(), ht.rank, hs.rank);
  for (int j = 0; j < hs.rank; ++j) {
    Morphism c = compose(g, basis_element(hs, j));
    for (int r = 0; r < ht.rank; ++r) M.at(r, j) = c.coords[static_cast<size_t>(r)];
  }
  return M;
}

Mat Backend::precompose_matrix(const Morphism& f, ObjRef Z) {
  HomSpace hs = hom(f.hom.tgt, Z), ht = hom(f.hom.src, Z);
  Mat M(ring(), ht.rank, hs.rank);
  for (int j = 0; j < hs.rank; ++j) {
    Morphism c = compose(basis_element(hs, j), f);
    for (int r = 0; r < ht.rank; ++r) M.at(r, j) = c.coords[static_cast<size_t>(r)];
  }
  return M;
}

Morphism Backend::direct_sum_mor(const Morphism& f, const Morphism& g) {
  std::vector<ObjRef> src_parts{f.hom.src, g.hom.src}, tgt_parts{f.hom.tgt, g.hom.tgt};
  Morphism a = compose(inclusion(tgt_parts, 0), compose(f, projection(src_parts, 0)));
  Morphism b = compose(inclusion(tgt_parts, 1), compose(g, projection(src_parts, 1)));
  return add(a, b);
}

// ---- sequence calculus ----

NSeq trivial_nseq(Backend& B, ObjRef X) {
  const int n = B.seq_length();
  NSeq s;
  s.n = n;
  ObjRef Z = B.zero_obj();
  s.objects.push_back(X);
  s.objects.push_back(X);
  for (int i = 2; i < n; ++i) s.objects.push_back(Z);
  s.objects.push_back(B.suspend_obj(X));
  s.maps.push_back(B.identity(X));
  for (int i = 1; i < n; ++i) s.maps.push_back(B.zero_mor(s.objects[static_cast<size_t>(i)], s.objects[static_cast<size_t>(i) + 1]));
  check_nseq(B, s);
  return s;
}

void check_nseq(Backend& B, const NSeq& s) {
  require(s.n == B.seq_length(), "sequence length does not match the backend");
  require(s.objects.size() == static_cast<size_t>(s.n) + 1, "sequence needs n+1 objects");
  require(s.maps.size() == static_cast<size_t>(s.n), "sequence needs n maps");
  for (int i = 0; i < s.n; ++i) {
    const Morphism& m = s.maps[static_cast<size_t>(i)];
    require(B.object_eq(m.hom.src, s.objects[static_cast<size_t>(i)]), "map source mismatch in sequence");
    require(B.object_eq(m.hom.tgt, s.objects[static_cast<size_t>(i) + 1]), "map target mismatch in sequence");
  }
  require(B.object_eq(s.objects.back(), B.suspend_obj(s.objects.front())),
          "final object must be the suspension of the first");
}

NSeq rotate(Backend& B, const NSeq& s, Rotation dir) {
  check_nseq(B, s);
  const int n = s.n;
  const i64 sign = (n % 2 == 0) ? 1 : -1;
  NSeq r;
  r.n = n;
  if (dir == Rotation::left) {
    for (int i = 1; i <= n; ++i) r.objects.push_back(s.objects[static_cast<size_t>(i)]);
    r.objects.push_back(B.suspend_obj(s.objects[1]));
    for (int i = 1; i < n; ++i) r.maps.push_back(s.maps[static_cast<size_t>(i)]);
    r.maps.push_back(B.scale(sign, B.suspend(s.maps[0])));
  } else {
    r.objects.push_back(B.suspend_obj(s.objects[static_cast<size_t>(n) - 1], -1));
    for (int i = 0; i < n; ++i) r.objects.push_back(s.objects[static_cast<size_t>(i)]);
    r.maps.push_back(B.scale(sign, B.suspend(s.maps[static_cast<size_t>(n) - 1], -1)));
    for (int i = 0; i + 1 < n; ++i) r.maps.push_back(s.maps[static_cast<size_t>(i)]);
  }
  check_nseq(B, r);
  return r;
}

NSeq rotate_times(Backend& B, const NSeq& s, Rotation dir, int times) {
  NSeq r = s;
  for (int i = 0; i < times; ++i) r = rotate(B, r, dir);
  return r;
}

NSeq direct_sum(Backend& B, const NSeq& a, const NSeq& b) {
  check_nseq(B, a);
  check_nseq(B, b);
  require(a.n == b.n, "summing sequences of different lengths");
  NSeq s;
  s.n = a.n;
  for (size_t i = 0; i <= static_cast<size_t>(a.n); ++i)
    s.objects.push_back(B.sum_obj({a.objects[i], b.objects[i]}));
  for (size_t i = 0; i < static_cast<size_t>(a.n); ++i)
    s.maps.push_back(B.direct_sum_mor(a.maps[i], b.maps[i]));
  check_nseq(B, s);
  return s;
}

bool is_morphism_of_nseqs(Backend& B, const NSeq& a, const NSeq& b, const std::vector<Morphism>& comps) {
  require(comps.size() == static_cast<size_t>(a.n), "component count must equal the sequence length");
  for (int i = 0; i < a.n; ++i) {
    Morphism lhs = B.compose(b.maps[static_cast<size_t>(i)], comps[static_cast<size_t>(i)]);
    Morphism rhs = (i + 1 < a.n) ? B.compose(comps[static_cast<size_t>(i) + 1], a.maps[static_cast<size_t>(i)])
                                 : B.compose(B.suspend(comps[0]), a.maps[static_cast<size_t>(i)]);
    if (!B.mor_eq(lhs, rhs)) return false;
  }
  return true;
}

// ---- JointSystem ----

int JointSystem::add_block(const HomSpace& h) {
  require(rows_.empty(), "all unknown blocks must be declared before equations");
  offsets_.push_back(total_);
  ranks_.push_back(h.rank);
  total_ += h.rank;
  return static_cast<int>(offsets_.size()) - 1;
}

void JointSystem::add_equation(const std::vector<std::pair<int, Mat>>& terms, const Vec& rhs) {
  const int eq_rank = static_cast<int>(rhs.size());
  for (const auto& [b, M] : terms) {
    require(b >= 0 && b < static_cast<int>(offsets_.size()), "equation refers to an unknown block");
    require(M.rows == eq_rank && M.cols == ranks_[static_cast<size_t>(b)], "equation term has wrong shape");
  }
  for (int r = 0; r < eq_rank; ++r) {
    Vec row(static_cast<size_t>(total_), 0);
    for (const auto& [b, M] : terms) {
      const int off = offsets_[static_cast<size_t>(b)];
      for (int c = 0; c < M.cols; ++c) {
        size_t idx = static_cast<size_t>(off + c);
        row[idx] = ring_.add(row[idx], M.at(r, c));
      }
    }
    rows_.push_back(std::move(row));
    rhs_.push_back(ring_.norm(rhs[static_cast<size_t>(r)]));
  }
}

Coset JointSystem::solve() const {
  if (rows_.empty()) return Coset::of(Vec(static_cast<size_t>(total_), 0), Subgroup::full(ring_, total_));
  Mat A = Mat::from_rows(ring_, rows_, total_);
  return solve_affine(A, rhs_);
}

Mat JointSystem::selector(int b) const {
  Mat S = Mat::zero(ring_, ranks_[static_cast<size_t>(b)], total_);
  for (int i = 0; i < ranks_[static_cast<size_t>(b)]; ++i) S.at(i, offsets_[static_cast<size_t>(b)] + i) = 1;
  return S;
}

// ---- ladders ----

std::vector<Morphism> LadderSolution::components(Backend& B, const Vec& joint_vec) const {
  std::vector<Morphism> out;
  for (size_t c = 0; c < col_homs.size(); ++c) {
    if (fixed[c]) {
      out.push_back(*fixed[c]);
    } else {
      out.push_back(Morphism{col_homs[c], selectors[c].apply(joint_vec)});
    }
  }
  (void)B;
  return out;
}

std::vector<Morphism> LadderSolution::particular(Backend& B) const {
  if (joint.is_empty) throw EngineError("shape", "no solution to materialize");
  return components(B, joint.rep);
}

Coset LadderSolution::column_coset(int col) const {
  if (joint.is_empty) return Coset::empty(joint.sub.ring, col_homs[static_cast<size_t>(col)].rank);
  return coset_apply(selectors[static_cast<size_t>(col)], joint);
}

namespace {

LadderSolution solve_ladder_impl(Backend& B, const std::vector<Morphism>& top, const std::vector<Morphism>& bottom,
                                 const std::vector<std::optional<Morphism>>& given, bool wrap) {
  const Ring R = B.ring();
  const size_t k = top.size();
  require(bottom.size() == k, "rows of a ladder must have the same number of maps");
  require(k >= 1, "ladder needs at least one square");
  const size_t ncols = wrap ? k : k + 1;
  require(given.size() == ncols, "one (possibly absent) component per column expected");

  for (size_t i = 0; i + 1 < k; ++i) {
    require(B.object_eq(top[i].hom.tgt, top[i + 1].hom.src), "top row does not compose");
    require(B.object_eq(bottom[i].hom.tgt, bottom[i + 1].hom.src), "bottom row does not compose");
  }

  auto top_obj = [&](size_t c) { return c < k ? top[c].hom.src : top[k - 1].hom.tgt; };
  auto bot_obj = [&](size_t c) { return c < k ? bottom[c].hom.src : bottom[k - 1].hom.tgt; };

  LadderSolution out;
  JointSystem sys(R);
  out.col_block.assign(ncols, -1);
  for (size_t c = 0; c < ncols; ++c) {
    HomSpace h = B.hom(top_obj(c), bot_obj(c));
    out.col_homs.push_back(h);
    out.fixed.push_back(given[c]);
    if (given[c]) {
      require(B.hom_compatible(given[c]->hom, h), "fixed component lives in the wrong hom space");
    } else {
      out.col_block[c] = sys.add_block(h);
    }
  }

  for (size_t i = 0; i < k; ++i) {
    const bool wrap_square = wrap && (i + 1 == k);
    const size_t right_col = wrap_square ? 0 : i + 1;
    HomSpace ambient = B.hom(top_obj(i), bot_obj(i + 1));
    Mat Mleft = B.postcompose_matrix(bottom[i], top_obj(i));
    // The wrap square compares against the suspension of column 0.
    Mat Mright = wrap_square
                     ? mat_mul(B.precompose_matrix(top[i], bot_obj(k)), B.suspend_matrix(top_obj(0), bot_obj(0)))
                     : B.precompose_matrix(top[i], bot_obj(i + 1));
    // Equation: Mleft col_i - Mright col_right = 0, fixed columns moved right.
    std::vector<std::pair<int, Mat>> terms;
    Vec rhs(static_cast<size_t>(ambient.rank), 0);
    if (out.fixed[i]) {
      rhs = vec_sub(R, rhs, Mleft.apply(out.fixed[i]->coords));
    } else {
      terms.emplace_back(out.col_block[i], Mleft);
    }
    if (out.fixed[right_col]) {
      rhs = vec_add(R, rhs, Mright.apply(out.fixed[right_col]->coords));
    } else {
      terms.emplace_back(out.col_block[right_col], mat_neg(Mright));
    }
    sys.add_equation(terms, rhs);
  }

  out.joint = sys.solve();
  for (size_t c = 0; c < ncols; ++c) {
    if (out.col_block[c] >= 0) {
      out.selectors.push_back(sys.selector(out.col_block[c]));
    } else {
      out.selectors.push_back(Mat::zero(R, out.col_homs[c].rank, sys.total_unknowns()));
    }
  }
  return out;
}

}  // namespace

LadderSolution solve_ladder(Backend& B, const std::vector<Morphism>& top, const std::vector<Morphism>& bottom,
                            const std::vector<std::optional<Morphism>>& given) {
  return solve_ladder_impl(B, top, bottom, given, /*wrap=*/false);
}

LadderSolution solve_nseq_morphism(Backend& B, const NSeq& a, const NSeq& b, const std::map<int, Morphism>& given) {
  check_nseq(B, a);
  check_nseq(B, b);
  require(a.n == b.n && a.n >= 2, "sequence morphisms need two rows of equal length at least 2");
  std::vector<std::optional<Morphism>> cols(static_cast<size_t>(a.n));
  for (const auto& [idx, m] : given) {
    require(idx >= 0 && idx < a.n, "fixed component index out of range");
    cols[static_cast<size_t>(idx)] = m;
  }
  return solve_ladder_impl(B, a.maps, b.maps, cols, /*wrap=*/true);
}

LadderSolution complete_morphism(Backend& B, const NSeq& a, const NSeq& b, int at, const Morphism& phi_at,
                                 const Morphism& phi_next, bool rows_certified) {
  require(at >= 0 && at + 1 < a.n, "fixed components must sit at two consecutive inner indices");
  Morphism lhs = B.compose(b.maps[static_cast<size_t>(at)], phi_at);
  Morphism rhs = B.compose(phi_next, a.maps[static_cast<size_t>(at)]);
  if (!B.mor_eq(lhs, rhs))
    throw EngineError("not-commuting-input", "the prescribed square does not commute");
  std::map<int, Morphism> given{{at, phi_at}, {at + 1, phi_next}};
  LadderSolution sol = solve_nseq_morphism(B, a, b, given);
  if (rows_certified && !sol.solvable())
    throw EngineError("inconsistent-backend",
                      "no completion exists although both rows are certified distinguished");
  return sol;
}

}  // namespace toda

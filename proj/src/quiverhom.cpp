#include "toda/quiverhom.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace toda {

namespace {

int floordiv2(int a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }
int ceildiv2(int a) { return -floordiv2(-a); }

std::string join_names(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Lookup key for a composable word: source vertex plus arrow indices in
// application order.
std::string word_key(int src, const std::vector<int>& arrows) {
  std::string k = std::to_string(src);
  for (int a : arrows) {
    k += ',';
    k += std::to_string(a);
  }
  return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Quiver
// ---------------------------------------------------------------------------

int Quiver::arrow_index(const std::string& name) const {
  for (size_t i = 0; i < arrows.size(); ++i)
    if (arrows[i].name == name) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// QuiverAlgebra
// ---------------------------------------------------------------------------

QuiverAlgebra QuiverAlgebra::build(const Quiver& q, const std::vector<Relation>& rels,
                                   i64 p, int path_bound) {
  if (q.vertices <= 0) throw EngineError("shape", "quiver needs at least one vertex");
  if (path_bound < 2) throw EngineError("shape", "path bound must be at least 2");
  Ring R = Ring::prime_field(p);
  const int V = q.vertices;
  for (size_t i = 0; i < q.arrows.size(); ++i) {
    const QuiverArrow& a = q.arrows[i];
    if (a.src < 1 || a.src > V || a.tgt < 1 || a.tgt > V)
      throw EngineError("shape", "arrow '" + a.name + "' has endpoints outside the vertex range");
    if (a.name.empty()) throw EngineError("shape", "arrows need nonempty names");
    for (size_t j = i + 1; j < q.arrows.size(); ++j)
      if (q.arrows[j].name == a.name)
        throw EngineError("shape", "duplicate arrow name '" + a.name + "'");
  }

  // Enumerate all composable words of length <= path_bound.
  const int L = path_bound;
  std::vector<BasisPath> all;
  for (int v = 1; v <= V; ++v) all.push_back(BasisPath{v, v, {}});
  size_t layer_begin = 0;
  for (int len = 1; len <= L; ++len) {
    size_t layer_end = all.size();
    for (size_t i = layer_begin; i < layer_end; ++i) {
      for (size_t a = 0; a < q.arrows.size(); ++a) {
        if (q.arrows[a].src != all[i].tgt) continue;
        BasisPath nxt = all[i];
        nxt.arrows.push_back(static_cast<int>(a));
        nxt.tgt = q.arrows[a].tgt;
        all.push_back(std::move(nxt));
      }
    }
    layer_begin = layer_end;
  }
  // Degree-lexicographic order: length, then application-order arrow names,
  // then source vertex (which only matters for the idempotents).
  auto name_seq = [&](const BasisPath& b) {
    std::string s;
    for (int a : b.arrows) {
      s += q.arrows[static_cast<size_t>(a)].name;
      s += '\x01';
    }
    return s;
  };
  std::sort(all.begin(), all.end(), [&](const BasisPath& x, const BasisPath& y) {
    if (x.arrows.size() != y.arrows.size()) return x.arrows.size() < y.arrows.size();
    std::string nx = name_seq(x), ny = name_seq(y);
    if (nx != ny) return nx < ny;
    return x.src < y.src;
  });
  const int P = static_cast<int>(all.size());
  std::unordered_map<std::string, int> word_index;
  for (int i = 0; i < P; ++i) word_index[word_key(all[i].src, all[i].arrows)] = i;

  // Validate relations and convert terms to application-order arrow indices.
  struct Term {
    i64 coeff;
    int src, tgt;
    std::vector<int> arrows;
  };
  std::vector<std::vector<Term>> prepared;
  for (const Relation& rel : rels) {
    std::vector<Term> terms;
    for (const RelTerm& rt : rel) {
      if (R.norm(rt.coeff) == 0) continue;
      if (rt.path.size() < 2)
        throw EngineError("relation-not-parallel", "relation terms must have length at least 2");
      if (static_cast<int>(rt.path.size()) > L)
        throw EngineError("relation-not-parallel", "relation term longer than the path bound");
      Term t;
      t.coeff = R.norm(rt.coeff);
      for (auto it = rt.path.rbegin(); it != rt.path.rend(); ++it) {
        int a = q.arrow_index(*it);
        if (a < 0)
          throw EngineError("relation-not-parallel", "unknown arrow '" + *it + "' in a relation");
        t.arrows.push_back(a);
      }
      t.src = q.arrows[static_cast<size_t>(t.arrows.front())].src;
      t.tgt = q.arrows[static_cast<size_t>(t.arrows.back())].tgt;
      for (size_t i = 0; i + 1 < t.arrows.size(); ++i)
        if (q.arrows[static_cast<size_t>(t.arrows[i])].tgt !=
            q.arrows[static_cast<size_t>(t.arrows[i + 1])].src)
          throw EngineError("relation-not-parallel", "relation term is not a composable word");
      terms.push_back(std::move(t));
    }
    if (terms.empty()) continue;
    for (const Term& t : terms)
      if (t.src != terms[0].src || t.tgt != terms[0].tgt)
        throw EngineError("relation-not-parallel", "relation mixes paths with different endpoints");
    prepared.push_back(std::move(terms));
  }

  // Span of the ideal in the length-<= L window: all products (left word) o
  // (relation) o (right word), coordinates reversed so that the largest path
  // of each row becomes its leading entry.
  std::vector<Vec> rrows;
  for (const auto& terms : prepared) {
    size_t maxlen = 0;
    for (const Term& t : terms) maxlen = std::max(maxlen, t.arrows.size());
    for (const BasisPath& right : all) {
      if (right.tgt != terms[0].src) continue;
      for (const BasisPath& left : all) {
        if (left.src != terms[0].tgt) continue;
        if (right.arrows.size() + maxlen + left.arrows.size() > static_cast<size_t>(L)) continue;
        Vec row(static_cast<size_t>(P), 0);
        for (const Term& t : terms) {
          std::vector<int> word = right.arrows;
          word.insert(word.end(), t.arrows.begin(), t.arrows.end());
          word.insert(word.end(), left.arrows.begin(), left.arrows.end());
          auto it = word_index.find(word_key(right.src, word));
          if (it == word_index.end())
            throw EngineError("internal", "composable word missing from the enumeration");
          size_t idx = static_cast<size_t>(P - 1 - it->second);
          row[idx] = R.add(row[idx], t.coeff);
        }
        if (!vec_is_zero(row)) rrows.push_back(std::move(row));
      }
    }
  }

  std::vector<Vec> rules(static_cast<size_t>(P));  // pivot path -> full row, original coords
  std::vector<bool> is_pivot(static_cast<size_t>(P), false);
  if (!rrows.empty()) {
    Mat H = howell_form(Mat::from_rows(R, rrows, P));
    for (int r = 0; r < H.rows; ++r) {
      int lead = -1;
      for (int c = 0; c < P; ++c)
        if (H.at(r, c) != 0) {
          lead = c;
          break;
        }
      if (lead < 0) continue;
      int path = P - 1 - lead;
      Vec orig(static_cast<size_t>(P), 0);
      for (int c = 0; c < P; ++c) orig[static_cast<size_t>(P - 1 - c)] = H.at(r, c);
      is_pivot[static_cast<size_t>(path)] = true;
      rules[static_cast<size_t>(path)] = std::move(orig);
    }
  }

  // Finite-dimensionality: every word of length exactly L must rewrite to a
  // combination of strictly shorter paths.
  for (int i = 0; i < P; ++i) {
    if (static_cast<int>(all[static_cast<size_t>(i)].arrows.size()) != L) continue;
    if (!is_pivot[static_cast<size_t>(i)]) {
      std::vector<std::string> names;
      for (auto it = all[static_cast<size_t>(i)].arrows.rbegin();
           it != all[static_cast<size_t>(i)].arrows.rend(); ++it)
        names.push_back(q.arrows[static_cast<size_t>(*it)].name);
      throw EngineError("not-finite-dimensional",
                        "path '" + join_names(names, ".") +
                            "' of maximal length does not reduce to shorter terms; "
                            "raise the path bound or add relations");
    }
    const Vec& row = rules[static_cast<size_t>(i)];
    for (int t = 0; t < P; ++t) {
      if (t == i || row[static_cast<size_t>(t)] == 0) continue;
      if (static_cast<int>(all[static_cast<size_t>(t)].arrows.size()) >= L)
        throw EngineError("not-finite-dimensional",
                          "a maximal-length path reduces to other maximal-length paths");
    }
  }

  QuiverAlgebra A;
  A.quiver_ = q;
  A.ring_ = R;
  A.bound_ = L;
  A.rels_ = rels;
  std::vector<int> bidx(static_cast<size_t>(P), -1);
  for (int i = 0; i < P; ++i) {
    if (is_pivot[static_cast<size_t>(i)]) continue;
    bidx[static_cast<size_t>(i)] = static_cast<int>(A.basis_.size());
    A.basis_.push_back(all[static_cast<size_t>(i)]);
  }
  const int D = static_cast<int>(A.basis_.size());

  // Normal forms of every enumerated word, in basis coordinates.
  std::vector<Vec> nf(static_cast<size_t>(P));
  for (int i = 0; i < P; ++i) {
    Vec v(static_cast<size_t>(D), 0);
    if (!is_pivot[static_cast<size_t>(i)]) {
      v[static_cast<size_t>(bidx[static_cast<size_t>(i)])] = 1;
    } else {
      const Vec& row = rules[static_cast<size_t>(i)];
      for (int t = 0; t < P; ++t) {
        if (t == i || row[static_cast<size_t>(t)] == 0) continue;
        if (bidx[static_cast<size_t>(t)] < 0)
          throw EngineError("internal", "rewrite tail touches a pivot path");
        v[static_cast<size_t>(bidx[static_cast<size_t>(t)])] = R.neg(row[static_cast<size_t>(t)]);
      }
    }
    nf[static_cast<size_t>(i)] = std::move(v);
  }

  A.blocks_.assign(static_cast<size_t>(V) * static_cast<size_t>(V), {});
  for (int i = 0; i < D; ++i) {
    const BasisPath& b = A.basis_[static_cast<size_t>(i)];
    A.blocks_[static_cast<size_t>(b.src - 1) * static_cast<size_t>(V) +
              static_cast<size_t>(b.tgt - 1)]
        .push_back(i);
  }

  // Reduction of arbitrary composable words, recursing through the verified
  // length-L rewrites.
  std::function<Vec(int, const std::vector<int>&)> redword =
      [&](int src, const std::vector<int>& word) -> Vec {
    if (static_cast<int>(word.size()) <= L) {
      auto it = word_index.find(word_key(src, word));
      if (it == word_index.end()) throw EngineError("internal", "unreduced word not enumerated");
      return nf[static_cast<size_t>(it->second)];
    }
    std::vector<int> head(word.begin(), word.begin() + L);
    std::vector<int> rest(word.begin() + L, word.end());
    auto it = word_index.find(word_key(src, head));
    if (it == word_index.end()) throw EngineError("internal", "word prefix not enumerated");
    const Vec& h = nf[static_cast<size_t>(it->second)];
    Vec out(static_cast<size_t>(D), 0);
    for (int b = 0; b < D; ++b) {
      if (h[static_cast<size_t>(b)] == 0) continue;
      std::vector<int> w = A.basis_[static_cast<size_t>(b)].arrows;
      w.insert(w.end(), rest.begin(), rest.end());
      Vec part = redword(A.basis_[static_cast<size_t>(b)].src, w);
      for (int t = 0; t < D; ++t)
        out[static_cast<size_t>(t)] =
            R.add(out[static_cast<size_t>(t)],
                  R.mul(h[static_cast<size_t>(b)], part[static_cast<size_t>(t)]));
    }
    return out;
  };

  A.table_.assign(static_cast<size_t>(D) * static_cast<size_t>(D), Vec());
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) {
      const BasisPath& bi = A.basis_[static_cast<size_t>(i)];
      const BasisPath& bj = A.basis_[static_cast<size_t>(j)];
      Vec prod(static_cast<size_t>(D), 0);
      if (bj.tgt == bi.src) {
        std::vector<int> w = bj.arrows;
        w.insert(w.end(), bi.arrows.begin(), bi.arrows.end());
        prod = redword(bj.src, w);
      }
      A.table_[static_cast<size_t>(i) * static_cast<size_t>(D) + static_cast<size_t>(j)] =
          std::move(prod);
    }
  }
  return A;
}

const std::vector<int>& QuiverAlgebra::paths_between(int from, int to) const {
  const int V = quiver_.vertices;
  if (from < 1 || from > V || to < 1 || to > V)
    throw EngineError("shape", "vertex outside the quiver");
  return blocks_[static_cast<size_t>(from - 1) * static_cast<size_t>(V) +
                 static_cast<size_t>(to - 1)];
}

std::string QuiverAlgebra::path_name(int i) const {
  const BasisPath& b = basis_[static_cast<size_t>(i)];
  if (b.arrows.empty()) return "e" + std::to_string(b.src);
  std::vector<std::string> names;
  for (auto it = b.arrows.rbegin(); it != b.arrows.rend(); ++it)
    names.push_back(quiver_.arrows[static_cast<size_t>(*it)].name);
  return join_names(names, ".");
}

Vec QuiverAlgebra::vertex_elem(int v) const {
  if (v < 1 || v > quiver_.vertices) throw EngineError("shape", "vertex outside the quiver");
  Vec out = zero_elem();
  for (size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i].arrows.empty() && basis_[i].src == v) out[i] = 1;
  return out;
}

Vec QuiverAlgebra::arrow_elem(const std::string& name) const {
  int a = quiver_.arrow_index(name);
  if (a < 0) throw EngineError("shape", "unknown arrow '" + name + "'");
  return reduce_path({a});
}

Vec QuiverAlgebra::path_elem(const std::vector<std::string>& function_order) const {
  std::vector<int> arrows;
  for (auto it = function_order.rbegin(); it != function_order.rend(); ++it) {
    int a = quiver_.arrow_index(*it);
    if (a < 0) throw EngineError("shape", "unknown arrow '" + *it + "' in a path");
    arrows.push_back(a);
  }
  return reduce_path(arrows);
}

Vec QuiverAlgebra::reduce_path(const std::vector<int>& arrows) const {
  if (arrows.empty()) throw EngineError("shape", "empty word has no single source vertex");
  for (size_t i = 0; i + 1 < arrows.size(); ++i)
    if (quiver_.arrows[static_cast<size_t>(arrows[i])].tgt !=
        quiver_.arrows[static_cast<size_t>(arrows[i + 1])].src)
      throw EngineError("shape", "word is not composable (check the arrow order)");
  int src = quiver_.arrows[static_cast<size_t>(arrows.front())].src;
  // Repeatedly reduce through the multiplication table by splitting off the
  // first arrow; for words within the bound a single table walk suffices.
  Vec acc = vertex_elem(src);
  for (int a : arrows) {
    // acc := (arrow a) * acc
    Vec astep = zero_elem();
    for (size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i].arrows.size() == 1 && basis_[i].arrows[0] == a) astep[i] = 1;
    acc = mul(astep, acc);
  }
  return acc;
}

Vec QuiverAlgebra::mul(const Vec& a, const Vec& b) const {
  const int D = dim();
  if (static_cast<int>(a.size()) != D || static_cast<int>(b.size()) != D)
    throw EngineError("shape", "algebra element has the wrong length");
  Vec out(static_cast<size_t>(D), 0);
  for (int i = 0; i < D; ++i) {
    if (a[static_cast<size_t>(i)] == 0) continue;
    for (int j = 0; j < D; ++j) {
      if (b[static_cast<size_t>(j)] == 0) continue;
      const Vec& t = table_[static_cast<size_t>(i) * static_cast<size_t>(D) +
                            static_cast<size_t>(j)];
      i64 c = ring_.mul(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)]);
      for (int k = 0; k < D; ++k)
        if (t[static_cast<size_t>(k)] != 0)
          out[static_cast<size_t>(k)] =
              ring_.add(out[static_cast<size_t>(k)], ring_.mul(c, t[static_cast<size_t>(k)]));
    }
  }
  return out;
}

std::string QuiverAlgebra::show_elem(const Vec& a) const {
  std::vector<std::string> parts;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    std::string p = path_name(static_cast<int>(i));
    parts.push_back(a[i] == 1 ? p : std::to_string(a[i]) + "*" + p);
  }
  return parts.empty() ? "0" : join_names(parts, " + ");
}

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

namespace {

// Coordinates of an algebra element inside one (from, to) path block.
Vec block_coords(const QuiverAlgebra& A, const Vec& elem, int from, int to) {
  const std::vector<int>& blk = A.paths_between(from, to);
  Vec out(blk.size(), 0);
  for (size_t i = 0; i < blk.size(); ++i) out[i] = elem[static_cast<size_t>(blk[i])];
  return out;
}

Vec scatter_block(const QuiverAlgebra& A, const Vec& coords, int from, int to) {
  const std::vector<int>& blk = A.paths_between(from, to);
  Vec out = A.zero_elem();
  for (size_t i = 0; i < blk.size(); ++i) out[static_cast<size_t>(blk[i])] = coords[i];
  return out;
}

Mat mat_scale_local(i64 c, const Mat& m) { return mat_scale(c, m); }

}  // namespace

Rep rep_zero(const QuiverAlgebra& A) {
  Rep m;
  m.dims.assign(static_cast<size_t>(A.quiver().vertices), 0);
  for (const QuiverArrow& a : A.quiver().arrows) {
    (void)a;
    m.arrows.push_back(Mat(A.ring(), 0, 0));
  }
  return m;
}

Rep rep_simple(const QuiverAlgebra& A, int v) {
  if (v < 1 || v > A.quiver().vertices) throw EngineError("shape", "vertex outside the quiver");
  Rep m = rep_zero(A);
  m.dims[static_cast<size_t>(v - 1)] = 1;
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    m.arrows[a] = Mat(A.ring(), m.dims[static_cast<size_t>(ar.tgt - 1)],
                      m.dims[static_cast<size_t>(ar.src - 1)]);
  }
  return m;
}

Rep rep_projective(const QuiverAlgebra& A, int v) {
  if (v < 1 || v > A.quiver().vertices) throw EngineError("shape", "vertex outside the quiver");
  const int V = A.quiver().vertices;
  Rep m;
  m.dims.resize(static_cast<size_t>(V));
  for (int u = 1; u <= V; ++u)
    m.dims[static_cast<size_t>(u - 1)] = static_cast<int>(A.paths_between(v, u).size());
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    const std::vector<int>& src_blk = A.paths_between(v, ar.src);
    Mat M(A.ring(), m.dims[static_cast<size_t>(ar.tgt - 1)],
          m.dims[static_cast<size_t>(ar.src - 1)]);
    for (size_t c = 0; c < src_blk.size(); ++c) {
      std::vector<int> word = A.path(src_blk[c]).arrows;
      word.push_back(static_cast<int>(a));
      Vec red = A.reduce_path(word);
      Vec col = block_coords(A, red, v, ar.tgt);
      for (int r = 0; r < M.rows; ++r) M.at(r, static_cast<int>(c)) = col[static_cast<size_t>(r)];
    }
    m.arrows.push_back(std::move(M));
  }
  return m;
}

Rep rep_injective(const QuiverAlgebra& A, int v) {
  if (v < 1 || v > A.quiver().vertices) throw EngineError("shape", "vertex outside the quiver");
  const int V = A.quiver().vertices;
  Rep m;
  m.dims.resize(static_cast<size_t>(V));
  for (int u = 1; u <= V; ++u)
    m.dims[static_cast<size_t>(u - 1)] = static_cast<int>(A.paths_between(u, v).size());
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    // Precomposition span{paths tgt->v} -> span{paths src->v}, transposed.
    const std::vector<int>& from_tgt = A.paths_between(ar.tgt, v);
    Mat B(A.ring(), static_cast<int>(A.paths_between(ar.src, v).size()),
          static_cast<int>(from_tgt.size()));
    for (size_t c = 0; c < from_tgt.size(); ++c) {
      std::vector<int> word;
      word.push_back(static_cast<int>(a));
      const BasisPath& t = A.path(from_tgt[c]);
      word.insert(word.end(), t.arrows.begin(), t.arrows.end());
      Vec red = A.reduce_path(word);
      Vec col = block_coords(A, red, ar.src, v);
      for (int r = 0; r < B.rows; ++r) B.at(r, static_cast<int>(c)) = col[static_cast<size_t>(r)];
    }
    m.arrows.push_back(B.transpose());
  }
  return m;
}

int rep_total_dim(const Rep& m) {
  int t = 0;
  for (int d : m.dims) t += d;
  return t;
}

void validate_rep(const QuiverAlgebra& A, const Rep& m) {
  const int V = A.quiver().vertices;
  if (static_cast<int>(m.dims.size()) != V)
    throw EngineError("shape", "representation has the wrong number of vertex spaces");
  for (int d : m.dims)
    if (d < 0) throw EngineError("shape", "negative dimension in a representation");
  if (m.arrows.size() != A.quiver().arrows.size())
    throw EngineError("shape", "representation has the wrong number of arrow matrices");
  for (size_t a = 0; a < m.arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    if (m.arrows[a].rows != m.dims[static_cast<size_t>(ar.tgt - 1)] ||
        m.arrows[a].cols != m.dims[static_cast<size_t>(ar.src - 1)])
      throw EngineError("shape", "arrow matrix for '" + ar.name + "' has the wrong shape");
  }
  for (const Relation& rel : A.relations()) {
    bool have = false;
    Mat acc;
    for (const RelTerm& rt : rel) {
      if (A.ring().norm(rt.coeff) == 0) continue;
      std::vector<int> arrows;
      for (auto it = rt.path.rbegin(); it != rt.path.rend(); ++it)
        arrows.push_back(A.quiver().arrow_index(*it));
      int src = A.quiver().arrows[static_cast<size_t>(arrows.front())].src;
      Mat cur = Mat::identity(A.ring(), m.dims[static_cast<size_t>(src - 1)]);
      for (int a : arrows) cur = mat_mul(m.arrows[static_cast<size_t>(a)], cur);
      cur = mat_scale_local(rt.coeff, cur);
      acc = have ? mat_add(acc, cur) : cur;
      have = true;
    }
    if (have && !acc.is_zero())
      throw EngineError("shape", "representation violates a relation");
  }
}

Mat rep_action(const QuiverAlgebra& A, const Rep& m, const Vec& a, int from, int to) {
  Mat acc(A.ring(), m.dims[static_cast<size_t>(to - 1)], m.dims[static_cast<size_t>(from - 1)]);
  for (int i : A.paths_between(from, to)) {
    if (a[static_cast<size_t>(i)] == 0) continue;
    Mat cur = Mat::identity(A.ring(), m.dims[static_cast<size_t>(from - 1)]);
    for (int arrow : A.path(i).arrows) cur = mat_mul(m.arrows[static_cast<size_t>(arrow)], cur);
    acc = mat_add(acc, mat_scale_local(a[static_cast<size_t>(i)], cur));
  }
  return acc;
}

void validate_rep_mor(const QuiverAlgebra& A, const Rep& src, const Rep& tgt,
                      const RepMor& f) {
  const int V = A.quiver().vertices;
  if (static_cast<int>(f.comps.size()) != V)
    throw EngineError("shape", "module map has the wrong number of components");
  for (int u = 1; u <= V; ++u) {
    const Mat& c = f.comps[static_cast<size_t>(u - 1)];
    if (c.rows != tgt.dims[static_cast<size_t>(u - 1)] ||
        c.cols != src.dims[static_cast<size_t>(u - 1)])
      throw EngineError("shape", "module map component has the wrong shape at vertex " +
                                     std::to_string(u));
  }
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    Mat lhs = mat_mul(tgt.arrows[a], f.comps[static_cast<size_t>(ar.src - 1)]);
    Mat rhs = mat_mul(f.comps[static_cast<size_t>(ar.tgt - 1)], src.arrows[a]);
    if (lhs != rhs)
      throw EngineError("shape", "module map does not intertwine arrow '" + ar.name + "'");
  }
}

// ---------------------------------------------------------------------------
// LMat
// ---------------------------------------------------------------------------

Vec& LMat::at(int r, int c) {
  return e[static_cast<size_t>(r) * cols.size() + static_cast<size_t>(c)];
}
const Vec& LMat::at(int r, int c) const {
  return e[static_cast<size_t>(r) * cols.size() + static_cast<size_t>(c)];
}

LMat lmat_zero(const QuiverAlgebra& A, std::vector<int> rows, std::vector<int> cols) {
  LMat m;
  m.rows = std::move(rows);
  m.cols = std::move(cols);
  m.e.assign(m.rows.size() * m.cols.size(), A.zero_elem());
  return m;
}

LMat lmat_identity(const QuiverAlgebra& A, std::vector<int> verts) {
  LMat m = lmat_zero(A, verts, verts);
  for (size_t i = 0; i < verts.size(); ++i)
    m.at(static_cast<int>(i), static_cast<int>(i)) = A.vertex_elem(verts[i]);
  return m;
}

bool lmat_is_zero(const LMat& m) {
  for (const Vec& v : m.e)
    if (!vec_is_zero(v)) return false;
  return true;
}

LMat ladd(const QuiverAlgebra& A, const LMat& a, const LMat& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw EngineError("shape", "algebra matrix shapes differ in a sum");
  LMat out = a;
  for (size_t i = 0; i < out.e.size(); ++i)
    for (size_t k = 0; k < out.e[i].size(); ++k)
      out.e[i][k] = A.ring().add(out.e[i][k], b.e[i][k]);
  return out;
}

LMat lneg(const QuiverAlgebra& A, const LMat& a) { return lscale(A, -1, a); }

LMat lscale(const QuiverAlgebra& A, i64 c, const LMat& a) {
  LMat out = a;
  for (Vec& v : out.e)
    for (i64& x : v) x = A.ring().mul(c, x);
  return out;
}

LMat lcompose(const QuiverAlgebra& A, const LMat& g, const LMat& f) {
  if (g.cols != f.rows)
    throw EngineError("shape", "algebra matrices are not composable");
  LMat out = lmat_zero(A, g.rows, f.cols);
  for (size_t r = 0; r < g.rows.size(); ++r) {
    for (size_t c = 0; c < f.cols.size(); ++c) {
      Vec acc = A.zero_elem();
      for (size_t k = 0; k < g.cols.size(); ++k) {
        const Vec& ge = g.at(static_cast<int>(r), static_cast<int>(k));
        const Vec& fe = f.at(static_cast<int>(k), static_cast<int>(c));
        if (vec_is_zero(ge) || vec_is_zero(fe)) continue;
        // Labels compose contravariantly: the label of "g after f" is
        // label(f) * label(g) in the path algebra.
        Vec prod = A.mul(fe, ge);
        for (size_t t = 0; t < acc.size(); ++t) acc[t] = A.ring().add(acc[t], prod[t]);
      }
      out.at(static_cast<int>(r), static_cast<int>(c)) = std::move(acc);
    }
  }
  return out;
}

void validate_lmat(const QuiverAlgebra& A, const LMat& m) {
  if (m.e.size() != m.rows.size() * m.cols.size())
    throw EngineError("shape", "algebra matrix entry count mismatch");
  for (size_t r = 0; r < m.rows.size(); ++r) {
    for (size_t c = 0; c < m.cols.size(); ++c) {
      const Vec& e = m.at(static_cast<int>(r), static_cast<int>(c));
      if (static_cast<int>(e.size()) != A.dim())
        throw EngineError("shape", "algebra matrix entry has the wrong length");
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        const BasisPath& b = A.path(static_cast<int>(i));
        if (b.src != m.rows[r] || b.tgt != m.cols[c])
          throw EngineError("shape", "algebra matrix entry lies outside its path block");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// PComplex
// ---------------------------------------------------------------------------

bool PComplex::is_zero() const {
  for (const auto& t : terms)
    if (!t.empty()) return false;
  return true;
}

const std::vector<int>& PComplex::term(int degree) const {
  static const std::vector<int> kEmpty;
  int k = degree - lo;
  if (k < 0 || k >= length()) return kEmpty;
  return terms[static_cast<size_t>(k)];
}

namespace {

// Differential X_d -> X_{d-1}, zero-filled outside the stored range.
LMat pdiff(const QuiverAlgebra& A, const PComplex& x, int d) {
  int k = d - x.lo;
  if (k >= 1 && k < x.length()) return x.diffs[static_cast<size_t>(k - 1)];
  return lmat_zero(A, x.term(d - 1), x.term(d));
}

}  // namespace

void validate_pcomplex(const QuiverAlgebra& A, const PComplex& x) {
  size_t expected = x.terms.empty() ? 0 : x.terms.size() - 1;
  if (x.diffs.size() != expected)
    throw EngineError("shape", "complex differential count mismatch");
  for (size_t k = 0; k < x.diffs.size(); ++k) {
    if (x.diffs[k].rows != x.terms[k] || x.diffs[k].cols != x.terms[k + 1])
      throw EngineError("shape", "complex differential has the wrong shape");
    validate_lmat(A, x.diffs[k]);
  }
  for (size_t k = 0; k + 1 < x.diffs.size(); ++k)
    if (!lmat_is_zero(lcompose(A, x.diffs[k], x.diffs[k + 1])))
      throw EngineError("shape", "complex differential does not square to zero");
}

PComplex trim_pcomplex(const PComplex& x) {
  int a = 0, b = x.length() - 1;
  while (a <= b && x.terms[static_cast<size_t>(a)].empty()) ++a;
  while (b >= a && x.terms[static_cast<size_t>(b)].empty()) --b;
  if (a > b) return PComplex{0, {}, {}};
  PComplex out;
  out.lo = x.lo + a;
  out.terms.assign(x.terms.begin() + a, x.terms.begin() + b + 1);
  out.diffs.assign(x.diffs.begin() + a, x.diffs.begin() + b);
  return out;
}

PComplex shift_pcomplex(const QuiverAlgebra& A, const PComplex& x, int s) {
  PComplex out = x;
  out.lo += s;
  if (s % 2 != 0)
    for (LMat& d : out.diffs) d = lneg(A, d);
  return out;
}

PComplex sum_pcomplex(const QuiverAlgebra& A, const PComplex& x, const PComplex& y) {
  if (x.is_zero()) return trim_pcomplex(y);
  if (y.is_zero()) return trim_pcomplex(x);
  int lo = std::min(x.lo, y.lo), hi = std::max(x.hi(), y.hi());
  PComplex out;
  out.lo = lo;
  for (int d = lo; d <= hi; ++d) {
    std::vector<int> t = x.term(d);
    const std::vector<int>& ty = y.term(d);
    t.insert(t.end(), ty.begin(), ty.end());
    out.terms.push_back(std::move(t));
  }
  for (int d = lo + 1; d <= hi; ++d) {
    LMat m = lmat_zero(A, out.term(d - 1), out.term(d));
    LMat dx = pdiff(A, x, d), dy = pdiff(A, y, d);
    size_t ro = x.term(d - 1).size(), co = x.term(d).size();
    for (size_t r = 0; r < dx.rows.size(); ++r)
      for (size_t c = 0; c < dx.cols.size(); ++c)
        m.at(static_cast<int>(r), static_cast<int>(c)) = dx.at(static_cast<int>(r), static_cast<int>(c));
    for (size_t r = 0; r < dy.rows.size(); ++r)
      for (size_t c = 0; c < dy.cols.size(); ++c)
        m.at(static_cast<int>(r + ro), static_cast<int>(c + co)) =
            dy.at(static_cast<int>(r), static_cast<int>(c));
    out.diffs.push_back(std::move(m));
  }
  return trim_pcomplex(out);
}

// ---------------------------------------------------------------------------
// PChainMap
// ---------------------------------------------------------------------------

LMat PChainMap::comp(const QuiverAlgebra& A, const PComplex& x, const PComplex& z,
                     int degree) const {
  int k = degree - lo;
  if (k >= 0 && k < static_cast<int>(comps.size())) return comps[static_cast<size_t>(k)];
  return lmat_zero(A, z.term(degree), x.term(degree));
}

PChainMap chain_zero(const QuiverAlgebra& A, const PComplex& x, const PComplex& z) {
  (void)A;
  (void)x;
  (void)z;
  return PChainMap{0, {}};
}

PChainMap chain_identity(const QuiverAlgebra& A, const PComplex& x) {
  PChainMap f;
  f.lo = x.lo;
  for (int d = x.lo; d <= x.hi(); ++d) f.comps.push_back(lmat_identity(A, x.term(d)));
  return f;
}

PChainMap chain_add(const QuiverAlgebra& A, const PComplex& x, const PComplex& z,
                    const PChainMap& f, const PChainMap& g) {
  int lo = std::max(x.lo, z.lo), hi = std::min(x.hi(), z.hi());
  if (lo > hi) return PChainMap{0, {}};
  PChainMap out;
  out.lo = lo;
  for (int d = lo; d <= hi; ++d)
    out.comps.push_back(ladd(A, f.comp(A, x, z, d), g.comp(A, x, z, d)));
  return out;
}

PChainMap chain_scale(const QuiverAlgebra& A, i64 c, const PChainMap& f) {
  PChainMap out = f;
  for (LMat& m : out.comps) m = lscale(A, c, m);
  return out;
}

PChainMap shift_chain_map(const PChainMap& f, int s) {
  PChainMap out = f;
  out.lo += s;
  return out;
}

bool is_chain_map(const QuiverAlgebra& A, const PComplex& x, const PComplex& z,
                  const PChainMap& f) {
  int lo = std::min(x.lo, z.lo), hi = std::max(x.hi(), z.hi()) + 1;
  for (int d = lo; d <= hi; ++d) {
    if (x.term(d).empty() || z.term(d - 1).empty()) continue;
    LMat lhs = lcompose(A, pdiff(A, z, d), f.comp(A, x, z, d));
    LMat rhs = lcompose(A, f.comp(A, x, z, d - 1), pdiff(A, x, d));
    if (!lmat_is_zero(ladd(A, lhs, lneg(A, rhs)))) return false;
  }
  return true;
}

PChainMap compose_chain(const QuiverAlgebra& A, const PComplex& x, const PComplex& y,
                        const PComplex& z, const PChainMap& g, const PChainMap& f) {
  int lo = std::max(x.lo, z.lo), hi = std::min(x.hi(), z.hi());
  if (lo > hi) return PChainMap{0, {}};
  PChainMap out;
  out.lo = lo;
  for (int d = lo; d <= hi; ++d)
    out.comps.push_back(lcompose(A, g.comp(A, y, z, d), f.comp(A, x, y, d)));
  return out;
}

ConeData cone(const QuiverAlgebra& A, const PComplex& x, const PComplex& y,
              const PChainMap& f) {
  if (!is_chain_map(A, x, y, f))
    throw EngineError("not-chain-map", "cone input does not commute with the differentials");
  int lo = std::min(x.lo + 1, y.lo), hi = std::max(x.hi() + 1, y.hi());
  PComplex c;
  c.lo = lo;
  for (int d = lo; d <= hi; ++d) {
    std::vector<int> t = x.term(d - 1);
    const std::vector<int>& ty = y.term(d);
    t.insert(t.end(), ty.begin(), ty.end());
    c.terms.push_back(std::move(t));
  }
  for (int d = lo + 1; d <= hi; ++d) {
    LMat m = lmat_zero(A, c.term(d - 1), c.term(d));
    LMat dx = lneg(A, pdiff(A, x, d - 1));          // X_{d-1} -> X_{d-2}
    LMat fd = lneg(A, f.comp(A, x, y, d - 1));      // X_{d-1} -> Y_{d-1}
    LMat dy = pdiff(A, y, d);                       // Y_d -> Y_{d-1}
    size_t ro = x.term(d - 2).size(), co = x.term(d - 1).size();
    for (size_t r = 0; r < dx.rows.size(); ++r)
      for (size_t cc = 0; cc < dx.cols.size(); ++cc)
        m.at(static_cast<int>(r), static_cast<int>(cc)) =
            dx.at(static_cast<int>(r), static_cast<int>(cc));
    for (size_t r = 0; r < fd.rows.size(); ++r)
      for (size_t cc = 0; cc < fd.cols.size(); ++cc)
        m.at(static_cast<int>(r + ro), static_cast<int>(cc)) =
            fd.at(static_cast<int>(r), static_cast<int>(cc));
    for (size_t r = 0; r < dy.rows.size(); ++r)
      for (size_t cc = 0; cc < dy.cols.size(); ++cc)
        m.at(static_cast<int>(r + ro), static_cast<int>(cc + co)) =
            dy.at(static_cast<int>(r), static_cast<int>(cc));
    c.diffs.push_back(std::move(m));
  }
  c = trim_pcomplex(c);
  validate_pcomplex(A, c);

  ConeData out;
  out.cx = c;
  // Y -> cone, identity into the second block.
  out.from_target.lo = std::max(c.lo, y.lo);
  for (int d = out.from_target.lo; d <= std::min(c.hi(), y.hi()); ++d) {
    LMat m = lmat_zero(A, c.term(d), y.term(d));
    size_t ro = x.term(d - 1).size();
    for (size_t i = 0; i < y.term(d).size(); ++i)
      m.at(static_cast<int>(i + ro), static_cast<int>(i)) = A.vertex_elem(y.term(d)[i]);
    out.from_target.comps.push_back(std::move(m));
  }
  // cone -> X[1], identity off the first block.
  out.to_shifted_src.lo = std::max(c.lo, x.lo + 1);
  for (int d = out.to_shifted_src.lo; d <= std::min(c.hi(), x.hi() + 1); ++d) {
    LMat m = lmat_zero(A, x.term(d - 1), c.term(d));
    for (size_t i = 0; i < x.term(d - 1).size(); ++i)
      m.at(static_cast<int>(i), static_cast<int>(i)) = A.vertex_elem(x.term(d - 1)[i]);
    out.to_shifted_src.comps.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolutions
// ---------------------------------------------------------------------------

namespace {

// Representation of a direct sum of indecomposable projectives, with the
// vertexwise layout given by concatenated path blocks in summand order.
Rep term_rep(const QuiverAlgebra& A, const std::vector<int>& verts) {
  const int V = A.quiver().vertices;
  std::vector<Rep> parts;
  for (int v : verts) parts.push_back(rep_projective(A, v));
  Rep m;
  m.dims.assign(static_cast<size_t>(V), 0);
  for (const Rep& p : parts)
    for (int u = 0; u < V; ++u) m.dims[static_cast<size_t>(u)] += p.dims[static_cast<size_t>(u)];
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    Mat M(A.ring(), m.dims[static_cast<size_t>(ar.tgt - 1)],
          m.dims[static_cast<size_t>(ar.src - 1)]);
    int ro = 0, co = 0;
    for (const Rep& p : parts) {
      const Mat& b = p.arrows[a];
      for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c) M.at(ro + r, co + c) = b.at(r, c);
      ro += b.rows;
      co += b.cols;
    }
    m.arrows.push_back(std::move(M));
  }
  return m;
}

// Offset of summand i's block inside the vertex-u component of a term.
int term_offset(const QuiverAlgebra& A, const std::vector<int>& verts, size_t i, int u) {
  int off = 0;
  for (size_t j = 0; j < i; ++j)
    off += static_cast<int>(A.paths_between(verts[j], u).size());
  return off;
}

struct Cover {
  std::vector<int> verts;
  RepMor phi;  // term -> module
};

// Minimal cover of a module: one projective per top generator, generators
// chosen as the first standard basis vectors completing the radical.
Cover cover_module(const QuiverAlgebra& A, const Rep& m) {
  const int V = A.quiver().vertices;
  std::vector<std::pair<int, Vec>> gens;  // (vertex, generator)
  for (int u = 1; u <= V; ++u) {
    int du = m.dims[static_cast<size_t>(u - 1)];
    Subgroup span = Subgroup::zero(A.ring(), du);
    bool any = false;
    Mat stack(A.ring(), du, 0);
    for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
      if (A.quiver().arrows[a].tgt != u) continue;
      stack = any ? hstack(stack, m.arrows[a]) : m.arrows[a];
      any = true;
    }
    if (any && stack.cols > 0) span = image(stack);
    for (int j = 0; j < du; ++j) {
      Vec ej(static_cast<size_t>(du), 0);
      ej[static_cast<size_t>(j)] = 1;
      if (span.contains(ej)) continue;
      gens.emplace_back(u, ej);
      span = subgroup_sum(span, Subgroup::from_generators(Mat::from_rows(A.ring(), {ej}, du)));
    }
  }
  Cover out;
  for (const auto& g : gens) out.verts.push_back(g.first);
  out.phi.comps.clear();
  for (int w = 1; w <= V; ++w) {
    int cols = 0;
    for (const auto& g : gens) cols += static_cast<int>(A.paths_between(g.first, w).size());
    Mat M(A.ring(), m.dims[static_cast<size_t>(w - 1)], cols);
    int c = 0;
    for (const auto& g : gens) {
      for (int pi : A.paths_between(g.first, w)) {
        Mat cur = Mat::identity(A.ring(), m.dims[static_cast<size_t>(g.first - 1)]);
        for (int arrow : A.path(pi).arrows)
          cur = mat_mul(m.arrows[static_cast<size_t>(arrow)], cur);
        Vec col = cur.apply(g.second);
        for (int r = 0; r < M.rows; ++r) M.at(r, c) = col[static_cast<size_t>(r)];
        ++c;
      }
    }
    out.phi.comps.push_back(std::move(M));
  }
  return out;
}

struct KernelRep {
  Rep rep;
  RepMor incl;  // kernel -> ambient
};

// Vertexwise kernel of a module map, as a subrepresentation of the source.
KernelRep kernel_subrep(const QuiverAlgebra& A, const Rep& src, const RepMor& f) {
  const int V = A.quiver().vertices;
  std::vector<Subgroup> ker;
  KernelRep out;
  out.rep.dims.resize(static_cast<size_t>(V));
  for (int u = 0; u < V; ++u) {
    ker.push_back(kernel(f.comps[static_cast<size_t>(u)]));
    out.rep.dims[static_cast<size_t>(u)] = ker.back().dim();
    out.incl.comps.push_back(ker.back().basis.transpose());
  }
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    const Subgroup& ks = ker[static_cast<size_t>(ar.src - 1)];
    const Subgroup& kt = ker[static_cast<size_t>(ar.tgt - 1)];
    Mat M(A.ring(), kt.dim(), ks.dim());
    Mat basis_cols = kt.basis.transpose();
    for (int i = 0; i < ks.dim(); ++i) {
      Vec v = src.arrows[a].apply(ks.basis.row(i));
      Coset sol = solve_affine(basis_cols, v);
      if (sol.is_empty)
        throw EngineError("internal", "kernel is not arrow-stable");
      for (int r = 0; r < M.rows; ++r) M.at(r, i) = sol.rep[static_cast<size_t>(r)];
    }
    out.rep.arrows.push_back(std::move(M));
  }
  return out;
}

// Read a vertexwise map between projective terms back off as a matrix over
// the algebra, via the images of the summand generators.
LMat repmor_to_lmat(const QuiverAlgebra& A, const std::vector<int>& src_verts,
                    const std::vector<int>& tgt_verts, const RepMor& f) {
  LMat out = lmat_zero(A, tgt_verts, src_verts);
  for (size_t c = 0; c < src_verts.size(); ++c) {
    int v = src_verts[c];
    const std::vector<int>& loop = A.paths_between(v, v);
    int unit_pos = -1;
    for (size_t k = 0; k < loop.size(); ++k)
      if (A.path(loop[k]).arrows.empty()) unit_pos = static_cast<int>(k);
    if (unit_pos < 0) throw EngineError("internal", "missing idempotent path");
    const Mat& comp = f.comps[static_cast<size_t>(v - 1)];
    int gen = term_offset(A, src_verts, c, v) + unit_pos;
    Vec img(static_cast<size_t>(comp.rows), 0);
    for (int r = 0; r < comp.rows; ++r) img[static_cast<size_t>(r)] = comp.at(r, gen);
    int off = 0;
    for (size_t r = 0; r < tgt_verts.size(); ++r) {
      const std::vector<int>& blk = A.paths_between(tgt_verts[r], v);
      Vec bc(blk.size(), 0);
      for (size_t k = 0; k < blk.size(); ++k) bc[k] = img[static_cast<size_t>(off + static_cast<int>(k))];
      out.at(static_cast<int>(r), static_cast<int>(c)) = scatter_block(A, bc, tgt_verts[r], v);
      off += static_cast<int>(blk.size());
    }
  }
  return out;
}

// Vertexwise matrices of a map between projective terms given over the
// algebra.
RepMor lmat_to_repmor(const QuiverAlgebra& A, const LMat& m) {
  const int V = A.quiver().vertices;
  RepMor out;
  for (int u = 1; u <= V; ++u) {
    int rows = 0, cols = 0;
    for (int w : m.rows) rows += static_cast<int>(A.paths_between(w, u).size());
    for (int v : m.cols) cols += static_cast<int>(A.paths_between(v, u).size());
    Mat M(A.ring(), rows, cols);
    int co = 0;
    for (size_t c = 0; c < m.cols.size(); ++c) {
      int v = m.cols[c];
      const std::vector<int>& cblk = A.paths_between(v, u);
      for (size_t t = 0; t < cblk.size(); ++t) {
        Vec telem = A.zero_elem();
        telem[static_cast<size_t>(cblk[t])] = 1;
        int ro = 0;
        for (size_t r = 0; r < m.rows.size(); ++r) {
          int w = m.rows[r];
          const Vec& entry = m.at(static_cast<int>(r), static_cast<int>(c));
          Vec moved = A.mul(telem, entry);  // entry (path w->v) then t (path v->u)
          Vec bc = block_coords(A, moved, w, u);
          for (size_t k = 0; k < bc.size(); ++k)
            M.at(ro + static_cast<int>(k), co + static_cast<int>(t)) = bc[k];
          ro += static_cast<int>(A.paths_between(w, u).size());
        }
      }
      co += static_cast<int>(cblk.size());
    }
    out.comps.push_back(std::move(M));
  }
  return out;
}

}  // namespace

Resolution projective_resolution(const QuiverAlgebra& A, const Rep& m, int cap) {
  validate_rep(A, m);
  Resolution res;
  res.module = m;
  if (rep_total_dim(m) == 0) {
    res.cx = PComplex{0, {}, {}};
    res.aug.comps.clear();
    for (int u = 0; u < A.quiver().vertices; ++u)
      res.aug.comps.push_back(Mat(A.ring(), m.dims[static_cast<size_t>(u)], 0));
    return res;
  }
  Cover c0 = cover_module(A, m);
  res.aug = c0.phi;
  res.cx.lo = 0;
  res.cx.terms.push_back(c0.verts);
  std::vector<int> prev_verts = c0.verts;
  Rep prev_rep = term_rep(A, prev_verts);
  KernelRep ker = kernel_subrep(A, prev_rep, c0.phi);
  while (rep_total_dim(ker.rep) > 0) {
    if (static_cast<int>(res.cx.terms.size()) > cap)
      throw EngineError("resolution-too-long",
                        "projective resolution exceeded the length cap of " + std::to_string(cap));
    Cover c = cover_module(A, ker.rep);
    RepMor d;
    for (int u = 0; u < A.quiver().vertices; ++u)
      d.comps.push_back(mat_mul(ker.incl.comps[static_cast<size_t>(u)],
                                c.phi.comps[static_cast<size_t>(u)]));
    res.cx.diffs.push_back(repmor_to_lmat(A, c.verts, prev_verts, d));
    res.cx.terms.push_back(c.verts);
    prev_verts = c.verts;
    prev_rep = term_rep(A, prev_verts);
    ker = kernel_subrep(A, prev_rep, c.phi);
  }
  validate_pcomplex(A, res.cx);
  return res;
}

int projective_dimension(const Resolution& r) { return r.cx.length() - 1; }

PChainMap lift_module_map(const QuiverAlgebra& A, const Resolution& src,
                          const Resolution& tgt, const RepMor& f) {
  validate_rep_mor(A, src.module, tgt.module, f);
  const int V = A.quiver().vertices;
  PChainMap out;
  out.lo = 0;
  int len = src.cx.length();
  for (int d = 0; d < len; ++d) {
    const std::vector<int>& sv = src.cx.term(d);
    const std::vector<int>& tv = tgt.cx.term(d);
    // Coordinates of the unknown component over its path blocks.
    int dim = 0;
    for (int w : tv)
      for (int v : sv) dim += static_cast<int>(A.paths_between(w, v).size());
    auto decode = [&](const Vec& coords) {
      LMat u = lmat_zero(A, tv, sv);
      size_t off = 0;
      for (size_t r = 0; r < tv.size(); ++r)
        for (size_t c = 0; c < sv.size(); ++c) {
          const std::vector<int>& blk = A.paths_between(tv[r], sv[c]);
          Vec bc(blk.size(), 0);
          for (size_t k = 0; k < blk.size(); ++k) bc[k] = coords[off++];
          u.at(static_cast<int>(r), static_cast<int>(c)) = scatter_block(A, bc, tv[r], sv[c]);
        }
      return u;
    };
    // Residual of the defining constraint, flattened.
    auto residual = [&](const LMat& u) {
      Vec outv;
      if (d == 0) {
        RepMor um = lmat_to_repmor(A, u);
        for (int v = 0; v < V; ++v) {
          Mat lhs = mat_mul(tgt.aug.comps[static_cast<size_t>(v)], um.comps[static_cast<size_t>(v)]);
          for (i64 x : lhs.a) outv.push_back(x);
        }
      } else {
        LMat lhs = lcompose(A, pdiff(A, tgt.cx, d), u);
        for (const Vec& e : lhs.e)
          for (i64 x : e) outv.push_back(x);
      }
      return outv;
    };
    Vec rhs;
    if (d == 0) {
      for (int v = 0; v < V; ++v) {
        Mat r = mat_mul(f.comps[static_cast<size_t>(v)], src.aug.comps[static_cast<size_t>(v)]);
        for (i64 x : r.a) rhs.push_back(x);
      }
    } else {
      LMat r = lcompose(A, out.comps.back(), pdiff(A, src.cx, d));
      for (const Vec& e : r.e)
        for (i64 x : e) rhs.push_back(x);
    }
    if (dim == 0) {
      if (!vec_is_zero(rhs))
        throw EngineError("internal", "comparison lift blocked at an empty degree");
      out.comps.push_back(lmat_zero(A, tv, sv));
      continue;
    }
    Mat sys(A.ring(), static_cast<int>(rhs.size()), dim);
    for (int j = 0; j < dim; ++j) {
      Vec unit(static_cast<size_t>(dim), 0);
      unit[static_cast<size_t>(j)] = 1;
      Vec col = residual(decode(unit));
      for (size_t r = 0; r < col.size(); ++r) sys.at(static_cast<int>(r), j) = col[r];
    }
    Coset sol = solve_affine(sys, rhs);
    if (sol.is_empty) throw EngineError("internal", "comparison lift has no solution");
    out.comps.push_back(decode(sol.rep));
  }
  if (!is_chain_map(A, src.cx, tgt.cx, out))
    throw EngineError("internal", "comparison lift is not a chain map");
  return out;
}

// ---------------------------------------------------------------------------
// ChainHom
// ---------------------------------------------------------------------------

namespace {

int lmat_block_dim(const QuiverAlgebra& A, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
  int d = 0;
  for (int w : rows)
    for (int v : cols) d += static_cast<int>(A.paths_between(w, v).size());
  return d;
}

void lmat_flatten(const QuiverAlgebra& A, const LMat& m, Vec& out, size_t& off) {
  for (size_t r = 0; r < m.rows.size(); ++r)
    for (size_t c = 0; c < m.cols.size(); ++c) {
      const std::vector<int>& blk = A.paths_between(m.rows[r], m.cols[c]);
      const Vec& e = m.at(static_cast<int>(r), static_cast<int>(c));
      for (int pi : blk) out[off++] = e[static_cast<size_t>(pi)];
    }
}

}  // namespace

const PChainMap& ChainHom::class_rep(int i) const {
  if (i < 0 || i >= rank()) throw EngineError("shape", "class index out of range");
  return class_reps_[static_cast<size_t>(i)];
}

ChainHom ChainHom::compute(const QuiverAlgebra& A, PComplex x, PComplex z) {
  ChainHom h;
  h.x_ = std::move(x);
  h.z_ = std::move(z);
  h.ring_ = A.ring();
  const PComplex& X = h.x_;
  const PComplex& Z = h.z_;

  // Layout of degreewise maps X_d -> Z_d.
  for (int d = std::max(X.lo, Z.lo); d <= std::min(X.hi(), Z.hi()); ++d) {
    if (X.term(d).empty() || Z.term(d).empty()) continue;
    h.degrees_.push_back(d);
    for (size_t r = 0; r < Z.term(d).size(); ++r)
      for (size_t c = 0; c < X.term(d).size(); ++c)
        for (size_t k = 0; k < A.paths_between(Z.term(d)[r], X.term(d)[c]).size(); ++k) {
          Slot s;
          s.degree = d;
          s.r = static_cast<int>(r);
          s.c = static_cast<int>(c);
          s.path = static_cast<int>(k);
          h.slots_.push_back(s);
        }
  }
  h.coord_dim_ = static_cast<int>(h.slots_.size());

  // Chain-map conditions X_d -> Z_{d-1}.
  std::vector<int> cond_degrees;
  std::map<int, int> cond_off;
  int cond_dim = 0;
  for (int d = std::max(X.lo, Z.lo + 1); d <= std::min(X.hi(), Z.hi() + 1); ++d) {
    if (X.term(d).empty() || Z.term(d - 1).empty()) continue;
    cond_degrees.push_back(d);
    cond_off[d] = cond_dim;
    cond_dim += lmat_block_dim(A, Z.term(d - 1), X.term(d));
  }
  std::map<int, int> layout_off;
  {
    int off = 0;
    for (int d : h.degrees_) {
      layout_off[d] = off;
      off += lmat_block_dim(A, Z.term(d), X.term(d));
    }
  }

  Mat D(A.ring(), cond_dim, h.coord_dim_);
  for (int j = 0; j < h.coord_dim_; ++j) {
    const Slot& s = h.slots_[static_cast<size_t>(j)];
    LMat unit = lmat_zero(A, Z.term(s.degree), X.term(s.degree));
    {
      const std::vector<int>& blk =
          A.paths_between(Z.term(s.degree)[static_cast<size_t>(s.r)],
                          X.term(s.degree)[static_cast<size_t>(s.c)]);
      unit.at(s.r, s.c)[static_cast<size_t>(blk[static_cast<size_t>(s.path)])] = 1;
    }
    Vec col(static_cast<size_t>(cond_dim), 0);
    // d^Z o f contributes at condition degree s.degree.
    if (cond_off.count(s.degree)) {
      LMat t = lcompose(A, pdiff(A, Z, s.degree), unit);
      size_t off = static_cast<size_t>(cond_off[s.degree]);
      lmat_flatten(A, t, col, off);
    }
    // f o d^X contributes at condition degree s.degree + 1.
    if (cond_off.count(s.degree + 1)) {
      LMat t = lneg(A, lcompose(A, unit, pdiff(A, X, s.degree + 1)));
      size_t off = static_cast<size_t>(cond_off[s.degree + 1]);
      lmat_flatten(A, t, col, off);
    }
    for (int r = 0; r < cond_dim; ++r) D.at(r, j) = col[static_cast<size_t>(r)];
  }
  h.cycle_conditions_ = D;
  Subgroup cycles = cond_dim == 0 ? Subgroup::full(A.ring(), h.coord_dim_) : kernel(D);

  // Homotopies X_d -> Z_{d+1}.
  std::vector<Vec> boundary_cols;
  for (int d = std::max(X.lo, Z.lo - 1); d <= std::min(X.hi(), Z.hi() - 1); ++d) {
    if (X.term(d).empty() || Z.term(d + 1).empty()) continue;
    for (size_t r = 0; r < Z.term(d + 1).size(); ++r)
      for (size_t c = 0; c < X.term(d).size(); ++c) {
        const std::vector<int>& blk = A.paths_between(Z.term(d + 1)[r], X.term(d)[c]);
        for (size_t k = 0; k < blk.size(); ++k) {
          LMat unit = lmat_zero(A, Z.term(d + 1), X.term(d));
          unit.at(static_cast<int>(r), static_cast<int>(c))[static_cast<size_t>(blk[k])] = 1;
          Vec col(static_cast<size_t>(h.coord_dim_), 0);
          if (layout_off.count(d)) {
            LMat t = lcompose(A, pdiff(A, Z, d + 1), unit);
            size_t off = static_cast<size_t>(layout_off[d]);
            lmat_flatten(A, t, col, off);
          }
          if (layout_off.count(d + 1)) {
            LMat t = lcompose(A, unit, pdiff(A, X, d + 1));
            size_t off = static_cast<size_t>(layout_off[d + 1]);
            lmat_flatten(A, t, col, off);
          }
          if (!vec_is_zero(col)) boundary_cols.push_back(std::move(col));
        }
      }
  }
  Subgroup boundaries =
      boundary_cols.empty()
          ? Subgroup::zero(A.ring(), h.coord_dim_)
          : Subgroup::from_generators(Mat::from_rows(A.ring(), boundary_cols, h.coord_dim_));
  h.boundary_dim_ = boundaries.dim();

  // Complement basis: extend the boundary echelon by cycle echelon vectors.
  Subgroup span = boundaries;
  for (int i = 0; i < cycles.dim(); ++i) {
    Vec v = cycles.basis.row(i);
    if (span.contains(v)) continue;
    h.class_vecs_.push_back(v);
    span = subgroup_sum(span, Subgroup::from_generators(Mat::from_rows(A.ring(), {v}, h.coord_dim_)));
  }
  int nc = static_cast<int>(h.class_vecs_.size());
  h.reduce_ = Mat(A.ring(), h.coord_dim_, nc + h.boundary_dim_);
  for (int c = 0; c < nc; ++c)
    for (int r = 0; r < h.coord_dim_; ++r)
      h.reduce_.at(r, c) = h.class_vecs_[static_cast<size_t>(c)][static_cast<size_t>(r)];
  for (int c = 0; c < h.boundary_dim_; ++c)
    for (int r = 0; r < h.coord_dim_; ++r)
      h.reduce_.at(r, nc + c) = boundaries.basis.at(c, r);
  for (const Vec& v : h.class_vecs_) h.class_reps_.push_back(h.decode(A, v));
  return h;
}

Vec ChainHom::encode(const QuiverAlgebra& A, const PChainMap& f) const {
  Vec out(static_cast<size_t>(coord_dim_), 0);
  size_t i = 0;
  while (i < slots_.size()) {
    int d = slots_[i].degree;
    LMat m = f.comp(A, x_, z_, d);
    while (i < slots_.size() && slots_[i].degree == d) {
      const Slot& s = slots_[i];
      const std::vector<int>& blk = A.paths_between(z_.term(d)[static_cast<size_t>(s.r)],
                                                    x_.term(d)[static_cast<size_t>(s.c)]);
      out[i] = m.at(s.r, s.c)[static_cast<size_t>(blk[static_cast<size_t>(s.path)])];
      ++i;
    }
  }
  return out;
}

PChainMap ChainHom::decode(const QuiverAlgebra& A, const Vec& coords) const {
  if (static_cast<int>(coords.size()) != coord_dim_)
    throw EngineError("shape", "coordinate vector has the wrong length");
  if (degrees_.empty()) return PChainMap{0, {}};
  PChainMap f;
  f.lo = degrees_.front();
  for (int d = degrees_.front(); d <= degrees_.back(); ++d)
    f.comps.push_back(lmat_zero(A, z_.term(d), x_.term(d)));
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (coords[i] == 0) continue;
    const Slot& s = slots_[i];
    LMat& m = f.comps[static_cast<size_t>(s.degree - f.lo)];
    const std::vector<int>& blk = A.paths_between(z_.term(s.degree)[static_cast<size_t>(s.r)],
                                                  x_.term(s.degree)[static_cast<size_t>(s.c)]);
    m.at(s.r, s.c)[static_cast<size_t>(blk[static_cast<size_t>(s.path)])] = coords[i];
  }
  return f;
}

PChainMap ChainHom::rep(const QuiverAlgebra& A, const Vec& coords) const {
  if (static_cast<int>(coords.size()) != rank())
    throw EngineError("shape", "class coordinate vector has the wrong length");
  Vec full(static_cast<size_t>(coord_dim_), 0);
  for (int i = 0; i < rank(); ++i) {
    if (coords[static_cast<size_t>(i)] == 0) continue;
    for (int k = 0; k < coord_dim_; ++k)
      full[static_cast<size_t>(k)] =
          A.ring().add(full[static_cast<size_t>(k)],
                       A.ring().mul(coords[static_cast<size_t>(i)],
                                    class_vecs_[static_cast<size_t>(i)][static_cast<size_t>(k)]));
  }
  return decode(A, full);
}

bool ChainHom::is_cycle(const QuiverAlgebra& A, const PChainMap& f) const {
  if (coord_dim_ == 0) return true;
  return vec_is_zero(cycle_conditions_.apply(encode(A, f)));
}

Vec ChainHom::coords(const QuiverAlgebra& A, const PChainMap& f) const {
  if (coord_dim_ == 0) return Vec();
  Vec enc = encode(A, f);
  if (!vec_is_zero(cycle_conditions_.apply(enc)))
    throw EngineError("not-chain-map", "map does not commute with the differentials");
  int nc = rank();
  if (reduce_.cols == 0) {
    if (!vec_is_zero(enc))
      throw EngineError("internal", "nonzero cycle in a trivial class space");
    return Vec();
  }
  Coset sol = solve_affine(reduce_, enc);
  if (sol.is_empty) throw EngineError("internal", "cycle outside the class decomposition");
  Vec out(static_cast<size_t>(nc), 0);
  for (int i = 0; i < nc; ++i) out[static_cast<size_t>(i)] = sol.rep[static_cast<size_t>(i)];
  return out;
}

// ---------------------------------------------------------------------------
// QuiverBackend
// ---------------------------------------------------------------------------

namespace {

std::string serialize_pcomplex(const PComplex& x) {
  std::ostringstream os;
  os << x.lo << '#';
  for (const auto& t : x.terms) {
    for (int v : t) os << v << ',';
    os << ';';
  }
  os << '#';
  for (const LMat& d : x.diffs) {
    for (const Vec& e : d.e)
      for (i64 c : e) os << c << ',';
    os << ';';
  }
  return os.str();
}

}  // namespace

QuiverBackend::QuiverBackend(QuiverAlgebra algebra, std::vector<CTSummand> summands)
    : alg_(std::move(algebra)), summands_(std::move(summands)) {
  if (summands_.empty())
    throw EngineError("shape", "the tilting family needs at least one summand");
  for (size_t i = 0; i < summands_.size(); ++i) {
    if (summands_[i].name.empty())
      throw EngineError("shape", "tilting summands need nonempty names");
    for (size_t j = i + 1; j < summands_.size(); ++j)
      if (summands_[j].name == summands_[i].name)
        throw EngineError("shape", "duplicate summand name '" + summands_[i].name + "'");
    validate_rep(alg_, summands_[i].module);
    if (rep_total_dim(summands_[i].module) == 0)
      throw EngineError("shape", "tilting summands must be nonzero");
  }
  for (size_t i = 0; i < summands_.size(); ++i) {
    Resolution r = projective_resolution(alg_, summands_[i].module);
    PComplex cx = r.cx;  // keep alive: the argument below consumes r
    ObjRef o = register_entry(cx, std::vector<std::pair<int, int>>{{static_cast<int>(i), 0}},
                              summands_[i].name, std::move(r));
    if (o.grade != 0) throw EngineError("internal", "summand resolution registered off-grade");
    summand_objs_.push_back(o);
  }
  // Rigidity: the intermediate self-extension groups vanish.
  for (size_t i = 0; i < summands_.size(); ++i)
    for (size_t j = 0; j < summands_.size(); ++j) {
      ChainHom e1 = ChainHom::compute(
          alg_, entries_[static_cast<size_t>(summand_objs_[i].id)].cx,
          shift_pcomplex(alg_, entries_[static_cast<size_t>(summand_objs_[j].id)].cx, 1));
      if (e1.rank() != 0)
        throw EngineError("not-cluster-tilting",
                          "first extension group between '" + summands_[i].name + "' and '" +
                              summands_[j].name + "' does not vanish");
    }
}

const CTSummand& QuiverBackend::summand(int i) const {
  if (i < 0 || i >= summand_count()) throw EngineError("shape", "summand index out of range");
  return summands_[static_cast<size_t>(i)];
}

ObjRef QuiverBackend::summand_obj(int i) const {
  if (i < 0 || i >= summand_count()) throw EngineError("shape", "summand index out of range");
  return summand_objs_[static_cast<size_t>(i)];
}

std::optional<ObjRef> QuiverBackend::named_obj(const std::string& name) const {
  auto it = names_.find(name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

ObjRef QuiverBackend::add_module_object(const std::string& name, const Rep& m) {
  if (name.empty()) throw EngineError("shape", "module objects need nonempty names");
  if (names_.count(name)) throw EngineError("shape", "object name '" + name + "' already in use");
  validate_rep(alg_, m);
  Resolution r = projective_resolution(alg_, m);
  PComplex cx = r.cx;  // keep alive: the argument below consumes r
  return register_entry(cx, std::nullopt, name, std::move(r));
}

ObjRef QuiverBackend::register_entry(const PComplex& cx,
                                     std::optional<std::vector<std::pair<int, int>>> decomp,
                                     std::optional<std::string> name,
                                     std::optional<Resolution> res) {
  PComplex t = trim_pcomplex(cx);
  validate_pcomplex(alg_, t);
  int q = 0;
  if (!t.is_zero()) {
    q = floordiv2(t.lo);
    t.lo -= 2 * q;  // normalize to lo in {0, 1}; even shifts leave signs alone
  } else {
    decomp = std::vector<std::pair<int, int>>{};  // the zero object is a trivial sum
  }
  std::string key = serialize_pcomplex(t);
  auto it = index_.find(key);
  int id;
  if (it != index_.end()) {
    id = it->second;
  } else {
    id = static_cast<int>(entries_.size());
    entries_.push_back(Entry{t, std::nullopt, std::nullopt, std::nullopt});
    index_[key] = id;
  }
  Entry& e = entries_[static_cast<size_t>(id)];
  if (decomp && !e.u_decomp) {
    std::vector<std::pair<int, int>> rel;
    for (const auto& p : *decomp) rel.emplace_back(p.first, p.second - q);
    e.u_decomp = std::move(rel);
  }
  if (name && !e.name) {
    e.name = *name;
    names_[*name] = ObjRef{id, q};
  }
  if (res && !e.resolution) {
    e.resolution = static_cast<int>(resolutions_.size());
    resolutions_.push_back(std::move(*res));
  }
  return ObjRef{id, q};
}

ObjRef QuiverBackend::register_complex(const PComplex& cx) {
  return register_entry(cx, std::nullopt, std::nullopt, std::nullopt);
}

const QuiverBackend::Entry& QuiverBackend::entry(ObjRef x) const {
  if (x.id < 0 || x.id >= static_cast<int>(entries_.size()))
    throw EngineError("shape", "unknown object handle");
  return entries_[static_cast<size_t>(x.id)];
}

std::optional<std::vector<std::pair<int, int>>> QuiverBackend::decomp_of(ObjRef x) const {
  const Entry& e = entry(x);
  if (!e.u_decomp) return std::nullopt;
  std::vector<std::pair<int, int>> out;
  for (const auto& p : *e.u_decomp) out.emplace_back(p.first, p.second + x.grade);
  return out;
}

PComplex QuiverBackend::materialize(ObjRef x) const {
  return shift_pcomplex(alg_, entry(x).cx, 2 * x.grade);
}

const ChainHom& QuiverBackend::chain_hom(ObjRef src, ObjRef tgt) {
  entry(src);
  entry(tgt);
  std::tuple<int, int, int> key{src.id, tgt.id, tgt.grade - src.grade};
  auto it = hom_cache_.find(key);
  if (it == hom_cache_.end()) {
    ChainHom h = ChainHom::compute(
        alg_, entries_[static_cast<size_t>(src.id)].cx,
        shift_pcomplex(alg_, entries_[static_cast<size_t>(tgt.id)].cx,
                       2 * (tgt.grade - src.grade)));
    it = hom_cache_.emplace(key, std::move(h)).first;
  }
  return it->second;
}

const Resolution* QuiverBackend::resolution_of(ObjRef x) const {
  const Entry& e = entry(x);
  if (!e.resolution) return nullptr;
  return &resolutions_[static_cast<size_t>(*e.resolution)];
}

PChainMap QuiverBackend::rep_of(const Morphism& f) {
  const ChainHom& h = chain_hom(f.hom.src, f.hom.tgt);
  return shift_chain_map(h.rep(alg_, f.coords), 2 * f.hom.src.grade);
}

Morphism QuiverBackend::class_of(ObjRef src, ObjRef tgt, const PChainMap& f) {
  const ChainHom& h = chain_hom(src, tgt);
  Morphism out;
  out.hom = hom(src, tgt);
  out.coords = h.coords(alg_, shift_chain_map(f, -2 * src.grade));
  return out;
}

Morphism QuiverBackend::from_module_map(ObjRef src, ObjRef tgt, const RepMor& f) {
  const Resolution* rs = resolution_of(src);
  const Resolution* rt = resolution_of(tgt);
  if (!rs || !rt)
    throw EngineError("shape", "module maps need module-backed objects at both ends");
  if (src.grade != 0 || tgt.grade != 0)
    throw EngineError("shape", "module maps are defined between unsuspended objects");
  PChainMap lift = lift_module_map(alg_, *rs, *rt, f);
  return class_of(src, tgt, lift);
}

QuiverBackend::ConeTriangle QuiverBackend::cone_of(const Morphism& f) {
  PComplex xm = materialize(f.hom.src), ym = materialize(f.hom.tgt);
  ConeData cd = cone(alg_, xm, ym, rep_of(f));
  ConeTriangle out;
  out.obj = register_complex(cd.cx);
  out.from_target = class_of(f.hom.tgt, out.obj, cd.from_target);
  ObjRef sx = register_complex(shift_pcomplex(alg_, xm, 1));
  out.to_shifted_src = class_of(out.obj, sx, cd.to_shifted_src);
  return out;
}

std::string QuiverBackend::name() const {
  return "quiver(p=" + std::to_string(alg_.ring().N) +
         ", vertices=" + std::to_string(alg_.quiver().vertices) +
         ", family=" + std::to_string(summand_count()) + ")";
}

HomSpace QuiverBackend::hom(ObjRef src, ObjRef tgt) {
  const ChainHom& h = chain_hom(src, tgt);
  HomSpace out;
  out.src = src;
  out.tgt = tgt;
  out.rank = h.rank();
  out.ring = alg_.ring();
  out.basis_tag = "homotopy-classes";
  return out;
}

Morphism QuiverBackend::compose(const Morphism& g, const Morphism& f) {
  if (!object_eq(f.hom.tgt, g.hom.src))
    throw EngineError("shape", "composition endpoints do not match");
  if (f.hom.tgt.id != g.hom.src.id || f.hom.tgt.grade != g.hom.src.grade)
    return zero_mor(f.hom.src, g.hom.tgt);  // both middles are zero objects
  PComplex xm = materialize(f.hom.src);
  PComplex ym = materialize(f.hom.tgt);
  PComplex zm = materialize(g.hom.tgt);
  PChainMap comp = compose_chain(alg_, xm, ym, zm, rep_of(g), rep_of(f));
  return class_of(f.hom.src, g.hom.tgt, comp);
}

Morphism QuiverBackend::identity(ObjRef x) {
  return class_of(x, x, chain_identity(alg_, materialize(x)));
}

ObjRef QuiverBackend::suspend_obj(ObjRef x, int k) {
  if (entry(x).cx.is_zero()) return x;
  return ObjRef{x.id, x.grade + k};
}

Mat QuiverBackend::suspend_matrix(ObjRef x, ObjRef y) {
  // Hom is computed after folding the grade difference into the target, so
  // suspension acts as the identity on coordinates.
  return Mat::identity(alg_.ring(), chain_hom(x, y).rank());
}

std::vector<ObjRef> QuiverBackend::generators() { return summand_objs_; }

std::pair<int, int> QuiverBackend::hom_window(ObjRef a, ObjRef x) {
  PComplex am = materialize(a), xm = materialize(x);
  if (am.is_zero() || xm.is_zero()) return {0, -1};
  return {ceildiv2(xm.lo - am.hi()), floordiv2(xm.hi() - am.lo)};
}

ObjRef QuiverBackend::zero_obj() { return register_complex(PComplex{0, {}, {}}); }

ObjRef QuiverBackend::sum_obj(const std::vector<ObjRef>& parts) {
  if (parts.empty()) return zero_obj();
  PComplex acc = materialize(parts[0]);
  std::optional<std::vector<std::pair<int, int>>> decomp = decomp_of(parts[0]);
  for (size_t i = 1; i < parts.size(); ++i) {
    acc = sum_pcomplex(alg_, acc, materialize(parts[i]));
    auto di = decomp_of(parts[i]);
    if (decomp && di)
      decomp->insert(decomp->end(), di->begin(), di->end());
    else
      decomp = std::nullopt;
  }
  return register_entry(acc, decomp, std::nullopt, std::nullopt);
}

Morphism QuiverBackend::inclusion(const std::vector<ObjRef>& parts, size_t i) {
  if (i >= parts.size()) throw EngineError("shape", "summand index out of range");
  ObjRef s = sum_obj(parts);
  PComplex sm = materialize(s), pm = materialize(parts[i]);
  PChainMap f;
  f.lo = std::max(sm.lo, pm.lo);
  for (int d = f.lo; d <= std::min(sm.hi(), pm.hi()); ++d) {
    LMat m = lmat_zero(alg_, sm.term(d), pm.term(d));
    size_t off = 0;
    for (size_t j = 0; j < i; ++j) off += materialize(parts[j]).term(d).size();
    for (size_t k = 0; k < pm.term(d).size(); ++k)
      m.at(static_cast<int>(off + k), static_cast<int>(k)) = alg_.vertex_elem(pm.term(d)[k]);
    f.comps.push_back(std::move(m));
  }
  return class_of(parts[i], s, f);
}

Morphism QuiverBackend::projection(const std::vector<ObjRef>& parts, size_t i) {
  if (i >= parts.size()) throw EngineError("shape", "summand index out of range");
  ObjRef s = sum_obj(parts);
  PComplex sm = materialize(s), pm = materialize(parts[i]);
  PChainMap f;
  f.lo = std::max(sm.lo, pm.lo);
  for (int d = f.lo; d <= std::min(sm.hi(), pm.hi()); ++d) {
    LMat m = lmat_zero(alg_, pm.term(d), sm.term(d));
    size_t off = 0;
    for (size_t j = 0; j < i; ++j) off += materialize(parts[j]).term(d).size();
    for (size_t k = 0; k < pm.term(d).size(); ++k)
      m.at(static_cast<int>(k), static_cast<int>(off + k)) = alg_.vertex_elem(pm.term(d)[k]);
    f.comps.push_back(std::move(m));
  }
  return class_of(s, parts[i], f);
}

bool QuiverBackend::object_eq(ObjRef a, ObjRef b) {
  if (entry(a).cx.is_zero() && entry(b).cx.is_zero()) return true;
  return a.id == b.id && a.grade == b.grade;
}

std::string QuiverBackend::describe_object(ObjRef x) {
  const Entry& e = entry(x);
  if (e.cx.is_zero()) return "0";
  std::string grade = x.grade == 0 ? "" : "{S^" + std::to_string(x.grade) + "}";
  if (e.name) return *e.name + grade;
  auto d = decomp_of(x);
  if (d) {
    std::vector<std::string> parts;
    for (const auto& p : *d) {
      std::string s = summands_[static_cast<size_t>(p.first)].name;
      if (p.second != 0) s += "{S^" + std::to_string(p.second) + "}";
      parts.push_back(s);
    }
    return join_names(parts, " (+) ");
  }
  std::ostringstream os;
  os << "cplx" << grade << "[";
  PComplex m = materialize(x);
  for (int deg = m.lo; deg <= m.hi(); ++deg) {
    if (deg > m.lo) os << " | ";
    os << deg << ":";
    for (int v : m.term(deg)) os << " P" << v;
  }
  os << "]";
  return os.str();
}

std::string QuiverBackend::describe_basis_element(const HomSpace& h, int i) {
  const ChainHom& ch = chain_hom(h.src, h.tgt);
  if (i < 0 || i >= ch.rank()) throw EngineError("shape", "basis index out of range");
  const PChainMap& f = ch.class_rep(i);
  std::ostringstream os;
  bool any = false;
  for (size_t k = 0; k < f.comps.size(); ++k) {
    int d = f.lo + static_cast<int>(k);
    const LMat& m = f.comps[k];
    for (size_t r = 0; r < m.rows.size(); ++r)
      for (size_t c = 0; c < m.cols.size(); ++c) {
        const Vec& e = m.at(static_cast<int>(r), static_cast<int>(c));
        if (vec_is_zero(e)) continue;
        if (any) os << "; ";
        os << "deg " << d << " P" << m.cols[c] << "->P" << m.rows[r] << ": "
           << alg_.show_elem(e);
        any = true;
      }
  }
  return any ? os.str() : "0";
}

Morphism QuiverBackend::left_approximation(ObjRef c) {
  PComplex cm = materialize(c);
  if (cm.is_zero()) return zero_mor(c, zero_obj());
  struct Rec {
    int s, k, b;
    PChainMap rep;  // true map materialize(c) -> materialize of the target copy
  };
  std::vector<Rec> recs;
  std::vector<ObjRef> parts;
  for (int s = 0; s < summand_count(); ++s) {
    const PComplex& base = entries_[static_cast<size_t>(summand_objs_[static_cast<size_t>(s)].id)].cx;
    int klo = ceildiv2(cm.lo - base.hi());
    int khi = floordiv2(cm.hi() - base.lo);
    for (int k = klo; k <= khi; ++k) {
      ObjRef tk = suspend_obj(summand_objs_[static_cast<size_t>(s)], k);
      const ChainHom& h = chain_hom(c, tk);
      for (int b = 0; b < h.rank(); ++b) {
        Rec r;
        r.s = s;
        r.k = k;
        r.b = b;
        r.rep = shift_chain_map(h.class_rep(b), 2 * c.grade);
        recs.push_back(std::move(r));
        parts.push_back(tk);
      }
    }
  }
  if (recs.empty()) return zero_mor(c, zero_obj());
  ObjRef t = sum_obj(parts);
  PComplex tm = materialize(t);
  PChainMap f;
  f.lo = std::max(tm.lo, cm.lo);
  for (int d = f.lo; d <= std::min(tm.hi(), cm.hi()); ++d) {
    LMat m = lmat_zero(alg_, tm.term(d), cm.term(d));
    size_t off = 0;
    for (size_t i = 0; i < recs.size(); ++i) {
      PComplex pm = materialize(parts[i]);
      LMat blk = recs[i].rep.comp(alg_, cm, pm, d);
      for (size_t rr = 0; rr < blk.rows.size(); ++rr)
        for (size_t cc = 0; cc < blk.cols.size(); ++cc)
          m.at(static_cast<int>(off + rr), static_cast<int>(cc)) =
              blk.at(static_cast<int>(rr), static_cast<int>(cc));
      off += pm.term(d).size();
    }
    f.comps.push_back(std::move(m));
  }
  Morphism apx = class_of(c, t, f);
  // Every class into a shifted summand must factor through the approximation;
  // by construction the projections recover the chosen basis.
  for (size_t i = 0; i < recs.size(); ++i) {
    Morphism back = compose(projection(parts, i), apx);
    Vec expect(static_cast<size_t>(chain_hom(c, parts[i]).rank()), 0);
    expect[static_cast<size_t>(recs[i].b)] = 1;
    if (back.coords != expect)
      throw EngineError("internal", "approximation fails to recover a basis class");
  }
  return apx;
}

NSeq QuiverBackend::extend(const Morphism& f) {
  if (!decomp_of(f.hom.src) || !decomp_of(f.hom.tgt))
    throw EngineError("shape",
                      "extension endpoints must lie in the additive closure of the family");
  ObjRef x1 = f.hom.src, x2 = f.hom.tgt;
  PComplex z1 = materialize(x1), z2 = materialize(x2);
  ConeData c2 = cone(alg_, z1, z2, rep_of(f));
  ObjRef c2o = register_complex(c2.cx);
  Morphism into_c2 = class_of(x2, c2o, c2.from_target);
  Morphism apx = left_approximation(c2o);
  ObjRef x3 = apx.hom.tgt;
  ConeData c3 = cone(alg_, c2.cx, materialize(x3), rep_of(apx));
  ObjRef x4 = register_complex(c3.cx);
  ObjRef sx1 = suspend_obj(x1, 1);
  Morphism f2 = compose(apx, into_c2);
  Morphism f3 = class_of(x3, x4, c3.from_target);
  PChainMap tail = compose_chain(alg_, c3.cx, shift_pcomplex(alg_, c2.cx, 1),
                                 shift_pcomplex(alg_, z1, 2),
                                 shift_chain_map(c2.to_shifted_src, 1), c3.to_shifted_src);
  Morphism f4 = class_of(x4, sx1, tail);
  NSeq s;
  s.n = 4;
  s.objects = {x1, x2, x3, x4, sx1};
  s.maps = {f, f2, f3, f4};
  // Certify directly (the identity-membership criterion would call back into
  // extend): adjacent composites vanish and the sequence is Yoneda exact.
  for (int i = 0; i + 1 < 4; ++i)
    if (!compose(s.maps[static_cast<size_t>(i + 1)], s.maps[static_cast<size_t>(i)]).is_zero())
      throw EngineError("certification-failed",
                        "extension certification: adjacent composite is nonzero");
  if (!yoneda_exact(*this, s))
    throw EngineError("certification-failed", "extension certification: not-yoneda-exact");
  return s;
}

// ---------------------------------------------------------------------------
// Certification and extension dimensions
// ---------------------------------------------------------------------------

int ext_dim(const QuiverAlgebra& A, const Rep& m, const Rep& n, int i) {
  Resolution rm = projective_resolution(A, m);
  Resolution rn = projective_resolution(A, n);
  return ChainHom::compute(A, rm.cx, shift_pcomplex(A, rn.cx, i)).rank();
}

namespace {

// Basis of module maps between two representations.
std::vector<RepMor> rep_hom_basis(const QuiverAlgebra& A, const Rep& x, const Rep& y) {
  const int V = A.quiver().vertices;
  int dim = 0;
  for (int u = 0; u < V; ++u)
    dim += x.dims[static_cast<size_t>(u)] * y.dims[static_cast<size_t>(u)];
  auto decode = [&](const Vec& coords) {
    RepMor f;
    size_t off = 0;
    for (int u = 0; u < V; ++u) {
      Mat m(A.ring(), y.dims[static_cast<size_t>(u)], x.dims[static_cast<size_t>(u)]);
      for (i64& cell : m.a) cell = coords[off++];
      f.comps.push_back(std::move(m));
    }
    return f;
  };
  std::vector<Vec> rows;
  for (size_t a = 0; a < A.quiver().arrows.size(); ++a) {
    const QuiverArrow& ar = A.quiver().arrows[a];
    int rcount = y.dims[static_cast<size_t>(ar.tgt - 1)] * x.dims[static_cast<size_t>(ar.src - 1)];
    for (int r = 0; r < rcount; ++r) rows.push_back(Vec(static_cast<size_t>(dim), 0));
    size_t base = rows.size() - static_cast<size_t>(rcount);
    for (int j = 0; j < dim; ++j) {
      Vec unit(static_cast<size_t>(dim), 0);
      unit[static_cast<size_t>(j)] = 1;
      RepMor f = decode(unit);
      Mat resid = mat_sub(mat_mul(y.arrows[a], f.comps[static_cast<size_t>(ar.src - 1)]),
                          mat_mul(f.comps[static_cast<size_t>(ar.tgt - 1)], x.arrows[a]));
      for (int r = 0; r < rcount; ++r)
        rows[base + static_cast<size_t>(r)][static_cast<size_t>(j)] = resid.a[static_cast<size_t>(r)];
    }
  }
  Subgroup sols = rows.empty() ? Subgroup::full(A.ring(), dim)
                               : kernel(Mat::from_rows(A.ring(), rows, dim));
  std::vector<RepMor> out;
  for (int i = 0; i < sols.dim(); ++i) out.push_back(decode(sols.basis.row(i)));
  return out;
}

bool reps_isomorphic(const QuiverAlgebra& A, const Rep& x, const Rep& y) {
  if (x.dims != y.dims) return false;
  if (rep_total_dim(x) == 0) return true;
  std::vector<RepMor> basis = rep_hom_basis(A, x, y);
  size_t r = basis.size();
  if (r == 0) return false;
  if (r > 8) throw EngineError("cap", "isomorphism search space too large");
  const i64 p = A.ring().N;
  std::vector<i64> coeff(r, 0);
  while (true) {
    size_t i = 0;
    while (i < r && coeff[i] == p - 1) {
      coeff[i] = 0;
      ++i;
    }
    if (i == r) break;
    ++coeff[i];
    bool all_invertible = true;
    for (int u = 0; u < A.quiver().vertices && all_invertible; ++u) {
      int du = x.dims[static_cast<size_t>(u)];
      if (du == 0) continue;
      Mat h(A.ring(), du, du);
      for (size_t b = 0; b < r; ++b)
        if (coeff[b] != 0)
          h = mat_add(h, mat_scale(coeff[b], basis[b].comps[static_cast<size_t>(u)]));
      if (kernel(h).dim() != 0) all_invertible = false;
    }
    if (all_invertible) return true;
  }
  return false;
}

}  // namespace

CTCertificate certify_cluster_tilting(const QuiverAlgebra& A,
                                      const std::vector<CTSummand>& family,
                                      const std::vector<CTSummand>& indecomposables) {
  std::vector<Resolution> fres;
  for (const CTSummand& s : family) fres.push_back(projective_resolution(A, s.module));
  auto ext1 = [&](const PComplex& a, const PComplex& b) {
    return ChainHom::compute(A, a, shift_pcomplex(A, b, 1)).rank();
  };
  for (const CTSummand& n : indecomposables) {
    Resolution rn = projective_resolution(A, n.module);
    bool in_add = false;
    for (const CTSummand& s : family)
      if (reps_isomorphic(A, n.module, s.module)) in_add = true;
    bool right_vanishes = true, left_vanishes = true;
    for (const Resolution& r : fres) {
      if (ext1(rn.cx, r.cx) != 0) right_vanishes = false;
      if (ext1(r.cx, rn.cx) != 0) left_vanishes = false;
    }
    if (in_add != right_vanishes || in_add != left_vanishes) {
      CTCertificate bad;
      bad.ok = false;
      bad.detail = "module '" + n.name + "': membership " + (in_add ? "yes" : "no") +
                   ", ext-into-family " + (right_vanishes ? "0" : "nonzero") +
                   ", ext-from-family " + (left_vanishes ? "0" : "nonzero");
      return bad;
    }
  }
  CTCertificate ok;
  ok.ok = true;
  ok.detail = "membership matches extension vanishing for " +
              std::to_string(indecomposables.size()) + " indecomposables";
  return ok;
}

// ---------------------------------------------------------------------------
// Filtered-object bracket
// ---------------------------------------------------------------------------

Coset ss_bracket_4(QuiverBackend& B, const DiagramChain& d) {
  check_chain(B, d);
  if (B.seq_length() != 4)
    throw EngineError("shape", "the filtered bracket is implemented for length 4");
  const QuiverAlgebra& A = B.algebra();
  for (int i = 0; i + 1 < 4; ++i)
    if (!B.compose(d.maps[static_cast<size_t>(i + 1)], d.maps[static_cast<size_t>(i)]).is_zero())
      throw EngineError("composite-nonzero",
                        "adjacent composite " + std::to_string(i + 2) + "o" +
                            std::to_string(i + 1) + " is not null-homotopic");

  ObjRef a1 = d.object(0), a2 = d.object(1), a4 = d.object(3), a5 = d.object(4);
  PComplex z1 = B.materialize(a1);
  PComplex z2 = B.materialize(a2);
  PComplex z3 = B.materialize(d.object(2));
  PComplex z4 = B.materialize(a4);
  PComplex z5 = B.materialize(a5);
  PChainMap f1 = B.rep_of(d.maps[0]);
  PChainMap f2 = B.rep_of(d.maps[1]);
  PChainMap f3 = B.rep_of(d.maps[2]);

  // First filtration step: the cone over the third map, with the boundary
  // projection negated so the rotated triangle ends in +f3 shifted.
  ConeData ca = cone(A, z3, z4, f3);
  PChainMap i1 = ca.from_target;                              // Z4 -> Ca
  PChainMap q2 = chain_scale(A, -1, ca.to_shifted_src);       // Ca -> Z3[1]

  // Middle factorization: e2 with (q2 shifted) o e2 ~ f2 shifted twice.
  ObjRef s2 = B.register_complex(shift_pcomplex(A, z2, 2));
  ObjRef s3 = B.register_complex(shift_pcomplex(A, z3, 2));
  ObjRef ca1 = B.register_complex(shift_pcomplex(A, ca.cx, 1));
  PComplex z2s = B.materialize(s2);
  PComplex ca1m = B.materialize(ca1);
  PComplex z3s = B.materialize(s3);
  const ChainHom& he = B.chain_hom(s2, ca1);
  const ChainHom& hc = B.chain_hom(s2, s3);
  PChainMap q2s = shift_chain_map(q2, 1);
  Mat post_q2(A.ring(), hc.rank(), he.rank());
  for (int j = 0; j < he.rank(); ++j) {
    Vec unit(static_cast<size_t>(he.rank()), 0);
    unit[static_cast<size_t>(j)] = 1;
    PChainMap rep = B.rep_of(Morphism{B.hom(s2, ca1), unit});
    PChainMap comp = compose_chain(A, z2s, ca1m, z3s, q2s, rep);
    Vec col = B.class_of(s2, s3, comp).coords;
    for (int r = 0; r < post_q2.rows; ++r) post_q2.at(r, j) = col[static_cast<size_t>(r)];
  }
  Vec rhs_e2 = B.class_of(s2, s3, shift_chain_map(f2, 2)).coords;
  Coset sol_e2 = solve_affine(post_q2, rhs_e2);
  if (sol_e2.is_empty)
    throw EngineError("factorization-missing",
                      "the middle structure map has no factorization");
  PChainMap e2 = B.rep_of(Morphism{B.hom(s2, ca1), sol_e2.rep});  // Z2[2] -> Ca[1]

  // Second filtration step: cone over the desuspended structure map.
  ConeData ce = cone(A, shift_pcomplex(A, z2, 1), ca.cx, shift_chain_map(e2, -1));
  PChainMap i2 = ce.from_target;                               // Ca -> Ce
  PChainMap q3 = chain_scale(A, -1, ce.to_shifted_src);        // Ce -> Z2[2]
  PChainMap sigma = compose_chain(A, z4, ca.cx, ce.cx, i2, i1);

  ObjRef ceo = B.register_complex(ce.cx);
  ObjRef sx1 = B.suspend_obj(a1, 1);
  PComplex sx1m = B.materialize(sx1);
  PComplex cem = B.materialize(ceo);

  // Fillers against the first map: q3 o nu ~ f1 shifted twice.
  const ChainHom& hnu = B.chain_hom(sx1, ceo);
  const ChainHom& hc1 = B.chain_hom(sx1, s2);
  Mat post_q3(A.ring(), hc1.rank(), hnu.rank());
  for (int j = 0; j < hnu.rank(); ++j) {
    Vec unit(static_cast<size_t>(hnu.rank()), 0);
    unit[static_cast<size_t>(j)] = 1;
    PChainMap rep = B.rep_of(Morphism{B.hom(sx1, ceo), unit});
    PChainMap comp = compose_chain(A, sx1m, cem, z2s, q3, rep);
    Vec col = B.class_of(sx1, s2, comp).coords;
    for (int r = 0; r < post_q3.rows; ++r) post_q3.at(r, j) = col[static_cast<size_t>(r)];
  }
  Vec rhs_nu = B.class_of(sx1, s2, shift_chain_map(f1, 2)).coords;
  Coset sol_nu = solve_affine(post_q3, rhs_nu);

  // Fillers against the last map: mu o sigma ~ f4.
  const ChainHom& hmu = B.chain_hom(ceo, a5);
  const ChainHom& hc2 = B.chain_hom(a4, a5);
  Mat pre_sigma(A.ring(), hc2.rank(), hmu.rank());
  for (int j = 0; j < hmu.rank(); ++j) {
    Vec unit(static_cast<size_t>(hmu.rank()), 0);
    unit[static_cast<size_t>(j)] = 1;
    PChainMap rep = B.rep_of(Morphism{B.hom(ceo, a5), unit});
    PChainMap comp = compose_chain(A, z4, cem, z5, rep, sigma);
    Vec col = B.class_of(a4, a5, comp).coords;
    for (int r = 0; r < pre_sigma.rows; ++r) pre_sigma.at(r, j) = col[static_cast<size_t>(r)];
  }
  Coset sol_mu = solve_affine(pre_sigma, d.maps[3].coords);

  const ChainHom& hbr = B.chain_hom(sx1, a5);
  if (sol_nu.is_empty || sol_mu.is_empty) return Coset::empty(A.ring(), hbr.rank());

  PChainMap nu0 = B.rep_of(Morphism{B.hom(sx1, ceo), sol_nu.rep});
  PChainMap mu0 = B.rep_of(Morphism{B.hom(ceo, a5), sol_mu.rep});
  Vec rep0 = B.class_of(sx1, a5, compose_chain(A, sx1m, cem, z5, mu0, nu0)).coords;

  Subgroup g = indeterminacy(B, d.maps[0], d.maps[3]);

  // The full solution set collapses onto rep0 + indeterminacy; check the
  // kernel translates land inside the subgroup.
  auto check_in = [&](const PChainMap& comp) {
    Vec v = B.class_of(sx1, a5, comp).coords;
    if (!g.contains(v))
      throw EngineError("internal", "filtered bracket exceeds its indeterminacy");
  };
  for (int i = 0; i < sol_nu.sub.dim(); ++i) {
    PChainMap nk = B.rep_of(Morphism{B.hom(sx1, ceo), sol_nu.sub.basis.row(i)});
    check_in(compose_chain(A, sx1m, cem, z5, mu0, nk));
    for (int j = 0; j < sol_mu.sub.dim(); ++j) {
      PChainMap mh = B.rep_of(Morphism{B.hom(ceo, a5), sol_mu.sub.basis.row(j)});
      check_in(compose_chain(A, sx1m, cem, z5, mh, nk));
    }
  }
  for (int j = 0; j < sol_mu.sub.dim(); ++j) {
    PChainMap mh = B.rep_of(Morphism{B.hom(ceo, a5), sol_mu.sub.basis.row(j)});
    check_in(compose_chain(A, sx1m, cem, z5, mh, nu0));
  }
  return Coset::of(rep0, g);
}

LawReport ss_compare(QuiverBackend& B, const DiagramChain& d,
                     const std::optional<NSeq>& ext) {
  TodaResult cc = toda_cc(B, d, ext);
  Coset ss = ss_bracket_4(B, d);
  bool holds = coset_eq(cc.bracket, coset_scale(-1, ss));
  std::ostringstream os;
  os << "cofiber bracket " << (cc.bracket.is_empty ? "empty" : "nonempty") << ", filtered bracket "
     << (ss.is_empty ? "empty" : "nonempty") << ", compared with sign -1";
  LawReport out;
  out.law = "filtered-vs-cofiber-sign";
  out.holds = holds;
  out.detail = os.str();
  return out;
}

}  // namespace toda

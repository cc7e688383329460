#pragma once

// Backend: finitely generated free modules over the local ring Z/p^2 with
// the identity suspension and sequences of length n = 4.  A morphism
// R^a -> R^b is a b x a matrix acting on column vectors; the pinned hom
// basis is the list of matrix units in row-major order.

#include "toda/angcat.hpp"

namespace toda {

class FreeLocalBackend final : public Backend {
 public:
  explicit FreeLocalBackend(i64 p);

  i64 p() const { return p_; }
  ObjRef free_obj(int rank) const;

  int seq_length() const override { return 4; }
  Ring ring() const override { return ring_; }
  std::string name() const override;

  HomSpace hom(ObjRef X, ObjRef Y) override;
  Morphism compose(const Morphism& g, const Morphism& f) override;
  Morphism identity(ObjRef X) override;
  ObjRef suspend_obj(ObjRef X, int k = 1) override;
  Mat suspend_matrix(ObjRef X, ObjRef Y) override;
  NSeq extend(const Morphism& f) override;
  std::vector<ObjRef> generators() override;
  std::pair<int, int> hom_window(ObjRef A, ObjRef X) override;
  ObjRef zero_obj() override;
  ObjRef sum_obj(const std::vector<ObjRef>& parts) override;
  Morphism inclusion(const std::vector<ObjRef>& parts, size_t i) override;
  Morphism projection(const std::vector<ObjRef>& parts, size_t i) override;
  bool object_eq(ObjRef a, ObjRef b) override;
  std::string describe_object(ObjRef X) override;
  std::string describe_basis_element(const HomSpace& h, int i) override;

  Mat matrix_of(const Morphism& m) const;
  Morphism from_matrix(ObjRef src, ObjRef tgt, const Mat& M);

  // Invertible U (rows), V (columns) with U * M * V diagonal; the diagonal
  // carries first 1s, then the maximal-ideal generator p, then 0s.
  struct NormalForm {
    Mat U, V, D;
    int units = 0, radicals = 0, zeros = 0;  // paired diagonal slots by kind
  };
  NormalForm local_normal_form(const Mat& M) const;

 private:
  i64 p_;
  Ring ring_;
};

}  // namespace toda

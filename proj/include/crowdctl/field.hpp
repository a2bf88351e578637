#pragma once

#include "crowdctl/types.hpp"

#include <Eigen/SVD>

namespace crowdctl {

/// Autonomous velocity field x -> A x + b on R^d.
///
/// Constant fields are the affine case with a zero matrix; `kind()` only
/// records how the field was declared so that it serializes back the same way.
template <typename Scalar>
class VectorFieldT {
 public:
  enum class Kind { Constant, Affine };

  VectorFieldT() = default;

  static VectorFieldT constant(const Vec<Scalar>& value) {
    VectorFieldT f;
    f.kind_ = Kind::Constant;
    f.matrix_ = Mat<Scalar>::Zero(value.size(), value.size());
    f.offset_ = value;
    return f;
  }

  static VectorFieldT affine(const Mat<Scalar>& matrix, const Vec<Scalar>& offset) {
    VectorFieldT f;
    f.kind_ = Kind::Affine;
    f.matrix_ = matrix;
    f.offset_ = offset;
    return f;
  }

  /// Rigid rotation (-y, x) about the origin in the plane.
  static VectorFieldT rotation() {
    Mat<Scalar> m(2, 2);
    m << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
    return affine(m, Vec<Scalar>::Zero(2));
  }

  Kind kind() const { return kind_; }
  Index dimension() const { return offset_.size(); }
  const Mat<Scalar>& matrix() const { return matrix_; }
  const Vec<Scalar>& offset() const { return offset_; }

  template <typename Derived>
  Vec<Scalar> operator()(const Eigen::MatrixBase<Derived>& x) const {
    if (kind_ == Kind::Constant) return offset_;
    return matrix_ * x + offset_;
  }

  /// Spectral norm of the matrix.
  Scalar lipschitz_constant() const {
    if (kind_ == Kind::Constant || matrix_.size() == 0) return Scalar(0);
    Eigen::JacobiSVD<Mat<Scalar>> svd(matrix_);
    return svd.singularValues()(0);
  }

  /// Field with the opposite sign; its flow is the backward flow of this one.
  VectorFieldT reversed() const {
    VectorFieldT f = *this;
    f.matrix_ = -matrix_;
    f.offset_ = -offset_;
    return f;
  }

 private:
  Kind kind_ = Kind::Constant;
  Mat<Scalar> matrix_;
  Vec<Scalar> offset_;
};

using VectorField = VectorFieldT<double>;

}  // namespace crowdctl

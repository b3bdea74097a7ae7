#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace hcr {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Vec2 = Vector2<double>;
using Mat2 = Matrix2<double>;

/// Quarter turn clockwise, (x, y) -> (y, -x).
template <typename Derived>
Vector2<typename Derived::Scalar> rotate_cw(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 2);
  return Vector2<typename Derived::Scalar>(v.y(), -v.x());
}

/// Unit vector at angle psi + psi0.
template <typename Scalar>
Vector2<Scalar> polar_dir(Scalar psi, Scalar psi0 = Scalar(0)) {
  using std::cos;
  using std::sin;
  return Vector2<Scalar>(cos(psi + psi0), sin(psi + psi0));
}

/// z-component of the planar cross product.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cross2(const Eigen::MatrixBase<DerivedA>& a,
                                 const Eigen::MatrixBase<DerivedB>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Maps an angle into [0, 2*pi).
template <typename Scalar>
Scalar wrap_to_2pi(Scalar angle) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar a = std::fmod(angle, two_pi);
  if (a < Scalar(0)) a += two_pi;
  if (a >= two_pi) a -= two_pi;
  return a;
}

/// Maps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_to_pi(Scalar angle) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar a = wrap_to_2pi(angle);
  if (a > pi) a -= Scalar(2) * pi;
  return a;
}

/// Polar angle of v in [0, 2*pi).
template <typename Derived>
typename Derived::Scalar heading_of(const Eigen::MatrixBase<Derived>& v) {
  using std::atan2;
  return wrap_to_2pi(atan2(v.y(), v.x()));
}

/// Tolerances shared by every solver and predicate in the library.
struct NumericConfig {
  double eps_active = 1e-7;  ///< |f_i(x_I)| below this marks constraint i active
  double eps_dist = 1e-9;    ///< iterative solver convergence threshold
  int max_iter = 10000;

  /// Throws Error(InvalidArgument) unless every field is strictly positive.
  void validate() const;
};

}  // namespace hcr

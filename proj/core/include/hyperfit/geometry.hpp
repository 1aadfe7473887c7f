#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace hyperfit {

using Vector = Eigen::VectorXd;

/// A point in dim-dimensional Euclidean space.
using Point = Eigen::VectorXd;

/// n points stored row-wise (n x dim). Row-major so each point is contiguous.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Hyperplane {x : normal . x = offset}.
///
/// The canonical form has a unit normal and a nonnegative offset; every
/// routine in the library returns canonical hyperplanes. Use canonicalize()
/// on anything built by hand.
struct Hyperplane {
  Vector normal;
  double offset = 0.0;

  Eigen::Index dim() const { return normal.size(); }
};

/// Spherical angles of a unit normal. angles[0] lies in [-pi, pi], the rest in
/// [-pi/2, pi/2]. `underdetermined[k]` marks an angle that is not fixed by the
/// normal (pole degeneracy) and was set to the canonical value 0.
struct AngleCoords {
  std::vector<double> angles;
  std::vector<bool> underdetermined;

  bool degenerate() const;
};

/// Throws DimensionError unless dim >= 2, and NumericalError on a non-finite
/// coordinate.
void validate_points(const PointSet& points);

/// |normal . x - offset|.
double distance(const Eigen::Ref<const Vector>& x, const Hyperplane& h);

/// Distances of every point to `h`.
Vector distances(const PointSet& points, const Hyperplane& h);

/// The point offset * normal: the closest point of `h` to the origin.
Vector hbar(const Hyperplane& h);

/// Unit normal from spherical angles. Out-of-range input is wrapped into
/// [-pi, pi] for the first angle and clamped into [-pi/2, pi/2] for the rest.
Vector angles_to_normal(std::span<const double> angles);

/// Inverse of angles_to_normal for a unit vector of dimension >= 2.
AngleCoords normal_to_angles(const Eigen::Ref<const Vector>& normal);

/// Rescales the normal to unit length and flips the sign of (normal, offset)
/// when the offset is negative. Throws NumericalError for a zero normal.
Hyperplane canonicalize(Hyperplane h);

/// Builds a canonical hyperplane from the coefficient form {x : a . x + b = 0}.
Hyperplane from_coefficients(const Eigen::Ref<const Vector>& a, double b);

/// Unit normal within `tol` and offset >= 0.
bool is_canonical(const Hyperplane& h, double tol = 1e-12);

/// Smallest angle between two lines through the origin spanned by `a` and `b`,
/// i.e. the angle between a and +-b, in radians.
double axis_angle(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

}  // namespace hyperfit

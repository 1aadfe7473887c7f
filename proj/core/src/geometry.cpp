#include "hyperfit/geometry.hpp"

#include "hyperfit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hyperfit {

bool AngleCoords::degenerate() const {
  return std::any_of(underdetermined.begin(), underdetermined.end(), [](bool b) { return b; });
}

void validate_points(const PointSet& points) {
  if (points.rows() == 0) return;
  if (points.cols() < 2) {
    throw DimensionError("points must have dimension >= 2, got " + std::to_string(points.cols()));
  }
  if (!points.allFinite()) throw NumericalError("point coordinates must be finite");
}

double distance(const Eigen::Ref<const Vector>& x, const Hyperplane& h) {
  if (x.size() != h.normal.size()) {
    throw DimensionError("point has dimension " + std::to_string(x.size()) + ", hyperplane " +
                         std::to_string(h.normal.size()));
  }
  return std::abs(h.normal.dot(x) - h.offset);
}

Vector distances(const PointSet& points, const Hyperplane& h) {
  if (points.cols() != h.normal.size()) {
    throw DimensionError("points have dimension " + std::to_string(points.cols()) + ", hyperplane " +
                         std::to_string(h.normal.size()));
  }
  return ((points * h.normal).array() - h.offset).abs().matrix();
}

Vector hbar(const Hyperplane& h) { return h.offset * h.normal; }

Vector angles_to_normal(std::span<const double> angles) {
  const auto dim = static_cast<Eigen::Index>(angles.size()) + 1;
  std::vector<double> theta(angles.begin(), angles.end());
  if (!theta.empty()) theta[0] = std::remainder(theta[0], 2.0 * std::numbers::pi);
  for (std::size_t k = 1; k < theta.size(); ++k) {
    theta[k] = std::clamp(theta[k], -std::numbers::pi / 2, std::numbers::pi / 2);
  }

  // n_k = sin(theta_{k-1}) * prod_{i >= k} cos(theta_i), n_0 = prod_i cos(theta_i).
  Vector n(dim);
  double suffix = 1.0;
  for (Eigen::Index k = dim - 1; k >= 1; --k) {
    const double t = theta[static_cast<std::size_t>(k - 1)];
    n(k) = std::sin(t) * suffix;
    suffix *= std::cos(t);
  }
  n(0) = suffix;
  return n;
}

AngleCoords normal_to_angles(const Eigen::Ref<const Vector>& normal) {
  const Eigen::Index dim = normal.size();
  if (dim < 2) throw DimensionError("normal_to_angles needs dimension >= 2");
  const double norm = normal.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("normal_to_angles: zero or non-finite vector");
  const Vector n = normal / norm;

  AngleCoords out;
  out.angles.resize(static_cast<std::size_t>(dim - 1));
  out.underdetermined.assign(static_cast<std::size_t>(dim - 1), false);

  // prefix(i) = |(n_0, ..., n_{i-1})|
  std::vector<double> prefix(static_cast<std::size_t>(dim + 1), 0.0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    prefix[static_cast<std::size_t>(i + 1)] = std::hypot(prefix[static_cast<std::size_t>(i)], n(i));
  }

  out.angles[0] = std::atan2(n(1), n(0));
  for (Eigen::Index i = 1; i < dim - 1; ++i) {
    out.angles[static_cast<std::size_t>(i)] = std::atan2(n(i + 1), prefix[static_cast<std::size_t>(i + 1)]);
  }
  for (Eigen::Index j = 0; j < dim - 1; ++j) {
    if (prefix[static_cast<std::size_t>(j + 2)] == 0.0) {
      out.angles[static_cast<std::size_t>(j)] = 0.0;
      out.underdetermined[static_cast<std::size_t>(j)] = true;
    }
  }
  return out;
}

Hyperplane canonicalize(Hyperplane h) {
  const double norm = h.normal.norm();
  if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(h.offset)) {
    throw NumericalError("cannot canonicalize a hyperplane with a zero or non-finite normal");
  }
  h.normal /= norm;
  h.offset /= norm;
  if (h.offset < 0.0) {
    h.normal = -h.normal;
    h.offset = -h.offset;
  }
  if (h.offset == 0.0) h.offset = 0.0;  // drop a negative zero
  return h;
}

Hyperplane from_coefficients(const Eigen::Ref<const Vector>& a, double b) {
  return canonicalize(Hyperplane{a, -b});
}

bool is_canonical(const Hyperplane& h, double tol) {
  return std::abs(h.normal.norm() - 1.0) <= tol && h.offset >= 0.0;
}

double axis_angle(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  const Vector ua = a.normalized();
  const Vector ub = b.normalized();
  const double c = ua.dot(ub);
  const double s = (ua - c * ub).norm();
  return std::atan2(s, std::abs(c));
}

}  // namespace hyperfit

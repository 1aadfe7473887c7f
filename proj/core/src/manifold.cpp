#include "hyperfit/manifold.hpp"

#include "hyperfit/error.hpp"

#include <cmath>
#include <string>

namespace hyperfit {
namespace {

void check_inputs(const PointSet& points, const Eigen::Ref<const Vector>& weights) {
  if (weights.size() != points.rows()) {
    throw DimensionError("got " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(points.rows()) + " points");
  }
  if (weights.size() > 0 && weights.minCoeff() < 0.0) throw ConfigError("weights must be nonnegative");
  if (!(weights.sum() > 0.0)) throw NumericalError("weights sum to zero");
}

void check_normal(const PointSet& points, const Eigen::Ref<const Vector>& n) {
  if (n.size() != points.cols()) {
    throw DimensionError("normal has dimension " + std::to_string(n.size()) + ", points " +
                         std::to_string(points.cols()));
  }
}

}  // namespace

void DescentConfig::validate() const {
  if (!(grad_tol > 0.0)) throw ConfigError("descent grad_tol must be positive");
  if (max_iters <= 0) throw ConfigError("descent max_iters must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) throw ConfigError("backtrack_factor must lie in (0, 1)");
  if (!(initial_step > 0.0)) throw ConfigError("initial_step must be positive");
}

TangentVector project_tangent(const Eigen::Ref<const Vector>& n, const Eigen::Ref<const Vector>& e) {
  if (n.size() != e.size()) throw DimensionError("project_tangent: dimension mismatch");
  return TangentVector{n, e - e.dot(n) * n};
}

Vector retract(const TangentVector& v) {
  if (v.at.size() != v.vec.size()) throw DimensionError("retract: dimension mismatch");
  Vector moved = v.at + v.vec;
  const double norm = moved.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw NumericalError("retraction overshot to the antipode; shrink the step");
  }
  return moved / norm;
}

double objective(const PointSet& points, const Eigen::Ref<const Vector>& weights,
                 const Eigen::Ref<const Vector>& n) {
  check_inputs(points, weights);
  check_normal(points, n);
  const double total = weights.sum();
  const Vector proj = points * n;
  const double mean = weights.dot(proj) / total;
  return weights.dot((proj.array() - mean).square().matrix()) / total;
}

Vector euclidean_gradient(const PointSet& points, const Eigen::Ref<const Vector>& weights,
                          const Eigen::Ref<const Vector>& n) {
  check_inputs(points, weights);
  check_normal(points, n);
  const double total = weights.sum();
  const Vector proj = points * n;
  const double mean = weights.dot(proj) / total;
  const Eigen::RowVectorXd centroid = weights.transpose() * points / total;
  const Vector scaled = (weights.array() * (proj.array() - mean)).matrix();
  return 2.0 * (points.rowwise() - centroid).transpose() * scaled / total;
}

Vector euclidean_gradient_unweighted(const PointSet& points, const Eigen::Ref<const Vector>& n) {
  check_normal(points, n);
  const auto card = static_cast<double>(points.rows());
  if (card == 0.0) throw NumericalError("gradient of an empty cluster");
  const Vector proj = points * n;
  const double mean = proj.sum() / card;
  const Eigen::RowVectorXd centroid = points.colwise().sum() / card;
  return 2.0 * (points.rowwise() - centroid).transpose() * (proj.array() - mean).matrix() / card;
}

Eigen::MatrixXd weighted_scatter(const PointSet& points, const Eigen::Ref<const Vector>& weights) {
  check_inputs(points, weights);
  const double total = weights.sum();
  const Eigen::RowVectorXd centroid = weights.transpose() * points / total;
  const Eigen::MatrixXd centred = points.rowwise() - centroid;
  Eigen::MatrixXd scatter = centred.transpose() * weights.asDiagonal() * centred / total;
  return 0.5 * (scatter + scatter.transpose());
}

namespace {

// The objective along the retraction curve t -> retract(n - t g) is
//   (a + 2bt + ct^2) / (1 + q t^2),  u = -g, a = n'Sn, b = n'Su, c = u'Su, q = |u|^2.
// Differences are evaluated from these coefficients: once |g|^2 falls below the
// rounding of f, comparing two evaluations of f no longer orders the iterates.
struct CurveModel {
  double b = 0.0;
  double curv = 0.0;  // c - a q
  double q = 0.0;

  // b = n'Su = (Sn - an)'u = -|g|^2 / 2; using the identity keeps b free of the
  // a (n . g) rounding term, which is as large as |g|^2 near convergence.
  CurveModel(const Eigen::MatrixXd& scatter, const Vector& rgrad, double a) {
    q = rgrad.squaredNorm();
    b = -0.5 * q;
    curv = rgrad.dot(scatter * rgrad) - a * q;
  }

  double decrease(double t) const { return t * (2.0 * b + curv * t) / (1.0 + q * t * t); }

  // Stationary point of the curve for t > 0; `fallback` if it is not finite.
  double minimiser(double fallback) const {
    const double t = -2.0 * b / (curv + std::sqrt(curv * curv + 4.0 * b * b * q));
    return std::isfinite(t) && t > 0.0 ? t : fallback;
  }
};

}  // namespace

DescentResult descend(const PointSet& points, const Eigen::Ref<const Vector>& weights,
                      const Eigen::Ref<const Vector>& n0, const DescentConfig& cfg,
                      const DescentObserver& observer) {
  cfg.validate();
  check_normal(points, n0);
  const Eigen::MatrixXd scatter = weighted_scatter(points, weights);

  DescentResult result;
  const double n0_norm = n0.norm();
  if (!(n0_norm > 0.0)) throw NumericalError("descend: zero starting vector");
  result.normal = n0 / n0_norm;

  // Isotropic scatter: the objective is constant on the sphere.
  const auto dim = static_cast<double>(scatter.rows());
  const double mean_eig = scatter.trace() / dim;
  const Eigen::MatrixXd anisotropy = scatter - mean_eig * Eigen::MatrixXd::Identity(scatter.rows(), scatter.cols());
  if (anisotropy.norm() <= 1e-12 * scatter.norm()) {
    result.objective = mean_eig;
    result.converged = true;
    result.degenerate = true;
    return result;
  }

  Vector& n = result.normal;
  double f = n.dot(scatter * n);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Vector egrad = 2.0 * scatter * n;
    const Vector rgrad = egrad - egrad.dot(n) * n;
    const double gnorm2 = rgrad.squaredNorm();
    result.gradient_norm = std::sqrt(gnorm2);
    if (result.gradient_norm <= cfg.grad_tol) {
      result.converged = true;
      break;
    }

    const CurveModel curve(scatter, rgrad, f);
    double step = cfg.exact_trial ? curve.minimiser(cfg.initial_step) : cfg.initial_step;
    bool accepted = false;
    Vector candidate;
    for (int backtrack = 0; backtrack < 80; ++backtrack, step *= cfg.backtrack_factor) {
      if (curve.decrease(step) <= -cfg.armijo_c * step * gnorm2) {
        candidate = retract(TangentVector{n, -step * rgrad});
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no representable decrease left

    n = candidate;
    f = n.dot(scatter * n);
    result.iterations = iter + 1;
    if (observer) observer(result.iterations, n, f);
  }
  if (!result.converged) {
    const Vector egrad = 2.0 * scatter * n;
    result.gradient_norm = (egrad - egrad.dot(n) * n).norm();
    result.converged = result.gradient_norm <= cfg.grad_tol;
  }
  result.objective = f;
  return result;
}

}  // namespace hyperfit

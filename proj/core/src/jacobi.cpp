#include "hyperfit/error.hpp"
#include "hyperfit/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hyperfit {

SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& symmetric, int max_sweeps) {
  const Eigen::Index n = symmetric.rows();
  if (symmetric.cols() != n) throw DimensionError("jacobi_eigen needs a square matrix");

  Eigen::MatrixXd a = 0.5 * (symmetric + symmetric.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  SymmetricEigen out;

  const double scale = a.norm();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= std::pow(1e-17 * scale, 2) || off == 0.0) break;
    out.sweeps = sweep + 1;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle phi with cot(2 phi) = theta; t = tan(phi) is the smaller root.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = a(k, p);
          const double y = a(k, q);
          a(k, p) = c * x - s * y;
          a(k, q) = s * x + c * y;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = a(p, k);
          const double y = a(q, k);
          a(p, k) = c * x - s * y;
          a(q, k) = s * x + c * y;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = v(k, p);
          const double y = v(k, q);
          v(k, p) = c * x - s * y;
          v(k, q) = s * x + c * y;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

OracleResult min_eigvec_oracle(const PointSet& points, const Eigen::Ref<const Vector>& weights) {
  const Eigen::Index count = points.rows();
  const Eigen::Index dim = points.cols();
  if (weights.size() != count) throw DimensionError("min_eigvec_oracle: weights/points length mismatch");

  // Scatter assembled with plain loops so the oracle shares no code with descend().
  double total = 0.0;
  std::vector<double> centroid(static_cast<std::size_t>(dim), 0.0);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (weights(i) < 0.0) throw ConfigError("weights must be nonnegative");
    total += weights(i);
    for (Eigen::Index k = 0; k < dim; ++k) centroid[static_cast<std::size_t>(k)] += weights(i) * points(i, k);
  }
  if (!(total > 0.0)) throw NumericalError("weights sum to zero");
  for (double& c : centroid) c /= total;

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double dr = points(i, r) - centroid[static_cast<std::size_t>(r)];
      for (Eigen::Index c = r; c < dim; ++c) {
        scatter(r, c) += weights(i) * dr * (points(i, c) - centroid[static_cast<std::size_t>(c)]);
      }
    }
  }
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = r; c < dim; ++c) {
      scatter(r, c) /= total;
      scatter(c, r) = scatter(r, c);
    }
  }

  const SymmetricEigen eig = jacobi_eigen(scatter);
  OracleResult out;
  out.eigenvalues = eig.values;
  out.normal = eig.vectors.col(0);
  Eigen::Index lead = 0;
  out.normal.cwiseAbs().maxCoeff(&lead);
  if (out.normal(lead) < 0.0) out.normal = -out.normal;
  out.eigen_gap = dim > 1 ? eig.values(1) - eig.values(0) : 0.0;
  const double spread = std::max(std::abs(eig.values(dim - 1)), std::abs(eig.values(0)));
  out.degenerate = spread == 0.0 || out.eigen_gap <= 1e-8 * spread;
  return out;
}

}  // namespace hyperfit

#include "walklab/linalg.hpp"

#include <cmath>
#include <vector>

namespace walklab {

EigenEstimate dense_top(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto last = a.rows() - 1;
  EigenEstimate out;
  out.value = es.eigenvalues()(last);
  Eigen::VectorXd y = es.eigenvectors().col(last);
  out.residual = (a * y - out.value * y).norm();
  out.converged = true;
  out.iterations = 1;
  return out;
}

EigenEstimate lanczos_top(const MatVec& apply, std::size_t n, const LanczosOptions& options) {
  EigenEstimate best;
  if (n == 0) return best;
  const int m_max = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(options.krylov_dim)));
  Eigen::VectorXd start = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  start.normalize();

  std::vector<Eigen::VectorXd> basis;
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    basis.assign(1, start);
    std::vector<double> alpha;
    std::vector<double> beta;
    double last_beta = 0;
    for (int j = 0; j < m_max; ++j) {
      apply(basis[static_cast<std::size_t>(j)], w);
      alpha.push_back(basis[static_cast<std::size_t>(j)].dot(w));
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) w -= q.dot(w) * q;
      }
      last_beta = w.norm();
      if (j + 1 == m_max || last_beta < 1e-14) break;
      beta.push_back(last_beta);
      basis.push_back(w / last_beta);
    }
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd off = beta.empty() ? Eigen::VectorXd() : Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, off);
    const double theta = tri.eigenvalues()(k - 1);
    const Eigen::VectorXd s = tri.eigenvectors().col(k - 1);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < k; ++i) y += s(i) * basis[static_cast<std::size_t>(i)];
    y.normalize();
    apply(y, w);
    const double residual = (w - theta * y).norm();
    best.value = theta;
    best.residual = residual;
    best.iterations = restart + 1;

    const double scale = options.scale ? options.scale(theta) : std::abs(theta);
    const double gap = k > 1 ? theta - tri.eigenvalues()(k - 2) : 0.0;
    const double bound = gap > 0 ? std::min(residual, residual * residual / gap) : residual;
    if (bound <= options.rel_tol * scale || last_beta < 1e-14) {
      best.converged = true;
      return best;
    }
    start = y;
  }
  return best;
}

}  // namespace walklab

#include "greenlab/fit.hpp"

namespace greenlab {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& weights) {
  const std::size_t n = x.size();
  require(n == y.size() && n >= 2, ErrorKind::InsufficientData, "fit_line: need at least 2 points");
  require(weights.empty() || weights.size() == n, ErrorKind::Parameter, "fit_line: weight count mismatch");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n), w = Eigen::VectorXd::Ones(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!weights.empty()) w[i] = weights[i];
    A(i, 0) = 1.0;
    A(i, 1) = x[i];
    b[i] = y[i];
  }
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd Aw = sw.asDiagonal() * A;
  const Eigen::VectorXd bw = sw.asDiagonal() * b;
  const Eigen::Vector2d beta = Aw.colPivHouseholderQr().solve(bw);
  LinearFit f;
  f.intercept = beta[0];
  f.slope = beta[1];
  f.n = static_cast<int>(n);
  const Eigen::VectorXd res = b - A * beta;
  const double ybar = (w.array() * b.array()).sum() / w.sum();
  const double ss_res = (w.array() * res.array().square()).sum();
  const double ss_tot = (w.array() * (b.array() - ybar).square()).sum();
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (n > 2) {
    const double xbar = (w.array() * A.col(1).array()).sum() / w.sum();
    const double sxx = (w.array() * (A.col(1).array() - xbar).square()).sum();
    f.slope_stderr = sxx > 0 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  }
  return f;
}

LinearFit fit_power_decay(const std::vector<double>& r, const std::vector<double>& v) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.size(); ++i) {
    require(r[i] > 0, ErrorKind::Data, "fit_power_decay: radii must be positive");
    if (std::abs(v[i]) <= 0) continue;
    lx.push_back(std::log(r[i]));
    ly.push_back(std::log(std::abs(v[i])));
  }
  return fit_line(lx, ly);
}

Complex neville_extrapolate(const std::vector<double>& h, const std::vector<Complex>& f,
                            std::vector<double>* residuals) {
  const std::size_t n = h.size();
  require(n == f.size() && n >= 1, ErrorKind::InsufficientData, "neville_extrapolate: empty data");
  std::vector<Complex> p(f);
  std::vector<Complex> diag{p[0]};
  // After pass m, p[i] holds the interpolant through nodes i..i+m evaluated at 0.
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
    diag.push_back(p[0]);
  }
  if (residuals) {
    residuals->clear();
    for (std::size_t i = 1; i < diag.size(); ++i) residuals->push_back(std::abs(diag[i] - diag[i - 1]));
  }
  return diag.back();
}

}  // namespace greenlab

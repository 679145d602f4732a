#include "metapop/equilibria.hpp"
#include "metapop/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace metapop {

namespace {

constexpr double kMaxCondition = 1e14;

double free_norm2(const Vec3& f, const Support& support) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (support[i]) s += f(i) * f(i);
  }
  return std::sqrt(s);
}

}  // namespace

Support support_of(const Vec3& point) { return {point(0) > 0.0, point(1) > 0.0, point(2) > 0.0}; }

NewtonResult newton_solve(const ModelParams& params, const Vec3& start, const Support& support, double tol,
                          int max_iter) {
  std::array<int, 3> idx{};
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    if (support[i]) idx[n++] = i;
  }

  NewtonResult res;
  Vec3 x = start;
  for (int i = 0; i < 3; ++i) {
    if (!support[i]) x(i) = 0.0;
    else if (!(x(i) > 0.0)) {
      res.status = NewtonStatus::Stalled;
      res.point = x;
      return res;
    }
  }

  Vec3 f = rhs(params, x);
  for (int it = 0; it <= max_iter; ++it) {
    res.iterations = it;
    res.point = x;
    res.residual = f.cwiseAbs().maxCoeff();
    double free_res = 0.0;
    for (int a = 0; a < n; ++a) free_res = std::max(free_res, std::abs(f(idx[a])));
    if (free_res <= tol) {
      res.status = res.residual <= tol ? NewtonStatus::Converged : NewtonStatus::NotEquilibrium;
      return res;
    }
    if (it == max_iter) break;

    const Mat3 jac = jacobian(params, x);
    Eigen::MatrixXd sub(n, n);
    Eigen::VectorXd rhs_sub(n);
    for (int a = 0; a < n; ++a) {
      rhs_sub(a) = -f(idx[a]);
      for (int b = 0; b < n; ++b) sub(a, b) = jac(idx[a], idx[b]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(n - 1) > 0.0) || sv(0) / sv(n - 1) > kMaxCondition) {
      res.status = NewtonStatus::Singular;
      return res;
    }
    const Eigen::VectorXd step_sub = svd.solve(rhs_sub);
    Vec3 step = Vec3::Zero();
    for (int a = 0; a < n; ++a) step(idx[a]) = step_sub(a);

    double alpha = 1.0;
    auto inside = [&](double a) {
      for (int b = 0; b < n; ++b) {
        if (!(x(idx[b]) + a * step(idx[b]) > 0.0)) return false;
      }
      return true;
    };
    while (!inside(alpha) && alpha > 1e-14) alpha *= 0.5;
    if (!inside(alpha)) {
      res.status = NewtonStatus::Stalled;
      return res;
    }

    const double norm0 = free_norm2(f, support);
    Vec3 trial = x + alpha * step;
    Vec3 f_trial = rhs(params, trial);
    while (free_norm2(f_trial, support) > (1.0 - 1e-4 * alpha) * norm0 && alpha > 1e-12) {
      alpha *= 0.5;
      trial = x + alpha * step;
      f_trial = rhs(params, trial);
    }
    if (free_norm2(f_trial, support) >= norm0) {
      res.status = NewtonStatus::Stalled;
      return res;
    }
    x = trial;
    f = f_trial;
  }
  res.status = NewtonStatus::MaxIterations;
  return res;
}

EquilibriumRecord newton_coexistence(const ModelParams& params, const ModelState& start, double tol, int max_iter) {
  if (!(tol > 0.0)) throw PreconditionError("newton_coexistence: tol must be positive");
  if (!((start.array() > 0.0).all())) throw PreconditionError("newton_coexistence: start must be strictly positive");

  const NewtonResult res = newton_solve(params, start, kInterior, tol, max_iter);
  switch (res.status) {
    case NewtonStatus::Converged: break;
    case NewtonStatus::Singular: {
      std::ostringstream os;
      os << "newton_coexistence: Jacobian numerically singular at (" << res.point.transpose() << ")";
      throw SingularJacobianError(os.str());
    }
    default: {
      std::ostringstream os;
      os << "newton_coexistence: no convergence after " << res.iterations << " iterations, residual "
         << res.residual;
      throw NonConvergenceError(os.str());
    }
  }
  EquilibriumRecord rec;
  rec.point = res.point;
  rec.label = EqLabel::Coex;
  rec.feasible = (res.point.array() > 0.0).all();
  rec.residual = res.residual;
  return rec;
}

}  // namespace metapop

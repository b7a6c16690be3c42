#include "cartan/chart_calculus.hpp"

#include "cartan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cartan {

bool Box::contains(const Vec& x, double margin) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] + margin || x[i] > upper[i] - margin) return false;
  }
  return true;
}

Box Box::cube(int dim, double half_width) {
  return Box{Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width)};
}

Box Box::centered(const Vec& center, double half_width) {
  return Box{center.array() - half_width, center.array() + half_width};
}

void require_finite(const Vec& x, const char* what) {
  if (!x.allFinite()) throw NonFiniteError(std::string("non-finite values in ") + what);
}

void require_finite(const Mat& x, const char* what) {
  if (!x.allFinite()) throw NonFiniteError(std::string("non-finite values in ") + what);
}

namespace {

// Central stencil applied to f(x + s*v).
Vec stencil(const VectorFn& f, const Vec& x, const Vec& v, const DiffOptions& opts) {
  const double h = opts.step;
  if (opts.order == 4) {
    const Vec f2p = f(x + 2.0 * h * v);
    const Vec f1p = f(x + h * v);
    const Vec f1m = f(x - h * v);
    const Vec f2m = f(x - 2.0 * h * v);
    return (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
  }
  const Vec fp = f(x + h * v);
  const Vec fm = f(x - h * v);
  return (fp - fm) / (2.0 * h);
}

}  // namespace

Mat jacobian_fd(const VectorFn& f, const Vec& x, const DiffOptions& opts) {
  const Eigen::Index n = x.size();
  Mat jac;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec col = stencil(f, x, Vec::Unit(n, i), opts);
    if (i == 0) jac.resize(col.size(), n);
    jac.col(i) = col;
  }
  if (n == 0) jac.resize(f(x).size(), 0);
  require_finite(jac, "finite-difference jacobian");
  return jac;
}

Vec directional_fd(const VectorFn& f, const Vec& x, const Vec& v, const DiffOptions& opts) {
  Vec d = stencil(f, x, v, opts);
  require_finite(d, "directional derivative");
  return d;
}

Vec curve_derivative(const std::function<Vec(double)>& c, double t, const DiffOptions& opts) {
  const VectorFn lifted = [&c](const Vec& s) { return c(s[0]); };
  Vec t0(1);
  t0[0] = t;
  return directional_fd(lifted, t0, Vec::Ones(1), opts);
}

Mat differentiate(const ChartMap& f, const Vec& x, const DiffOptions& opts) {
  if (x.size() != f.dim_in) throw DomainError("differentiate: dimension mismatch");
  if (f.domain) {
    const double reach = opts.order == 4 ? 2.0 * opts.step : opts.step;
    if (!f.domain->contains(x, reach)) {
      throw DomainError("differentiate: point closer than one step to the domain boundary");
    }
  }
  if (opts.prefer_analytic && f.has_jacobian()) {
    Mat j = f.jacobian(x);
    require_finite(j, "analytic jacobian");
    return j;
  }
  const VectorFn checked = [&f](const Vec& y) {
    Vec out = f.eval(y);
    require_finite(out, "chart map evaluation");
    return out;
  };
  return jacobian_fd(checked, x, opts);
}

int rk4_steps_for(double duration) {
  const double steps = std::ceil(std::abs(duration) / kMaxRk4Step - 1e-12);
  return std::max(1, static_cast<int>(steps));
}

Vec flow_time(const TimeVectorField& field, const Vec& x0, double t0, double t1, int steps,
              const Box* box) {
  if (steps < 1) throw DomainError("flow: steps must be >= 1");
  const double dt = (t1 - t0) / steps;
  Vec x = x0;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const Vec k1 = field(t, x);
    const Vec k2 = field(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Vec k3 = field(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Vec k4 = field(t + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + (i + 1) * dt;
    if (!x.allFinite()) throw NonFiniteError("flow: trajectory became non-finite");
    if (box != nullptr && !box->contains(x)) {
      throw NonFiniteError("flow: trajectory left the chart box");
    }
  }
  return x;
}

Vec flow(const VectorField& field, const Vec& x0, double t, int steps, const Box* box) {
  return flow_time([&field](double, const Vec& x) { return field(x); }, x0, 0.0, t, steps, box);
}

std::vector<Mat> MetricChart::partials(const Vec& x) const {
  if (dg) return dg(x);
  std::vector<Mat> out;
  out.reserve(dim);
  const DiffOptions opts{};
  for (int k = 0; k < dim; ++k) {
    const Vec e = Vec::Unit(dim, k);
    const Mat gp = g(x + opts.step * e);
    const Mat gm = g(x - opts.step * e);
    out.push_back((gp - gm) / (2.0 * opts.step));
  }
  return out;
}

Vec Christoffel::contract(const Vec& u, const Vec& w) const {
  Vec out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t k = 0; k < gamma.size(); ++k) out[k] = u.dot(gamma[k] * w);
  return out;
}

Mat Christoffel::along(const Vec& u) const {
  const auto dim = static_cast<Eigen::Index>(gamma.size());
  Mat out(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) out.row(k) = u.transpose() * gamma[k];
  return out;
}

Christoffel christoffel(const MetricChart& m, const Vec& x) {
  const Mat g = m.g(x);
  require_finite(g, "metric");
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-14) {
    throw SingularMetricError("christoffel: metric is not invertible");
  }
  const Mat ginv = lu.inverse();
  const std::vector<Mat> dg = m.partials(x);
  const int n = m.dim;

  Christoffel out;
  out.gamma.assign(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        out.gamma[k](i, j) = 0.5 * s;
        out.gamma[k](j, i) = 0.5 * s;
      }
    }
  }
  return out;
}

double min_eigenvalue(const MetricChart& m, const Vec& x) {
  const Mat g = m.g(x);
  const Mat sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace cartan

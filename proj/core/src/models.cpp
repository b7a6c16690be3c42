#include "cartan/models.hpp"

#include "cartan/errors.hpp"

#include <cmath>

namespace cartan {

namespace {

Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

Box concat(const Box& a, const Box& b) { return Box{concat(a.lower, b.lower), concat(a.upper, b.upper)}; }

Mat selector(int rows, int cols, int offset) {
  Mat out = Mat::Zero(rows, cols);
  out.block(0, offset, rows, rows) = Mat::Identity(rows, rows);
  return out;
}

ChartMap linear_map(int dim_in, int dim_out, Mat matrix) {
  ChartMap f;
  f.dim_in = dim_in;
  f.dim_out = dim_out;
  f.eval = [matrix](const Vec& x) -> Vec { return matrix * x; };
  f.jacobian = [matrix](const Vec&) -> Mat { return matrix; };
  return f;
}

Mat stacked_identity(int n, int top_zeros, bool identity_on_top) {
  // [I; 0; I]-type unit jacobians: identity block on top (optional), zeros, identity at bottom.
  const int rows = (identity_on_top ? n : 0) + top_zeros + n;
  Mat out = Mat::Zero(rows, n);
  if (identity_on_top) out.topRows(n) = Mat::Identity(n, n);
  out.bottomRows(n) = Mat::Identity(n, n);
  return out;
}

}  // namespace

ModelWithConnection make_pair_groupoid(const Box& box) {
  const int n = box.dim();
  auto model = std::make_shared<GroupoidModel>();
  model->name = "pair";
  model->base_dim = n;
  model->arrow_dim = 2 * n;
  model->source = linear_map(2 * n, n, selector(n, 2 * n, n));
  model->target = linear_map(2 * n, n, selector(n, 2 * n, 0));
  model->unit = linear_map(n, 2 * n, stacked_identity(n, 0, true));
  model->multiply = [n](const Vec& g, const Vec& h) -> Vec { return concat(g.head(n), h.tail(n)); };
  model->inverse = [n](const Vec& g) -> Vec { return concat(g.tail(n), g.head(n)); };
  model->retract_source = [n](const Vec& g, const Vec& h) -> Vec {
    return concat(g.head(n), h.head(n));
  };
  model->retract_target = [n](const Vec& h, const Vec& g) -> Vec {
    return concat(g.tail(n), h.tail(n));
  };
  model->extend_bisection = affine_bisection;
  model->base_box = box;
  model->arrow_box = concat(box, box);

  CartanConnection s;
  s.model = model;
  s.name = "chart-translation";
  const Mat mu = stacked_identity(n, 0, true);
  s.mu = [mu](const Vec&) -> Mat { return mu; };
  return {model, s};
}

ModelWithConnection make_action_groupoid(const GroupAction& action) {
  const int k = action.group_dim;
  const int n = action.base_dim;
  auto model = std::make_shared<GroupoidModel>();
  model->name = action.name;
  model->base_dim = n;
  model->arrow_dim = k + n;
  model->source = linear_map(k + n, n, selector(n, k + n, k));
  model->target.dim_in = k + n;
  model->target.dim_out = n;
  model->target.eval = [act = action.act, k, n](const Vec& g) -> Vec {
    return act(g.head(k), g.tail(n));
  };
  const Vec e = action.identity;
  model->unit.dim_in = n;
  model->unit.dim_out = k + n;
  model->unit.eval = [e](const Vec& m) -> Vec { return concat(e, m); };
  model->unit.jacobian = [k, n](const Vec&) -> Mat { return stacked_identity(n, k, false); };
  model->multiply = [mul = action.multiply, k, n](const Vec& g, const Vec& h) -> Vec {
    return concat(mul(g.head(k), h.head(k)), h.tail(n));
  };
  model->inverse = [inv = action.inverse, act = action.act, k, n](const Vec& g) -> Vec {
    return concat(inv(g.head(k)), act(g.head(k), g.tail(n)));
  };
  model->retract_source = [act = action.act, k, n](const Vec& g, const Vec& h) -> Vec {
    return concat(g.head(k), act(h.head(k), h.tail(n)));
  };
  model->extend_bisection = affine_bisection;
  model->base_box = action.base_box;
  model->arrow_box = concat(action.group_box, action.base_box);
  if (action.base_domain) {
    model->domain = concat(Box::cube(k, 1e3), *action.base_domain);
  }
  model->fibre_chart = action.fibre_chart;

  CartanConnection s;
  s.model = model;
  s.name = "constant-bisection";
  const Mat mu = stacked_identity(n, k, false);
  s.mu = [mu](const Vec&) -> Mat { return mu; };
  return {model, s};
}

GroupAction translation_action(int n, double half_width) {
  GroupAction a;
  a.name = "translation";
  a.group_dim = n;
  a.base_dim = n;
  a.multiply = [](const Vec& x, const Vec& y) -> Vec { return x + y; };
  a.inverse = [](const Vec& x) -> Vec { return -x; };
  a.identity = Vec::Zero(n);
  a.act = [](const Vec& x, const Vec& m) -> Vec { return x + m; };
  a.group_box = Box::cube(n, 0.5 * half_width);
  a.base_box = Box::cube(n, half_width);
  return a;
}

Eigen::Matrix2d rotation2(double theta) {
  Eigen::Matrix2d r;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r << c, -s, s, c;
  return r;
}

GroupAction se2_action(double half_width) {
  GroupAction a;
  a.name = "se2-action";
  a.group_dim = 3;
  a.base_dim = 2;
  a.multiply = [](const Vec& x, const Vec& y) -> Vec {
    Vec out(3);
    out.head(2) = x.head(2) + rotation2(x[2]) * y.head(2);
    out[2] = x[2] + y[2];
    return out;
  };
  a.inverse = [](const Vec& x) -> Vec {
    Vec out(3);
    out.head(2) = -(rotation2(-x[2]) * x.head(2));
    out[2] = -x[2];
    return out;
  };
  a.identity = Vec::Zero(3);
  a.act = [](const Vec& x, const Vec& m) -> Vec { return rotation2(x[2]) * m + x.head(2); };
  Vec lo(3), hi(3);
  lo << -0.5 * half_width, -0.5 * half_width, -1.0;
  hi << 0.5 * half_width, 0.5 * half_width, 1.0;
  a.group_box = Box{lo, hi};
  a.base_box = Box::cube(2, half_width);
  // Source fibre over m0 in coordinates (m, theta): the motion with angle theta taking m0 to m.
  FibreChart chart;
  chart.fibre_dim = 1;
  chart.fibre_box = Box::cube(1, 1.0);
  chart.to_arrow = [](const Vec& m0, const Vec& p) -> Vec {
    Vec g(5);
    g.head(2) = p.head(2) - rotation2(p[2]) * m0;
    g[2] = p[2];
    g.tail(2) = m0;
    return g;
  };
  chart.from_arrow = [](const Vec& m0, const Vec& g) -> Vec {
    Vec p(3);
    p.head(2) = rotation2(g[2]) * m0 + g.head(2);
    p[2] = g[2];
    return p;
  };
  a.fibre_chart = chart;
  return a;
}

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& rho) {
  const double t2 = rho.squaredNorm();
  const double t = std::sqrt(t2);
  Eigen::Matrix3d k;
  k << 0, -rho.z(), rho.y(), rho.z(), 0, -rho.x(), -rho.y(), rho.x(), 0;
  double a;
  double b;
  if (t < 1e-4) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  return Eigen::Matrix3d::Identity() + a * k + b * k * k;
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  const Eigen::Vector3d v = q.vec();
  const double n = v.norm();
  const double ratio = n > 1e-300 ? 2.0 * std::atan2(n, q.w()) / n : 2.0 / q.w();
  return ratio * v;
}

Eigen::Vector3d stereo_to_sphere(const Vec& m) {
  const double r2 = m.squaredNorm();
  return Eigen::Vector3d(2.0 * m[0], 2.0 * m[1], 1.0 - r2) / (1.0 + r2);
}

Vec sphere_to_stereo(const Eigen::Vector3d& s) {
  const double d = 1.0 + s.z();
  if (d < 1e-12) throw DomainError("stereographic chart: point at the south pole");
  Vec out(2);
  out << s.x() / d, s.y() / d;
  return out;
}

GroupAction so3_sphere_action(double half_width) {
  GroupAction a;
  a.name = "so3-sphere";
  a.group_dim = 3;
  a.base_dim = 2;
  a.multiply = [](const Vec& x, const Vec& y) -> Vec {
    return rotation_log(rotation_exp(x) * rotation_exp(y));
  };
  a.inverse = [](const Vec& x) -> Vec { return -x; };
  a.identity = Vec::Zero(3);
  a.act = [](const Vec& x, const Vec& m) -> Vec {
    return sphere_to_stereo(rotation_exp(x) * stereo_to_sphere(m));
  };
  a.group_box = Box::cube(3, half_width);
  a.base_box = Box::cube(2, 0.5);
  a.base_domain = Box::cube(2, 4.0);
  return a;
}

// ---------------------------------------------------------------------------

namespace {

MetricChart conformal_metric(std::function<double(const Vec&)> lambda,
                             std::function<Vec(const Vec&)> grad) {
  MetricChart m;
  m.dim = 2;
  m.g = [lambda](const Vec& x) -> Mat { return lambda(x) * Mat::Identity(2, 2); };
  m.dg = [grad](const Vec& x) -> std::vector<Mat> {
    const Vec d = grad(x);
    return {d[0] * Mat::Identity(2, 2), d[1] * Mat::Identity(2, 2)};
  };
  return m;
}

}  // namespace

MetricChart euclidean_metric() {
  return conformal_metric([](const Vec&) { return 1.0; }, [](const Vec&) -> Vec { return Vec::Zero(2); });
}

MetricChart sphere_metric() {
  return conformal_metric(
      [](const Vec& x) {
        const double d = 1.0 + x.squaredNorm();
        return 4.0 / (d * d);
      },
      [](const Vec& x) -> Vec {
        const double d = 1.0 + x.squaredNorm();
        return -16.0 * x / (d * d * d);
      });
}

MetricChart hyperbolic_metric() {
  return conformal_metric(
      [](const Vec& x) {
        const double d = 1.0 - x.squaredNorm();
        if (d <= 0.0) throw MetricError("hyperbolic metric: point outside the unit disk");
        return 4.0 / (d * d);
      },
      [](const Vec& x) -> Vec {
        const double d = 1.0 - x.squaredNorm();
        if (d <= 0.0) throw MetricError("hyperbolic metric: point outside the unit disk");
        return 16.0 * x / (d * d * d);
      });
}

MetricChart perturbed_metric(double eps) {
  return conformal_metric([eps](const Vec& x) { return 1.0 + eps * x[0] * x[0]; },
                          [eps](const Vec& x) -> Vec {
                            Vec d(2);
                            d << 2.0 * eps * x[0], 0.0;
                            return d;
                          });
}

Eigen::Matrix2d sqrt_spd2(const Eigen::Matrix2d& a) {
  const double s = std::sqrt(a.determinant());
  const double t = std::sqrt(a.trace() + 2.0 * s);
  return (a + s * Eigen::Matrix2d::Identity()) / t;
}

Eigen::Matrix2d sqrt_spd2_derivative(const Eigen::Matrix2d& a, const Eigen::Matrix2d& da) {
  const double det = a.determinant();
  const double s = std::sqrt(det);
  const double t = std::sqrt(a.trace() + 2.0 * s);
  const double ddet = det * (a.inverse() * da).trace();
  const double ds = ddet / (2.0 * s);
  const double dt = (da.trace() + 2.0 * ds) / (2.0 * t);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  return (da + ds * id) / t - (a + s * id) * dt / (t * t);
}

Eigen::Matrix2d IsoJetGeometry::root(const Vec& x) const {
  const Eigen::Matrix2d g = metric_.g(x);
  if (!g.allFinite() || g.determinant() <= 0.0 || g.trace() <= 0.0) {
    throw MetricError("metric is not positive definite");
  }
  return sqrt_spd2(0.5 * (g + g.transpose()));
}

Eigen::Matrix2d IsoJetGeometry::root_derivative(const Vec& x, const Vec& u) const {
  const Eigen::Matrix2d g = metric_.g(x);
  const std::vector<Mat> dg = metric_.partials(x);
  Eigen::Matrix2d dgu = Eigen::Matrix2d::Zero();
  for (int k = 0; k < 2; ++k) dgu += u[k] * dg[k];
  return sqrt_spd2_derivative(0.5 * (g + g.transpose()), 0.5 * (dgu + dgu.transpose()));
}

Eigen::Matrix2d IsoJetGeometry::frame(const Vec& x) const { return root(x).inverse(); }

Eigen::Matrix2d IsoJetGeometry::isometry(const Vec& g) const {
  return frame(g.head(2)) * rotation2(g[2]) * root(g.tail(2));
}

Mat IsoJetGeometry::prolongation(const Vec& g) const {
  const Vec mp = g.head(2);
  const Vec m = g.tail(2);
  const Eigen::Matrix2d rot = rotation2(g[2]);
  const Eigen::Matrix2d e_m = frame(m);
  const Eigen::Matrix2d root_mp = root(mp);
  const Eigen::Matrix2d a = root_mp.inverse() * rot * root(m);
  const Christoffel gam = christoffel(metric_, m);
  const Christoffel gam_p = christoffel(metric_, mp);

  Mat mu = Mat::Zero(5, 2);
  for (int i = 0; i < 2; ++i) {
    const Vec ei = Vec::Unit(2, i);
    const Vec av = a.col(i);
    // Second derivatives of the isometry along e_i from the prolongation equation.
    Eigen::Matrix2d h;
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int c = 0; c < 2; ++c) s += a(k, c) * gam(c, i, j);
        for (int p = 0; p < 2; ++p) {
          for (int q = 0; q < 2; ++q) s -= gam_p(k, p, q) * a(p, i) * a(q, j);
        }
        h(k, j) = s;
      }
    }
    const Eigen::Matrix2d d_root_mp = root_derivative(mp, av);
    const Eigen::Matrix2d d_frame_m = -e_m * root_derivative(m, ei) * e_m;
    const Eigen::Matrix2d w = d_root_mp * a * e_m + root_mp * h * e_m + root_mp * a * d_frame_m;
    const Eigen::Matrix2d rw = rot.transpose() * w;
    mu.block(0, i, 2, 1) = av;
    mu(2, i) = 0.5 * (rw(1, 0) - rw(0, 1));
    mu.block(3, i, 2, 1) = ei;
  }
  return mu;
}

IsoJetModel make_isometry_jet_groupoid(const MetricChart& metric, const Box& base_box,
                                       const std::string& name, double angle_half_width) {
  if (metric.dim != 2) throw MetricError("isometric-jet model requires a surface metric");
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      Vec x(2);
      x << base_box.lower[0] + 0.25 * i * (base_box.upper[0] - base_box.lower[0]),
          base_box.lower[1] + 0.25 * j * (base_box.upper[1] - base_box.lower[1]);
      const Mat g = metric.g(x);
      if (!g.allFinite() || min_eigenvalue(metric, x) <= 0.0) {
        throw MetricError("metric is not positive definite on the base box");
      }
    }
  }
  auto geometry = std::make_shared<const IsoJetGeometry>(metric);

  auto model = std::make_shared<GroupoidModel>();
  model->name = name;
  model->base_dim = 2;
  model->arrow_dim = 5;
  model->source = linear_map(5, 2, selector(2, 5, 3));
  model->target = linear_map(5, 2, selector(2, 5, 0));
  model->unit = linear_map(2, 5, stacked_identity(2, 1, true));
  model->multiply = [](const Vec& g, const Vec& h) -> Vec {
    Vec out(5);
    out << g.head(2), g[2] + h[2], h.tail(2);
    return out;
  };
  model->inverse = [](const Vec& g) -> Vec {
    Vec out(5);
    out << g.tail(2), -g[2], g.head(2);
    return out;
  };
  model->retract_source = [](const Vec& g, const Vec& h) -> Vec {
    Vec out(5);
    out << g.head(2), g[2], h.head(2);
    return out;
  };
  model->retract_target = [](const Vec& h, const Vec& g) -> Vec {
    Vec out(5);
    out << g.tail(2), h[2], h.tail(2);
    return out;
  };
  model->extend_bisection = affine_bisection;
  model->base_box = base_box;
  Box angle{Vec::Constant(1, -angle_half_width), Vec::Constant(1, angle_half_width)};
  model->arrow_box = concat(concat(base_box, angle), base_box);
  const Box wide_base = Box::centered(0.5 * (base_box.lower + base_box.upper),
                                      0.75 * (base_box.upper - base_box.lower).maxCoeff());
  model->domain = concat(concat(wide_base, Box::cube(1, 1e3)), wide_base);

  CartanConnection s;
  s.model = model;
  s.name = "prolongation";
  s.mu = [geometry](const Vec& g) -> Mat { return geometry->prolongation(g); };
  return {model, s, geometry};
}

}  // namespace cartan

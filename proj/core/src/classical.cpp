#include "cartan/classical.hpp"

#include "cartan/errors.hpp"
#include "cartan/jet_algebra.hpp"
#include "cartan/sampling.hpp"

#include <cmath>

namespace cartan {

namespace {

Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

Vec concat3(const Vec& a, const Vec& b, const Vec& c) { return concat(concat(a, b), c); }

Eigen::Vector3d hat_inverse(const Eigen::Matrix3d& k) {
  return {0.5 * (k(2, 1) - k(1, 2)), 0.5 * (k(0, 2) - k(2, 0)), 0.5 * (k(1, 0) - k(0, 1))};
}

Eigen::Matrix3d rotation_z(double phi) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r.topLeftCorner<2, 2>() = rotation2(phi);
  return r;
}

Mat solve_square(const Mat& a, const Mat& b, const char* what) {
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) throw SingularError(std::string(what) + ": singular form");
  return lu.solve(b);
}

void check_slice(const ClassicalCartan& w) {
  const int n = w.base_dim;
  const int k = w.fibre_dim;
  // Corners and centre of the base and fibre boxes.
  std::vector<Vec> bases{0.5 * (w.base_box.lower + w.base_box.upper), w.base_box.lower, w.base_box.upper};
  std::vector<Vec> fibres{Vec::Zero(k), 0.5 * w.fibre_box.lower, 0.5 * w.fibre_box.upper};
  const double tol = 1e-9;
  for (const Vec& m : bases) {
    const Vec s = w.slice(m);
    if ((w.right_action(s, Vec::Zero(k)) - s).cwiseAbs().maxCoeff() > tol) {
      throw SliceError(w.name + ": f = 0 does not act trivially on the slice");
    }
    for (const Vec& f : fibres) {
      const Vec p = w.right_action(s, f);
      if ((p.head(n) - m).cwiseAbs().maxCoeff() > tol || (p.tail(k) - f).cwiseAbs().maxCoeff() > tol) {
        throw SliceError(w.name + ": coset normalization sigma(m) h(f) = (m, f) fails");
      }
      if ((w.right_action(p, w.h_inverse(f)) - s).cwiseAbs().maxCoeff() > tol) {
        throw SliceError(w.name + ": h_inverse is not inverse to the action");
      }
    }
  }
}

}  // namespace

Vec ClassicalCartan::slice(const Vec& m) const { return concat(m, Vec::Zero(fibre_dim)); }

Mat ClassicalCartan::matrix(const Vec& p) const {
  const int d = dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i) out.col(i) = omega(p, Vec::Unit(d, i));
  return out;
}

Vec ClassicalCartan::fundamental(const Vec& p, int k) const {
  const auto act = [this, &p](const Vec& f) { return right_action(p, f); };
  return directional_fd(act, Vec::Zero(fibre_dim), Vec::Unit(fibre_dim, k), kStructureDiff);
}

ClassicalInvariants check_classical(const ClassicalCartan& w, const Vec& p, const Vec& v, const Vec& f) {
  ClassicalInvariants out;
  for (int k = 0; k < w.fibre_dim; ++k) {
    const Vec err = w.omega(p, w.fundamental(p, k)) - w.h_basis.col(k);
    out.fundamental = std::max(out.fundamental, err.cwiseAbs().maxCoeff());
  }
  const auto act = [&w, &f](const Vec& x) { return w.right_action(x, f); };
  const Vec vh = directional_fd(act, p, v, kStructureDiff);
  const Vec err = w.omega(w.right_action(p, f), vh) - w.h_rep(f, w.omega(p, v));
  out.equivariance = err.cwiseAbs().maxCoeff();
  out.min_singular = min_singular_value(w.matrix(p));
  return out;
}

Vec se2_bracket(const Vec& a, const Vec& b) {
  // Matrix commutator of (t, w): (w_a J t_b - w_b J t_a, 0); negated.
  Vec out = Vec::Zero(3);
  out[0] = -(-a[2] * b[1] + b[2] * a[1]);
  out[1] = -(a[2] * b[0] - b[2] * a[0]);
  return out;
}

Vec so3_bracket(const Vec& a, const Vec& b) {
  const Eigen::Vector3d x = a.head<3>();
  const Eigen::Vector3d y = b.head<3>();
  return -x.cross(y);
}

ClassicalCartan maurer_cartan_se2() {
  ClassicalCartan w;
  w.name = "se2-so2";
  w.base_dim = 2;
  w.fibre_dim = 1;
  w.right_action = [](const Vec& p, const Vec& f) -> Vec {
    Vec out = p;
    out[2] += f[0];
    return out;
  };
  w.h_inverse = [](const Vec& f) -> Vec { return -f; };
  w.omega = [](const Vec& p, const Vec& v) -> Vec {
    Vec out(3);
    out.head(2) = rotation2(-p[2]) * v.head(2);
    out[2] = v[2];
    return out;
  };
  w.h_basis = Vec::Unit(3, 2);
  w.h_rep = [](const Vec& f, const Vec& xi) -> Vec {
    Vec out(3);
    out.head(2) = rotation2(-f[0]) * xi.head(2);
    out[2] = xi[2];
    return out;
  };
  w.base_box = Box::cube(2, 1.0);
  w.fibre_box = Box::cube(1, 1.0);
  return w;
}

Eigen::Matrix3d so3_point(const Vec& p) {
  // Slice: the rotation about e3 x s(m) taking the north pole to s(m).
  const Eigen::Vector3d s = stereo_to_sphere(p.head(2));
  const double r = std::hypot(s.x(), s.y());
  const double angle = std::atan2(r, s.z());
  const double scale = r < 1e-12 ? 1.0 : angle / r;
  const Eigen::Vector3d rho(-s.y() * scale, s.x() * scale, 0.0);
  return rotation_exp(rho) * rotation_z(p[2]);
}

ClassicalCartan maurer_cartan_so3() {
  ClassicalCartan w;
  w.name = "so3-so2";
  w.base_dim = 2;
  w.fibre_dim = 1;
  w.right_action = [](const Vec& p, const Vec& f) -> Vec {
    Vec out = p;
    out[2] += f[0];
    return out;
  };
  w.h_inverse = [](const Vec& f) -> Vec { return -f; };
  w.omega = [](const Vec& p, const Vec& v) -> Vec {
    const auto flat = [](const Vec& x) -> Vec {
      const Eigen::Matrix3d r = so3_point(x);
      return Eigen::Map<const Vec>(r.data(), 9);
    };
    const Vec dr = directional_fd(flat, p, v, kStructureDiff);
    const Eigen::Matrix3d d = Eigen::Map<const Eigen::Matrix3d>(dr.data());
    return Vec(hat_inverse(so3_point(p).transpose() * d));
  };
  w.h_basis = Vec::Unit(3, 2);
  w.h_rep = [](const Vec& f, const Vec& xi) -> Vec {
    return Vec(rotation_z(-f[0]) * Eigen::Vector3d(xi.head<3>()));
  };
  w.base_box = Box::cube(2, 0.5);
  w.fibre_box = Box::cube(1, 1.0);
  return w;
}

ModelWithConnection classical_to_groupoid(const ClassicalCartan& w) {
  check_slice(w);
  const int n = w.base_dim;
  const int k = w.fibre_dim;
  const int dp = n + k;
  const int big = dp + n;

  auto model = std::make_shared<GroupoidModel>();
  model->name = "gauge-" + w.name;
  model->base_dim = n;
  model->arrow_dim = big;

  Mat src = Mat::Zero(n, big);
  src.rightCols(n) = Mat::Identity(n, n);
  Mat tgt = Mat::Zero(n, big);
  tgt.leftCols(n) = Mat::Identity(n, n);
  Mat unit = Mat::Zero(big, n);
  unit.topRows(n) = Mat::Identity(n, n);
  unit.bottomRows(n) = Mat::Identity(n, n);
  const auto linear = [](int in, int out, const Mat& a) {
    ChartMap f;
    f.dim_in = in;
    f.dim_out = out;
    f.eval = [a](const Vec& x) -> Vec { return a * x; };
    f.jacobian = [a](const Vec&) -> Mat { return a; };
    return f;
  };
  model->source = linear(big, n, src);
  model->target = linear(big, n, tgt);
  model->unit = linear(n, big, unit);

  // [(q1, sigma(m1))][(q2, sigma(m2))] = [(q1 h(f_q2), sigma(m2))] since q2 = sigma(m1) h(f_q2).
  model->multiply = [w, n, k, dp](const Vec& g, const Vec& h) -> Vec {
    return concat(w.right_action(g.head(dp), h.segment(n, k)), h.tail(n));
  };
  model->inverse = [w, n, k, dp](const Vec& g) -> Vec {
    const Vec q = g.head(dp);
    return concat(w.right_action(w.slice(g.tail(n)), w.h_inverse(q.tail(k))), q.head(n));
  };
  model->retract_source = [n, dp](const Vec& g, const Vec& h) -> Vec {
    return concat(g.head(dp), h.head(n));
  };
  model->retract_target = [n, k](const Vec& h, const Vec& g) -> Vec {
    return concat3(g.tail(n), h.segment(n, k), h.tail(n));
  };
  model->extend_bisection = affine_bisection;
  model->base_box = w.base_box;
  model->arrow_box = Box{concat3(w.base_box.lower, w.fibre_box.lower, w.base_box.lower),
                         concat3(w.base_box.upper, w.fibre_box.upper, w.base_box.upper)};

  FibreChart chart;
  chart.fibre_dim = k;
  chart.fibre_box = w.fibre_box;
  chart.to_arrow = [](const Vec& m0, const Vec& p) -> Vec { return concat(p, m0); };
  chart.from_arrow = [dp](const Vec&, const Vec& g) -> Vec { return g.head(dp); };
  model->fibre_chart = chart;

  CartanConnection s;
  s.model = model;
  s.name = "omega-" + w.name;
  // Moving the source along v moves sigma(m) by (v, 0); q follows with the same omega value.
  s.mu = [w, n, dp, big](const Vec& g) -> Mat {
    const Vec q = g.head(dp);
    const Mat slice_part = w.matrix(w.slice(g.tail(n))).leftCols(n);
    Mat out(big, n);
    out.topRows(dp) = solve_square(w.matrix(q), slice_part, "gauge connection");
    out.bottomRows(n) = Mat::Identity(n, n);
    return out;
  };
  return {model, s};
}

ClassicalCartan recover_omega(const CartanConnection& s, const Vec& m0) {
  const ModelPtr mp = s.model;
  const GroupoidModel& model = *mp;
  if (!model.fibre_chart) throw TransitivityError(model.name + ": no source-fibre chart");
  const FibreChart chart = *model.fibre_chart;
  const int n = model.base_dim;
  const int k = chart.fibre_dim;
  const int r = model.algebroid_rank();
  if (r != n + k) throw TransitivityError(model.name + ": fibre chart dimension does not match the algebroid");
  const Mat basis = algebroid_basis(model, m0);
  const Eigen::JacobiSVD<Mat> svd(anchor_matrix(model, m0) * basis);
  if (svd.singularValues().minCoeff() < 1e-8) {
    throw TransitivityError(model.name + ": anchor is not surjective at the base point");
  }

  const auto to_arrow = [chart, m0](const Vec& p) { return chart.to_arrow(m0, p); };
  const auto isotropy = [chart, m0, n, k](const Vec& f) {
    Vec p(n + k);
    p << m0, f;
    return chart.to_arrow(m0, p);
  };

  ClassicalCartan w;
  w.name = model.name + "-recovered";
  w.base_dim = n;
  w.fibre_dim = k;
  w.right_action = [mp, chart, m0, to_arrow, isotropy](const Vec& p, const Vec& f) -> Vec {
    return chart.from_arrow(m0, mp->product(to_arrow(p), isotropy(f)));
  };
  w.h_inverse = [mp, chart, m0, isotropy, k](const Vec& f) -> Vec {
    return chart.from_arrow(m0, mp->inverse(isotropy(f))).tail(k);
  };
  w.omega = [s, mp, basis, to_arrow](const Vec& p, const Vec& v) -> Vec {
    const Vec g = to_arrow(p);
    const Vec tangent = directional_fd(to_arrow, p, v, kStructureDiff);
    const Vec at_unit = right_translation_jacobian(*mp, mp->inverse(g), g) * tangent;
    // Ad_{S(g)} maps g|_{m0} onto g|_{beta(g)}; pull back in the basis.
    const Mat ad = adjoint_algebroid_matrix(*mp, s.at(g)) * basis;
    return ad.colPivHouseholderQr().solve(at_unit);
  };
  w.h_basis = Mat(n + k, k);
  for (int j = 0; j < k; ++j) {
    w.h_basis.col(j) = basis.transpose() * directional_fd(isotropy, Vec::Zero(k), Vec::Unit(k, j), kStructureDiff);
  }
  w.h_rep = [s, mp, basis, isotropy](const Vec& f, const Vec& xi) -> Vec {
    const Jet1 inv = s.at(mp->inverse(isotropy(f)));
    return basis.transpose() * (adjoint_algebroid_matrix(*mp, inv) * (basis * xi));
  };
  w.base_box = model.base_box;
  w.fibre_box = chart.fibre_box;
  return w;
}

Mat omega_identification(const ClassicalCartan& a, const ClassicalCartan& b, const Vec& p0) {
  return solve_square(a.matrix(p0).transpose(), b.matrix(p0).transpose(), "omega_identification").transpose();
}

AlgebroidConnection nabla_omega(const ClassicalCartan& w, ModelPtr gauge) {
  AlgebroidConnection out;
  out.model = gauge;
  out.provenance = Provenance::ClassicalOmega;
  const int n = w.base_dim;
  const int dp = w.dim();
  out.nabla = [w, n, dp](const Vec& m, const Vec& v, const Section& x) -> Vec {
    const Vec p = w.slice(m);
    const Vec xm = x(m);
    const Vec lifted = concat(v, Vec::Zero(dp - n));
    const auto omega_lifted = [&w, &lifted](const Vec& q) { return w.omega(q, lifted); };
    const Vec variation = directional_fd(omega_lifted, p, xm.head(dp), kStructureDiff);
    Vec result = Vec::Zero(xm.size());
    result.head(dp) = solve_square(w.matrix(p), variation, "nabla_omega") +
                      directional_fd(x, m, v, kStructureDiff).head(dp);
    return result;
  };
  return out;
}

Vec nabla_bar(const ClassicalCartan& w, const Vec& p, const Vec& x, const VectorFn& y) {
  const auto wy = [&w, &y](const Vec& q) { return w.omega(q, y(q)); };
  return solve_square(w.matrix(p), directional_fd(wy, p, x, kStructureDiff), "nabla_bar");
}

Vec curvature_form(const ClassicalCartan& w, const VBracket& bracket, const Vec& p, const Vec& x,
                   const Vec& y) {
  const auto wx = [&w, &x](const Vec& q) { return w.omega(q, x); };
  const auto wy = [&w, &y](const Vec& q) { return w.omega(q, y); };
  const Vec d = directional_fd(wy, p, x, kStructureDiff) - directional_fd(wx, p, y, kStructureDiff);
  return d - bracket(w.omega(p, x), w.omega(p, y));
}

namespace {

// K(a, b) = Omega(omega^{-1} e_a, omega^{-1} e_b), flattened column-wise into one vector.
Vec parallel_curvature(const ClassicalCartan& w, const VBracket& bracket, const Vec& p) {
  const int d = w.dim();
  const Mat inv = solve_square(w.matrix(p), Mat::Identity(d, d), "classical_curvature");
  std::vector<Vec> coord(static_cast<std::size_t>(d * d), Vec::Zero(d));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Vec o = curvature_form(w, bracket, p, Vec::Unit(d, i), Vec::Unit(d, j));
      coord[static_cast<std::size_t>(i * d + j)] = o;
      coord[static_cast<std::size_t>(j * d + i)] = -o;
    }
  }
  Vec out = Vec::Zero(d * d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Vec kab = Vec::Zero(d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) kab += inv(i, a) * inv(j, b) * coord[static_cast<std::size_t>(i * d + j)];
      }
      out.segment((a * d + b) * d, d) = kab;
    }
  }
  return out;
}

}  // namespace

ClassicalCurvature classical_curvature(const ClassicalCartan& w, const VBracket& bracket, const Vec& p) {
  if (!bracket) throw DomainError("classical_curvature: an explicit bracket on V is required");
  const int d = w.dim();
  ClassicalCurvature out;
  out.point = p;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      out.pairs.push_back(curvature_form(w, bracket, p, Vec::Unit(d, i), Vec::Unit(d, j)));
      out.curvature = std::max(out.curvature, out.pairs.back().cwiseAbs().maxCoeff());
    }
  }
  const auto k = [&w, &bracket](const Vec& q) { return parallel_curvature(w, bracket, q); };
  for (int l = 0; l < d; ++l) {
    const Vec dk = directional_fd(k, p, Vec::Unit(d, l), kStructureDiff);
    out.covariant_derivative = std::max(out.covariant_derivative, dk.cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace cartan

#include "cartan/curvature.hpp"

#include "cartan/errors.hpp"
#include "cartan/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

namespace cartan {

Mat algebroid_frame(const GroupoidModel& model, const Vec& x, const Mat& reference) {
  Mat basis;
  try {
    basis = algebroid_basis(model, x);
  } catch (const SingularError& e) {
    throw FrameError(e.what());
  }
  const Mat overlap = basis.transpose() * reference;
  Eigen::JacobiSVD<Mat> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-9) {
    throw FrameError("algebroid_frame: frame is orthogonal to the reference frame");
  }
  return basis * (svd.matrixU() * svd.matrixV().transpose());
}

std::vector<Mat> connection_coefficients(const AlgebroidConnection& nabla, const Vec& x,
                                         const Mat& reference) {
  const GroupoidModel& model = *nabla.model;
  const int n = model.base_dim;
  const Mat e = algebroid_frame(model, x, reference);
  const int r = static_cast<int>(e.cols());
  std::vector<Mat> gamma(n, Mat::Zero(r, r));
  for (int a = 0; a < r; ++a) {
    const Section ea = [&model, &reference, a](const Vec& y) -> Vec {
      return algebroid_frame(model, y, reference).col(a);
    };
    for (int i = 0; i < n; ++i) {
      gamma[i].col(a) = e.transpose() * nabla.nabla(x, Vec::Unit(n, i), ea);
    }
  }
  return gamma;
}

double CurvatureTensor::max_abs() const {
  double out = 0.0;
  for (const Mat& m : values) out = std::max(out, m.cwiseAbs().maxCoeff());
  return out;
}

double CurvatureTensor::antisymmetry_defect() const {
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out = std::max(out, ((*this)(i, j) + (*this)(j, i)).cwiseAbs().maxCoeff());
  }
  return out;
}

CurvatureTensor curvature(const AlgebroidConnection& nabla, const Vec& m, const CurvatureOptions& opts) {
  const GroupoidModel& model = *nabla.model;
  const int n = model.base_dim;
  const Mat reference = algebroid_basis(model, m);
  const double h = opts.step;
  const std::vector<Mat> center = connection_coefficients(nabla, m, reference);
  const int r = static_cast<int>(center[0].rows());

  // d[i][j] = d_i Gamma_j.
  std::vector<std::vector<Mat>> d(n, std::vector<Mat>(n));
  for (int i = 0; i < n; ++i) {
    const Vec e = Vec::Unit(n, i);
    const auto p2 = connection_coefficients(nabla, m + 2.0 * h * e, reference);
    const auto p1 = connection_coefficients(nabla, m + h * e, reference);
    const auto m1 = connection_coefficients(nabla, m - h * e, reference);
    const auto m2 = connection_coefficients(nabla, m - 2.0 * h * e, reference);
    for (int j = 0; j < n; ++j) d[i][j] = (-p2[j] + 8.0 * p1[j] - 8.0 * m1[j] + m2[j]) / (12.0 * h);
  }

  CurvatureTensor out;
  out.base = m;
  out.n = n;
  out.r = r;
  out.values.resize(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.values[static_cast<std::size_t>(i * n + j)] =
          d[i][j] - d[j][i] + center[i] * center[j] - center[j] * center[i];
    }
  }
  return out;
}

Vec FrobeniusTorsion::operator()(int i, int j) const {
  if (i == j) return Vec::Zero(arrow.size());
  const int a = std::min(i, j);
  const int b = std::max(i, j);
  int index = 0;
  for (int p = 0; p < a; ++p) index += n - 1 - p;
  index += b - a - 1;
  const Vec& v = values[static_cast<std::size_t>(index)];
  return i < j ? v : Vec(-v);
}

double FrobeniusTorsion::max_abs() const {
  double out = 0.0;
  for (const Vec& v : values) out = std::max(out, v.cwiseAbs().maxCoeff());
  return out;
}

FrobeniusTorsion frobenius_torsion(const CartanConnection& s, const Vec& g, double step) {
  const int n = s.model->base_dim;
  const DiffOptions opts{step, 4, false};
  const Mat d = s.mu(g);
  const auto lift = [&s](int i) {
    return [&s, i](const Vec& x) -> Vec { return s.mu(x).col(i); };
  };
  // Derivatives DV_j . V_i for all ordered pairs.
  std::vector<std::vector<Vec>> dv(n, std::vector<Vec>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i != j) dv[j][i] = directional_fd(lift(j), g, d.col(i), opts);
    }
  }
  const auto qr = d.colPivHouseholderQr();
  FrobeniusTorsion out;
  out.arrow = g;
  out.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec bracket = dv[j][i] - dv[i][j];
      out.values.push_back(bracket - d * qr.solve(bracket));
    }
  }
  return out;
}

double FlatnessReport::fraction_both_above(double factor) const {
  if (samples.empty()) return 0.0;
  const double bar = factor * tolerance;
  const auto hits = std::count_if(samples.begin(), samples.end(), [bar](const FlatnessSample& s) {
    return s.curvature > bar && s.torsion > bar;
  });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

FlatnessReport flatness_experiment(const CartanConnection& s, std::uint64_t seed, int count,
                                   double tolerance) {
  if (!s.record.verified) {
    throw ToleranceError("flatness_experiment: connection has not been verified multiplicative");
  }
  const GroupoidModel& model = *s.model;
  const AlgebroidConnection nabla = infinitesimalize(s, Provenance::Linearized);
  Rng rng(seed);
  FlatnessReport report;
  report.tolerance = tolerance;
  report.min_curvature = std::numeric_limits<double>::infinity();
  report.min_torsion = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    FlatnessSample sample;
    sample.base = sample_base(model, rng, 0.05);
    sample.arrow = sample_arrow(model, rng, 0.05);
    sample.curvature = curvature(nabla, sample.base).max_abs();
    sample.torsion = frobenius_torsion(s, sample.arrow).max_abs();
    report.max_curvature = std::max(report.max_curvature, sample.curvature);
    report.max_torsion = std::max(report.max_torsion, sample.torsion);
    report.min_curvature = std::min(report.min_curvature, sample.curvature);
    report.min_torsion = std::min(report.min_torsion, sample.torsion);
    report.samples.push_back(std::move(sample));
  }
  report.flat = report.max_curvature <= tolerance;
  report.involutive = report.max_torsion <= tolerance;
  report.consistent = report.flat == report.involutive;
  return report;
}

std::vector<Vec> grid_points(const Vec& m0, const Grid& grid) {
  const int n = static_cast<int>(m0.size());
  const int side = 2 * grid.half_count + 1;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= side;
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int idx = 0; idx < total; ++idx) {
    Vec x = m0;
    int rest = idx;
    for (int i = 0; i < n; ++i) {
      x[i] += grid.spacing * ((rest % side) - grid.half_count);
      rest /= side;
    }
    out.push_back(x);
  }
  return out;
}

namespace {

constexpr int kLegSteps = 16;
constexpr double kFlatTolerance = 1e-4;

using Gamma = std::vector<Mat>;

Mat contract(const Gamma& gamma, const Vec& u) {
  Mat out = Mat::Zero(gamma[0].rows(), gamma[0].cols());
  for (std::size_t i = 0; i < gamma.size(); ++i) out += u[static_cast<Eigen::Index>(i)] * gamma[i];
  return out;
}

// Parallel transport of frame coordinates along the polyline through `points`.
Mat transport_frame(const AlgebroidConnection& nabla, const Mat& reference,
                    const std::vector<Vec>& points, const Mat& start) {
  const int r = static_cast<int>(start.rows());
  Vec state = Eigen::Map<const Vec>(start.data(), start.size());
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const Vec a = points[k];
    const Vec u = points[k + 1] - a;
    if (u.cwiseAbs().maxCoeff() == 0.0) continue;
    const TimeVectorField field = [&](double t, const Vec& c) -> Vec {
      const Mat cm = Eigen::Map<const Mat>(c.data(), r, c.size() / r);
      const Mat dc = -contract(connection_coefficients(nabla, a + t * u, reference), u) * cm;
      return Eigen::Map<const Vec>(dc.data(), dc.size());
    };
    state = flow_time(field, state, 0.0, 1.0, kLegSteps);
  }
  return Eigen::Map<const Mat>(state.data(), r, state.size() / r);
}

std::vector<Vec> axis_path(const Vec& from, const Vec& to) {
  std::vector<Vec> out{from};
  Vec x = from;
  for (Eigen::Index i = 0; i < from.size(); ++i) {
    x[i] = to[i];
    out.push_back(x);
  }
  return out;
}

struct VecLess {
  bool operator()(const Vec& a, const Vec& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

}  // namespace

ReconstructionResult reconstruct_action(const AlgebroidConnection& nabla, const Vec& m0,
                                        const Grid& grid) {
  const GroupoidModel& model = *nabla.model;
  const int n = model.base_dim;
  const Mat reference = algebroid_basis(model, m0);
  const int r = static_cast<int>(reference.cols());

  ReconstructionResult out;
  out.m0 = m0;
  out.curvature_at_m0 = curvature(nabla, m0).max_abs();
  if (out.curvature_at_m0 > kFlatTolerance) {
    throw FlatnessError("reconstruct_action: connection is not flat at the base point");
  }

  // Frame coordinates of the parallel sections, transported along straight segments.
  auto cache = std::make_shared<std::map<Vec, Mat, VecLess>>();
  const auto straight = [nabla, reference, m0, r, cache](const Vec& x) -> Mat {
    auto it = cache->find(x);
    if (it != cache->end()) return it->second;
    const Mat c = transport_frame(nabla, reference, {m0, x}, Mat::Identity(r, r));
    cache->emplace(x, c);
    return c;
  };
  for (int a = 0; a < r; ++a) {
    out.sections.push_back([mp = nabla.model, reference, straight, a](const Vec& x) -> Vec {
      return algebroid_frame(*mp, x, reference) * straight(x).col(a);
    });
  }
  for (int a = 0; a < r; ++a) {
    out.action_fields.push_back([mp = nabla.model, section = out.sections[static_cast<std::size_t>(a)]](const Vec& x) -> Vec {
      return anchor_matrix(*mp, x) * section(x);
    });
  }

  Eigen::JacobiSVD<Mat> svd(reference);
  out.dim_g0 = static_cast<int>((svd.singularValues().array() > 1e-8).count());

  // Structure constants from sections with the exact one-jet of parallel sections.
  const Gamma gamma0 = connection_coefficients(nabla, m0, reference);
  const auto linear_section = [&model, &reference](const Vec& x, const Gamma& gamma, const Vec& c) {
    return [&model, &reference, x, gamma, c](const Vec& y) -> Vec {
      return algebroid_frame(model, y, reference) * (c - contract(gamma, y - x) * c);
    };
  };
  out.structure_constants.assign(r, Mat::Zero(r, r));
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const AlgebroidVec br = algebroid_bracket(model, linear_section(m0, gamma0, Vec::Unit(r, i)),
                                                linear_section(m0, gamma0, Vec::Unit(r, j)), m0);
      const Vec coeffs = reference.transpose() * br.vec;
      for (int k = 0; k < r; ++k) {
        out.structure_constants[k](i, j) = coeffs[k];
        out.structure_constants[k](j, i) = -coeffs[k];
      }
    }
  }
  const auto& c = out.structure_constants;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      for (int d = 0; d < r; ++d) {
        for (int k = 0; k < r; ++k) {
          double s = 0.0;
          for (int l = 0; l < r; ++l) {
            s += c[l](a, b) * c[k](l, d) + c[l](b, d) * c[k](l, a) + c[l](d, a) * c[k](l, b);
          }
          out.jacobi_residual = std::max(out.jacobi_residual, std::abs(s));
        }
      }
    }
  }

  const DiffOptions fd = kStructureDiff;
  for (const Vec& x : grid_points(m0, grid)) {
    const Mat cx = straight(x);
    const Mat cl = transport_frame(nabla, reference, axis_path(m0, x), Mat::Identity(r, r));
    out.path_independence = std::max(out.path_independence, (cx - cl).cwiseAbs().maxCoeff());

    // Parallelism of the transported sections.
    const Mat ex = algebroid_frame(model, x, reference);
    for (int a = 0; a < r; ++a) {
      for (int i = 0; i < n; ++i) {
        const Vec d = nabla.nabla(x, Vec::Unit(n, i), out.sections[static_cast<std::size_t>(a)]);
        out.parallel_residual = std::max(out.parallel_residual, (ex.transpose() * d).cwiseAbs().maxCoeff());
      }
    }

    // Anchor homomorphism [xi^dagger_a, xi^dagger_b] = sum_k c^k_ab xi^dagger_k.
    const Gamma gx = connection_coefficients(nabla, x, reference);
    std::vector<VectorFn> dagger;
    for (int a = 0; a < r; ++a) {
      const auto sec = linear_section(x, gx, cx.col(a));
      dagger.push_back([&model, sec](const Vec& y) -> Vec { return anchor_matrix(model, y) * sec(y); });
    }
    std::vector<Vec> at(static_cast<std::size_t>(r));
    for (int a = 0; a < r; ++a) at[static_cast<std::size_t>(a)] = dagger[static_cast<std::size_t>(a)](x);
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        const Vec lhs = directional_fd(dagger[static_cast<std::size_t>(b)], x, at[static_cast<std::size_t>(a)], fd) -
                        directional_fd(dagger[static_cast<std::size_t>(a)], x, at[static_cast<std::size_t>(b)], fd);
        Vec rhs = Vec::Zero(n);
        for (int k = 0; k < r; ++k) rhs += c[k](a, b) * at[static_cast<std::size_t>(k)];
        out.anchor_residual = std::max(out.anchor_residual, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
  }
  if (out.path_independence > kFlatTolerance) {
    throw FlatnessError("reconstruct_action: parallel transport depends on the path");
  }
  return out;
}

}  // namespace cartan

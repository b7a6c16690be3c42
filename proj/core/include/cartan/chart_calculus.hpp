#pragma once

// Numerical kernel shared by every module: chart maps and their derivatives,
// fixed-step RK4 flows, and Levi-Civita utilities for metrics given in a chart.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace cartan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using VectorFn = std::function<Vec(const Vec&)>;
using MatrixFn = std::function<Mat(const Vec&)>;

/// Default central-difference step on unit-scaled charts.
inline constexpr double kFdStep = 1e-5;
/// Largest RK4 step allowed by `flow_to` and friends.
inline constexpr double kMaxRk4Step = 1e-2;

/// Axis-aligned box in a chart.
struct Box {
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(lower.size()); }
  /// True when `x` sits inside the box with at least `margin` to every face.
  bool contains(const Vec& x, double margin = 0.0) const;
  static Box cube(int dim, double half_width);
  static Box centered(const Vec& center, double half_width);
};

/// A smooth map between coordinate spaces, optionally with an analytic jacobian.
struct ChartMap {
  int dim_in = 0;
  int dim_out = 0;
  VectorFn eval;
  MatrixFn jacobian;  // empty when only finite differences are available
  std::optional<Box> domain;

  Vec operator()(const Vec& x) const { return eval(x); }
  bool has_jacobian() const { return static_cast<bool>(jacobian); }
};

struct DiffOptions {
  double step = kFdStep;
  int order = 2;                ///< 2 or 4 (central stencils)
  bool prefer_analytic = true;  ///< use ChartMap::jacobian when present
};

/// Jacobian of `f` at `x`. Analytic when available, else central differences.
Mat differentiate(const ChartMap& f, const Vec& x, const DiffOptions& opts = {});

/// Central-difference jacobian of a plain callable.
Mat jacobian_fd(const VectorFn& f, const Vec& x, const DiffOptions& opts = {});

/// Central-difference derivative of `f` at `x` along `v`.
Vec directional_fd(const VectorFn& f, const Vec& x, const Vec& v,
                   const DiffOptions& opts = {});

/// Central-difference derivative of a scalar-parameter curve at `t`.
Vec curve_derivative(const std::function<Vec(double)>& c, double t,
                     const DiffOptions& opts = {});

/// Throws NonFiniteError if any entry of `x` is NaN or infinite.
void require_finite(const Vec& x, const char* what);
void require_finite(const Mat& x, const char* what);

using VectorField = std::function<Vec(const Vec&)>;
using TimeVectorField = std::function<Vec(double, const Vec&)>;

/// Classical RK4 integration of an autonomous field over duration `t` in `steps`
/// equal steps. Leaving `box` (when given) raises NonFiniteError.
Vec flow(const VectorField& field, const Vec& x0, double t, int steps,
         const Box* box = nullptr);

/// RK4 for a time-dependent field from `t0` to `t1`.
Vec flow_time(const TimeVectorField& field, const Vec& x0, double t0, double t1,
              int steps, const Box* box = nullptr);

/// Number of RK4 steps that keeps |dt| <= kMaxRk4Step.
int rk4_steps_for(double duration);

/// Metric components in a chart. `dg`, when supplied, returns the partials
/// d_k g for k = 0..dim-1.
struct MetricChart {
  int dim = 2;
  MatrixFn g;
  std::function<std::vector<Mat>(const Vec&)> dg;

  Mat operator()(const Vec& x) const { return g(x); }
  std::vector<Mat> partials(const Vec& x) const;
};

/// Gamma^k_ij stored as gamma[k](i, j).
struct Christoffel {
  std::vector<Mat> gamma;

  double operator()(int k, int i, int j) const { return gamma[k](i, j); }
  /// Contraction Gamma^k_ij u^i w^j.
  Vec contract(const Vec& u, const Vec& w) const;
  /// Matrix (Gamma_u)^k_j = Gamma^k_ij u^i.
  Mat along(const Vec& u) const;
};

/// Levi-Civita symbols of `m` at `x`; throws SingularMetricError if g(x) is not invertible.
Christoffel christoffel(const MetricChart& m, const Vec& x);

/// Smallest eigenvalue of the symmetric part of g(x).
double min_eigenvalue(const MetricChart& m, const Vec& x);

}  // namespace cartan

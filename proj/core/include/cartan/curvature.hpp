#pragma once

// Curvature of an algebroid connection in a local orthonormal frame, the
// Frobenius torsion of the horizontal distribution, the paired flatness /
// involutivity experiment, and reconstruction of an action algebroid from the
// parallel sections of a flat connection.

#include "cartan/connection.hpp"

#include <cstdint>
#include <vector>

namespace cartan {

/// Orthonormal basis of g|_x, rotated to be as close as possible to `reference`
/// (nearest-rotation alignment keeps the frame smooth in x).
Mat algebroid_frame(const GroupoidModel& model, const Vec& x, const Mat& reference);

/// Gamma_i (r x r), i = 0..n-1, with nabla_{d_i} e_a = sum_b Gamma_i(b, a) e_b.
std::vector<Mat> connection_coefficients(const AlgebroidConnection& nabla, const Vec& x,
                                         const Mat& reference);

struct CurvatureTensor {
  Vec base;
  int n = 0;
  int r = 0;
  /// Entry (i * n + j) holds curv(d_i, d_j) acting on frame coordinates.
  std::vector<Mat> values;

  const Mat& operator()(int i, int j) const { return values[static_cast<std::size_t>(i * n + j)]; }
  double max_abs() const;
  /// max |R_ij + R_ji|.
  double antisymmetry_defect() const;
};

struct CurvatureOptions {
  double step = 0.01;  ///< fourth-order stencil for the derivatives of Gamma
};

CurvatureTensor curvature(const AlgebroidConnection& nabla, const Vec& m,
                          const CurvatureOptions& opts = {});

struct FrobeniusTorsion {
  Vec arrow;
  int n = 0;
  /// Residual of [V_i, V_j] modulo D for i < j, in lexicographic pair order.
  std::vector<Vec> values;

  Vec operator()(int i, int j) const;
  double max_abs() const;
};

FrobeniusTorsion frobenius_torsion(const CartanConnection& s, const Vec& g, double step = 1e-3);

struct FlatnessSample {
  Vec base;
  Vec arrow;
  double curvature = 0.0;
  double torsion = 0.0;
};

struct FlatnessReport {
  std::vector<FlatnessSample> samples;
  double tolerance = 1e-4;
  double max_curvature = 0.0;
  double max_torsion = 0.0;
  double min_curvature = 0.0;
  double min_torsion = 0.0;
  bool flat = false;
  bool involutive = false;
  /// Both verdicts on the same side of the tolerance.
  bool consistent = false;

  /// Fraction of samples where both norms exceed factor * tolerance.
  double fraction_both_above(double factor) const;
};

/// Requires a connection whose multiplicativity has been verified.
FlatnessReport flatness_experiment(const CartanConnection& s, std::uint64_t seed, int count,
                                   double tolerance = 1e-4);

struct Grid {
  double spacing = 0.05;
  int half_count = 2;  ///< points m0 + spacing * k, k in [-half_count, half_count]^n
};

std::vector<Vec> grid_points(const Vec& m0, const Grid& grid);

struct ReconstructionResult {
  Vec m0;
  int dim_g0 = 0;
  /// c[k](i, j): [xi_i, xi_j] = sum_k c[k](i, j) xi_k.
  std::vector<Mat> structure_constants;
  /// Parallel sections (N-vectors at units) and their anchors xi^dagger = # xi.
  std::vector<Section> sections;
  std::vector<VectorFn> action_fields;
  double curvature_at_m0 = 0.0;
  double jacobi_residual = 0.0;
  double anchor_residual = 0.0;
  double parallel_residual = 0.0;
  double path_independence = 0.0;
};

/// Extends an orthonormal basis of g|_{m0} to parallel sections by transport along
/// straight segments and compares with axis-by-axis paths on the grid. Throws
/// FlatnessError when the curvature at m0 or the path dependence exceeds 1e-4.
ReconstructionResult reconstruct_action(const AlgebroidConnection& nabla, const Vec& m0,
                                        const Grid& grid = {});

}  // namespace cartan

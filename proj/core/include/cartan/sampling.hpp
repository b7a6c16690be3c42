#pragma once

// Seeded sampling of base points, arrows, jets and kernel elements. The generator
// is std::mt19937_64; doubles are built from the top 53 bits so every platform
// produces the same stream for the same seed.

#include "cartan/groupoid.hpp"
#include "cartan/jet_algebra.hpp"

#include <cstdint>
#include <random>

namespace cartan {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  Vec uniform(const Box& box);
  Vec uniform_vec(int dim, double half_width);
  Mat uniform_mat(int rows, int cols, double half_width);

 private:
  std::mt19937_64 engine_;
};

/// Smallest singular value accepted for sampled jets and kernel elements; keeps the
/// comparisons well conditioned. Anything below the structural 1e-9 threshold is
/// rejected in any case.
inline constexpr double kSampleConditioning = 0.1;

/// Base point inside model.base_box, at distance >= margin from the faces.
Vec sample_base(const GroupoidModel& model, Rng& rng, double margin = 0.0);

/// Arrow with the given source whose target lies inside the base box.
Vec sample_arrow_from(const GroupoidModel& model, Rng& rng, const Vec& source, double margin = 0.0);
Vec sample_arrow(const GroupoidModel& model, Rng& rng, double margin = 0.0);

/// (g, h) with alpha(g) = beta(h).
std::pair<Vec, Vec> sample_composable(const GroupoidModel& model, Rng& rng, double margin = 0.0);

/// Random jet over g (satisfies the jet conditions with conditioning guard).
Jet1 sample_jet(const GroupoidModel& model, Rng& rng, const Vec& g, double scale = 1.0);

/// Random kernel element at m with entries of size ~scale in an orthonormal basis of g|_m.
KernelHom sample_kernel_hom(const GroupoidModel& model, Rng& rng, const Vec& m, double scale = 0.3);

double min_singular_value(const Mat& a);

}  // namespace cartan

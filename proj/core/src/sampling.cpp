#include "cartan/sampling.hpp"

#include "cartan/errors.hpp"

namespace cartan {

namespace {
constexpr int kMaxAttempts = 1000;
}

Vec Rng::uniform(const Box& box) {
  Vec out(box.dim());
  for (int i = 0; i < box.dim(); ++i) out[i] = uniform(box.lower[i], box.upper[i]);
  return out;
}

Vec Rng::uniform_vec(int dim, double half_width) {
  Vec out(dim);
  for (int i = 0; i < dim; ++i) out[i] = uniform(-half_width, half_width);
  return out;
}

Mat Rng::uniform_mat(int rows, int cols, double half_width) {
  Mat out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) out(i, j) = uniform(-half_width, half_width);
  }
  return out;
}

double min_singular_value(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues().minCoeff();
}

Vec sample_base(const GroupoidModel& model, Rng& rng, double margin) {
  Box inner{model.base_box.lower.array() + margin, model.base_box.upper.array() - margin};
  if ((inner.upper - inner.lower).minCoeff() <= 0.0) {
    throw SamplingError("sample_base: margin exceeds the base box");
  }
  return rng.uniform(inner);
}

Vec sample_arrow_from(const GroupoidModel& model, Rng& rng, const Vec& source, double margin) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Vec g = model.with_source(rng.uniform(model.arrow_box), source);
    if (model.base_box.contains(model.target(g), margin)) return g;
  }
  throw SamplingError("sample_arrow: no arrow with target inside the base box");
}

Vec sample_arrow(const GroupoidModel& model, Rng& rng, double margin) {
  return sample_arrow_from(model, rng, sample_base(model, rng, margin), margin);
}

std::pair<Vec, Vec> sample_composable(const GroupoidModel& model, Rng& rng, double margin) {
  const Vec h = sample_arrow(model, rng, margin);
  const Vec g = sample_arrow_from(model, rng, model.target(h), margin);
  return {g, h};
}

Jet1 sample_jet(const GroupoidModel& model, Rng& rng, const Vec& g, double scale) {
  const Mat ja = model.source_jacobian(g);
  const Mat jb = model.target_jacobian(g);
  const Mat pinv = ja.completeOrthogonalDecomposition().pseudoInverse();
  const int n = model.base_dim;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Mat r = rng.uniform_mat(model.arrow_dim, n, scale);
    const Mat mu = r + pinv * (Mat::Identity(n, n) - ja * r);
    if (min_singular_value(jb * mu) > kSampleConditioning) return Jet1{model.arrow(g), mu};
  }
  throw SamplingError("sample_jet: could not draw a well-conditioned jet");
}

KernelHom sample_kernel_hom(const GroupoidModel& model, Rng& rng, const Vec& m, double scale) {
  const Mat basis = algebroid_basis(model, m);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    KernelHom phi{m, basis * rng.uniform_mat(model.algebroid_rank(), model.base_dim, scale)};
    if (min_singular_value(hom_tm(model, phi)) > kSampleConditioning) return phi;
  }
  throw SamplingError("sample_kernel_hom: could not draw an invertible element");
}

}  // namespace cartan

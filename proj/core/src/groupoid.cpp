#include "cartan/groupoid.hpp"

#include "cartan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cartan {

namespace {

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void require_composable(const GroupoidModel& model, const Vec& left, const Vec& right,
                        const char* what) {
  const double gap = max_abs(model.source(left) - model.target(right));
  if (gap > model.tol.composability) {
    throw CompositionError(std::string(what) + ": arrows are not composable (gap " +
                           std::to_string(gap) + ")");
  }
}

}  // namespace

Vec GroupoidModel::product(const Vec& g, const Vec& h) const {
  Vec out = multiply(retract_source(g, h), h);
  require_finite(out, "groupoid product");
  return out;
}

Arrow GroupoidModel::arrow(const Vec& coords) const {
  return Arrow{coords, source(coords), target(coords)};
}

Arrow GroupoidModel::unit_arrow(const Vec& m) const { return arrow(unit(m)); }

Vec GroupoidModel::with_source(const Vec& g, const Vec& m) const {
  return retract_source(g, unit(m));
}

Mat GroupoidModel::source_jacobian(const Vec& g) const {
  return differentiate(source, g, kStructureDiff);
}

Mat GroupoidModel::target_jacobian(const Vec& g) const {
  return differentiate(target, g, kStructureDiff);
}

Mat GroupoidModel::unit_jacobian(const Vec& m) const {
  return differentiate(unit, m, kStructureDiff);
}

Mat left_translation_jacobian(const GroupoidModel& model, const Vec& g, const Vec& h) {
  require_composable(model, g, h, "left translation");
  return jacobian_fd([&](const Vec& y) { return model.product(g, y); }, h, kStructureDiff);
}

Mat right_translation_jacobian(const GroupoidModel& model, const Vec& g, const Vec& k) {
  require_composable(model, k, g, "right translation");
  return jacobian_fd([&](const Vec& y) { return model.product(y, g); }, k, kStructureDiff);
}

Mat inversion_jacobian(const GroupoidModel& model, const Vec& g) {
  return jacobian_fd(model.inverse, g, kStructureDiff);
}

Vec tangent_map(const GroupoidModel& model, StructureMap which, const Vec& g, const Arrow& at,
                const Vec& v) {
  const Vec& x = at.coords;
  switch (which) {
    case StructureMap::LeftTranslation: {
      if (!model.retract_target) {
        // Without a retraction the product is only defined along the beta-fibre.
        const double drift = max_abs(model.target_jacobian(x) * v);
        if (drift > model.tol.verticality * std::max(1.0, max_abs(v))) {
          throw ToleranceError("left translation: tangent vector is not beta-vertical");
        }
      }
      require_composable(model, g, x, "left translation");
      return directional_fd([&](const Vec& y) { return model.product(g, y); }, x, v,
                            kStructureDiff);
    }
    case StructureMap::RightTranslation:
      require_composable(model, x, g, "right translation");
      return directional_fd([&](const Vec& y) { return model.product(y, g); }, x, v,
                            kStructureDiff);
    case StructureMap::Inversion:
      return directional_fd(model.inverse, x, v, kStructureDiff);
    case StructureMap::Source:
      return model.source_jacobian(x) * v;
    case StructureMap::Target:
      return model.target_jacobian(x) * v;
  }
  throw DomainError("tangent_map: unknown structure map");
}

Mat anchor_matrix(const GroupoidModel& model, const Vec& m) {
  return model.target_jacobian(model.unit(m));
}

Vec anchor(const GroupoidModel& model, const AlgebroidVec& x) {
  return anchor_matrix(model, x.base) * x.vec;
}

void check_algebroid_vec(const GroupoidModel& model, const AlgebroidVec& x, double tol) {
  const Vec drift = model.source_jacobian(model.unit(x.base)) * x.vec;
  if (max_abs(drift) > tol * std::max(1.0, max_abs(x.vec))) {
    throw ToleranceError("algebroid element is not tangent to the source fibre");
  }
}

Mat algebroid_basis(const GroupoidModel& model, const Vec& m) {
  const Mat ja = model.source_jacobian(model.unit(m));
  const int big_n = model.arrow_dim;
  const Mat proj = Mat::Identity(big_n, big_n) - ja.completeOrthogonalDecomposition().pseudoInverse() * ja;
  const int r = model.algebroid_rank();
  Mat basis(big_n, r);
  int found = 0;
  for (int i = 0; i < big_n && found < r; ++i) {
    Vec v = proj.col(i);
    for (int j = 0; j < found; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    basis.col(found++) = v / norm;
  }
  if (found < r) throw SingularError("algebroid_basis: source map is not a submersion here");
  return basis;
}

Vec right_invariant(const GroupoidModel& model, const Section& x, const Vec& g) {
  const Vec b = model.target(g);
  const Vec xb = x(b);
  return directional_fd([&](const Vec& k) { return model.product(k, g); }, model.unit(b), xb,
                        kStructureDiff);
}

AlgebroidVec algebroid_bracket(const GroupoidModel& model, const Section& x, const Section& y,
                               const Vec& m, const DiffOptions& opts) {
  const Vec e = model.unit(m);
  const VectorFn xr = [&](const Vec& g) { return right_invariant(model, x, g); };
  const VectorFn yr = [&](const Vec& g) { return right_invariant(model, y, g); };
  const Vec xe = xr(e);
  const Vec ye = yr(e);
  const Vec out = directional_fd(yr, e, xe, opts) - directional_fd(xr, e, ye, opts);
  return AlgebroidVec{m, out};
}

Jet1 oracle_jet(const GroupoidModel& model, const Bisection& b, const Vec& m,
                const DiffOptions& opts) {
  const Vec g = b(m);
  require_finite(g, "bisection value");
  const double gap = max_abs(model.source(g) - m);
  if (gap > model.tol.bisection * std::max(1.0, max_abs(m))) {
    throw NotABisectionError("oracle_jet: map is not a right inverse of the source map");
  }
  Jet1 j{model.arrow(g), jacobian_fd(b, m, opts)};
  const double det = (model.target_jacobian(g) * j.mu).determinant();
  if (std::abs(det) < model.tol.singular) {
    throw NotABisectionError("oracle_jet: beta o b is not a local diffeomorphism");
  }
  return j;
}

Bisection compose_bisections(const GroupoidModel& model, Bisection b1, Bisection b2) {
  return [&model, b1 = std::move(b1), b2 = std::move(b2)](const Vec& m) {
    const Vec h = b2(m);
    return model.product(b1(model.target(h)), h);
  };
}

Bisection invert_bisection(const GroupoidModel& model, Bisection b, const Vec& near_source) {
  const VectorFn phi = [&model, b](const Vec& m) { return model.target(b(m)); };
  const Mat j0 = jacobian_fd(phi, near_source, kStructureDiff);
  Eigen::FullPivLU<Mat> lu0(j0);
  if (!lu0.isInvertible()) throw SingularError("invert_bisection: beta o b is singular");
  const Vec phi0 = phi(near_source);
  return [phi, b, &model, near_source, lu0, phi0](const Vec& target) {
    Vec x = near_source + lu0.solve(target - phi0);
    for (int it = 0; it < 60; ++it) {
      const Vec r = phi(x) - target;
      if (max_abs(r) < 1e-15) break;
      const Mat j = jacobian_fd(phi, x, kStructureDiff);
      const Vec dx = j.fullPivLu().solve(r);
      x -= dx;
      if (!x.allFinite()) throw NonFiniteError("invert_bisection: Newton iteration diverged");
      if (max_abs(dx) < 1e-15) break;
    }
    if (max_abs(phi(x) - target) > 1e-11) {
      throw NonFiniteError("invert_bisection: Newton iteration did not converge");
    }
    return model.inverse(b(x));
  };
}

Jet1 oracle_jet_mul(const GroupoidModel& model, const Jet1& j1, const Jet1& j2,
                    const DiffOptions& opts) {
  require_composable(model, j1.arrow.coords, j2.arrow.coords, "jet product");
  const Bisection c =
      compose_bisections(model, model.extend_bisection(j1), model.extend_bisection(j2));
  return oracle_jet(model, c, j2.base(), opts);
}

Jet1 oracle_jet_inverse(const GroupoidModel& model, const Jet1& j, const DiffOptions& opts) {
  const Bisection inv = invert_bisection(model, model.extend_bisection(j), j.base());
  return oracle_jet(model, inv, j.arrow.target, opts);
}

Jet1 identity_jet(const GroupoidModel& model, const Vec& m) {
  return Jet1{model.unit_arrow(m), model.unit_jacobian(m)};
}

void check_jet(const GroupoidModel& model, const Jet1& j, double tol) {
  const Mat ja = model.source_jacobian(j.arrow.coords);
  const Mat err = ja * j.mu - Mat::Identity(model.base_dim, model.base_dim);
  if (err.cwiseAbs().maxCoeff() > tol) {
    throw NotABisectionError("jet: T alpha . mu is not the identity");
  }
  const double det = (model.target_jacobian(j.arrow.coords) * j.mu).determinant();
  if (std::abs(det) < model.tol.singular) {
    throw SingularError("jet: T beta . mu is not invertible");
  }
}

double jet_distance(const Jet1& a, const Jet1& b) {
  double d = max_abs(a.arrow.coords - b.arrow.coords);
  if (a.mu.size() > 0) d = std::max(d, (a.mu - b.mu).cwiseAbs().maxCoeff());
  return d;
}

Bisection affine_bisection(const Jet1& j) {
  return [g = j.arrow.coords, mu = j.mu, m = j.base()](const Vec& x) -> Vec {
    return g + mu * (x - m);
  };
}

}  // namespace cartan

#include "cartan/jet_algebra.hpp"

#include "cartan/errors.hpp"

#include <cmath>

namespace cartan {

namespace {

constexpr double kBaseTol = 1e-8;

void require_base(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size() || (a - b).cwiseAbs().maxCoeff() > kBaseTol) {
    throw BaseMismatchError(std::string(what) + ": base points differ");
  }
}

Mat checked_inverse(const Mat& a, double tol, const char* what) {
  Eigen::FullPivLU<Mat> lu(a);
  if (std::abs(lu.determinant()) < tol) throw SingularError(std::string(what) + ": singular matrix");
  return lu.inverse();
}

// T R_{g^{-1}} at g, mapping the alpha-fibre through g to g|_{beta(g)}.
Mat right_by_inverse(const GroupoidModel& model, const Vec& g) {
  return right_translation_jacobian(model, model.inverse(g), g);
}

// T L_g . T I at unit(alpha(g)).
Mat left_inverse_at_unit(const GroupoidModel& model, const Vec& g, const Vec& m) {
  const Vec e = model.unit(m);
  return left_translation_jacobian(model, g, e) * inversion_jacobian(model, e);
}

}  // namespace

KernelHom zero_hom(const GroupoidModel& model, const Vec& m) {
  return KernelHom{m, Mat::Zero(model.arrow_dim, model.base_dim)};
}

Mat hom_tm(const GroupoidModel& model, const KernelHom& phi) {
  return Mat::Identity(model.base_dim, model.base_dim) - anchor_matrix(model, phi.base) * phi.phi;
}

Mat hom_algebroid(const GroupoidModel& model, const KernelHom& phi) {
  return Mat::Identity(model.arrow_dim, model.arrow_dim) - phi.phi * anchor_matrix(model, phi.base);
}

bool is_invertible(const GroupoidModel& model, const KernelHom& phi) {
  return std::abs(hom_tm(model, phi).determinant()) > model.tol.singular;
}

KernelHom aut_mul(const GroupoidModel& model, const KernelHom& psi, const KernelHom& phi) {
  require_base(psi.base, phi.base, "aut_mul");
  const Mat sharp = anchor_matrix(model, phi.base);
  return KernelHom{phi.base, psi.phi + phi.phi - psi.phi * sharp * phi.phi};
}

KernelHom aut_inv(const GroupoidModel& model, const KernelHom& phi) {
  const Mat inv = checked_inverse(hom_tm(model, phi), model.tol.singular, "aut_inv");
  return KernelHom{phi.base, -phi.phi * inv};
}

Jet1 vee(const GroupoidModel& model, const KernelHom& phi) {
  if (!is_invertible(model, phi)) throw SingularError("vee: phi^TM is singular");
  return Jet1{model.unit_arrow(phi.base), model.unit_jacobian(phi.base) - phi.phi};
}

KernelHom unvee(const GroupoidModel& model, const Jet1& j) {
  const Vec m = j.base();
  if ((j.arrow.coords - model.unit(m)).cwiseAbs().maxCoeff() > kBaseTol) {
    throw BaseMismatchError("unvee: jet is not over a unit");
  }
  return KernelHom{m, model.unit_jacobian(m) - j.mu};
}

Mat adjoint_tm_matrix(const GroupoidModel& model, const Jet1& mu) {
  return model.target_jacobian(mu.arrow.coords) * mu.mu;
}

Mat adjoint_algebroid_matrix(const GroupoidModel& model, const Jet1& mu) {
  const Vec& g = mu.arrow.coords;
  const Vec& m = mu.arrow.source;
  const Mat sharp = anchor_matrix(model, m);
  return right_by_inverse(model, g) * (mu.mu * sharp - left_inverse_at_unit(model, g, m));
}

Vec adjoint(const GroupoidModel& model, const Jet1& mu, const Vec& v) {
  return adjoint_tm_matrix(model, mu) * v;
}

AlgebroidVec adjoint(const GroupoidModel& model, const Jet1& mu, const AlgebroidVec& x) {
  require_base(x.base, mu.arrow.source, "adjoint");
  return AlgebroidVec{mu.arrow.target, adjoint_algebroid_matrix(model, mu) * x.vec};
}

KernelHom adjoint(const GroupoidModel& model, const Jet1& mu, const KernelHom& phi) {
  require_base(phi.base, mu.arrow.source, "adjoint");
  const Mat ad_tm_inv = checked_inverse(adjoint_tm_matrix(model, mu), model.tol.singular, "adjoint");
  return KernelHom{mu.arrow.target, adjoint_algebroid_matrix(model, mu) * phi.phi * ad_tm_inv};
}

Jet1 jet_invert(const GroupoidModel& model, const Jet1& mu) {
  const Vec& g = mu.arrow.coords;
  const Mat ad_inv = checked_inverse(adjoint_tm_matrix(model, mu), model.tol.singular, "jet_invert");
  return Jet1{model.arrow(model.inverse(g)), inversion_jacobian(model, g) * mu.mu * ad_inv};
}

Jet1 mul_kernel_right(const GroupoidModel& model, const Jet1& mu, const KernelHom& phi) {
  require_base(phi.base, mu.arrow.source, "mul_kernel_right");
  if (!is_invertible(model, phi)) throw SingularError("mul_kernel_right: phi^TM is singular");
  const Mat out = mu.mu * hom_tm(model, phi) +
                  left_inverse_at_unit(model, mu.arrow.coords, phi.base) * phi.phi;
  return Jet1{mu.arrow, out};
}

Jet1 mul_kernel_left(const GroupoidModel& model, const KernelHom& phi, const Jet1& mu) {
  require_base(phi.base, mu.arrow.target, "mul_kernel_left");
  const KernelHom pulled = adjoint(model, jet_invert(model, mu), phi);
  return mul_kernel_right(model, mu, pulled);
}

KernelHom kernel_difference(const GroupoidModel& model, const Jet1& nu, const Jet1& mu) {
  if ((nu.arrow.coords - mu.arrow.coords).cwiseAbs().maxCoeff() > kBaseTol) {
    throw BaseMismatchError("kernel_difference: jets over different arrows");
  }
  const Mat ad_inv =
      checked_inverse(adjoint_tm_matrix(model, mu), model.tol.singular, "kernel_difference");
  const Mat psi = right_by_inverse(model, mu.arrow.coords) * (mu.mu - nu.mu) * ad_inv;
  return KernelHom{mu.arrow.target, psi};
}

JetParts jet_decompose(const Jet1& nu, const CartanConnection& s) {
  const GroupoidModel& model = *s.model;
  const Jet1 horizontal = s(nu.arrow);
  return JetParts{nu.arrow, kernel_difference(model, nu, horizontal)};
}

Jet1 jet_assemble(const JetParts& parts, const CartanConnection& s) {
  return mul_kernel_left(*s.model, parts.phi, s(parts.arrow));
}

Jet1 jet_mul(const Jet1& mu1, const Jet1& mu2, const CartanConnection& s) {
  const GroupoidModel& model = *s.model;
  const double gap = (mu1.arrow.source - mu2.arrow.target).cwiseAbs().maxCoeff();
  if (gap > model.tol.composability) throw CompositionError("jet_mul: arrows are not composable");
  const JetParts p1 = jet_decompose(mu1, s);
  const JetParts p2 = jet_decompose(mu2, s);
  const KernelHom moved = adjoint(model, s(p1.arrow), p2.phi);
  const KernelHom phi = aut_mul(model, p1.phi, moved);
  const Arrow g = model.arrow(model.product(p1.arrow.coords, p2.arrow.coords));
  return jet_assemble(JetParts{g, phi}, s);
}

JetBisection assemble_bisection(const GroupoidModel& model, Bisection b, KernelSection phi) {
  return [&model, b = std::move(b), phi = std::move(phi)](const Vec& m) {
    const Jet1 tb = oracle_jet(model, b, m);
    return mul_kernel_left(model, phi(tb.arrow.target), tb);
  };
}

KernelSection act_on_kernel_section(const GroupoidModel& model, Bisection b, KernelSection phi) {
  return [&model, b = std::move(b), phi = std::move(phi)](const Vec& target) {
    // Solve beta(b(m)) = target for m by Newton iteration started at the target.
    const VectorFn along = [&](const Vec& x) { return model.target(b(x)); };
    Vec m = target;
    for (int it = 0; it < 60; ++it) {
      const Vec r = along(m) - target;
      if (r.cwiseAbs().maxCoeff() < 1e-15) break;
      const Vec dm = jacobian_fd(along, m, kStructureDiff).fullPivLu().solve(r);
      m -= dm;
      if (!m.allFinite()) throw NonFiniteError("act_on_kernel_section: Newton diverged");
      if (dm.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    const Jet1 tb = oracle_jet(model, b, m);
    return adjoint(model, tb, phi(m));
  };
}

KernelSection kernel_section_product(const GroupoidModel& model, KernelSection a, KernelSection b) {
  return [&model, a = std::move(a), b = std::move(b)](const Vec& m) {
    return aut_mul(model, a(m), b(m));
  };
}

JetBisection compose_jet_bisections(const GroupoidModel& model, JetBisection a, JetBisection b) {
  return [&model, a = std::move(a), b = std::move(b)](const Vec& m) {
    const Jet1 right = b(m);
    return oracle_jet_mul(model, a(right.arrow.target), right);
  };
}

}  // namespace cartan

#pragma once

// Closed-form arithmetic in the jet groupoid: the kernel group of homomorphisms
// phi: TM -> g, the adjoint representations, inversion, products with kernel
// elements, and the semidirect decomposition relative to a multiplicative
// Cartan connection.

#include "cartan/cartan_connection.hpp"
#include "cartan/groupoid.hpp"

#include <utility>

namespace cartan {

/// phi: T_mM -> g|_m. Columns are N-vectors at unit(m) tangent to the source fibre.
struct KernelHom {
  Vec base;
  Mat phi;  // N x n
};

KernelHom zero_hom(const GroupoidModel& model, const Vec& m);

/// phi^TM = id - # phi (n x n).
Mat hom_tm(const GroupoidModel& model, const KernelHom& phi);
/// phi^g = id - phi # (N x N, meaningful on g|_m).
Mat hom_algebroid(const GroupoidModel& model, const KernelHom& phi);
/// True when |det phi^TM| exceeds the singularity threshold.
bool is_invertible(const GroupoidModel& model, const KernelHom& phi);

/// psi phi = psi + phi - psi # phi.
KernelHom aut_mul(const GroupoidModel& model, const KernelHom& psi, const KernelHom& phi);
/// phi^{-1} = -phi (phi^TM)^{-1}.
KernelHom aut_inv(const GroupoidModel& model, const KernelHom& phi);

/// The kernel jet v -> v - phi v over unit(m).
Jet1 vee(const GroupoidModel& model, const KernelHom& phi);
/// Inverse of `vee` on jets over units.
KernelHom unvee(const GroupoidModel& model, const Jet1& j);

// Adjoint actions of a jet mu over g: alpha(g) = m -> beta(g).
Mat adjoint_tm_matrix(const GroupoidModel& model, const Jet1& mu);
Mat adjoint_algebroid_matrix(const GroupoidModel& model, const Jet1& mu);

Vec adjoint(const GroupoidModel& model, const Jet1& mu, const Vec& v);
AlgebroidVec adjoint(const GroupoidModel& model, const Jet1& mu, const AlgebroidVec& x);
KernelHom adjoint(const GroupoidModel& model, const Jet1& mu, const KernelHom& phi);

/// mu^{-1}(v) = TI . mu(Ad_mu^{-1} v), over inv(g).
Jet1 jet_invert(const GroupoidModel& model, const Jet1& mu);

/// mu phi-check (v) = mu(phi^TM v) + TL_g . TI . (phi v).
Jet1 mul_kernel_right(const GroupoidModel& model, const Jet1& mu, const KernelHom& phi);
/// phi-check mu, with phi based at beta(g); computed as mu (Ad_{mu^{-1}} phi)-check.
Jet1 mul_kernel_left(const GroupoidModel& model, const KernelHom& phi, const Jet1& mu);

/// The kernel element psi with nu = psi-check mu, for nu, mu over the same arrow:
/// psi v = TR_{g^{-1}} (mu(Ad_mu^{-1} v) - nu(Ad_mu^{-1} v)).
KernelHom kernel_difference(const GroupoidModel& model, const Jet1& nu, const Jet1& mu);

struct JetParts {
  Arrow arrow;
  KernelHom phi;  ///< based at beta(arrow)
};

/// nu = phi-check S(g).
JetParts jet_decompose(const Jet1& nu, const CartanConnection& s);
Jet1 jet_assemble(const JetParts& parts, const CartanConnection& s);

/// Product through the semidirect decomposition (g1, phi1)(g2, phi2) = (g1 g2, phi1 Ad_{S(g1)} phi2).
Jet1 jet_mul(const Jet1& mu1, const Jet1& mu2, const CartanConnection& s);

/// Kernel-valued section m -> Phi(m).
using KernelSection = std::function<KernelHom(const Vec&)>;
/// Bisection of the jet groupoid.
using JetBisection = std::function<Jet1(const Vec&)>;

/// a(b, Phi)(m) = Phi(m')-check T_m b with m' = beta(b(m)).
JetBisection assemble_bisection(const GroupoidModel& model, Bisection b, KernelSection phi);

/// (b . Phi)(m') = Ad_{T_m b} Phi(m), m' = beta(b(m)).
KernelSection act_on_kernel_section(const GroupoidModel& model, Bisection b, KernelSection phi);

/// Pointwise product of kernel sections.
KernelSection kernel_section_product(const GroupoidModel& model, KernelSection a, KernelSection b);

/// Product of jet-groupoid bisections using the oracle jet product.
JetBisection compose_jet_bisections(const GroupoidModel& model, JetBisection a, JetBisection b);

}  // namespace cartan

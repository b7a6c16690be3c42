#include "cartan/lab/registry.hpp"

#include "cartan/connection.hpp"
#include "cartan/curvature.hpp"
#include "cartan/jet_algebra.hpp"
#include "cartan/sampling.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace cartan::lab {

namespace {

constexpr double kMargin = 0.05;

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double worse(double acc, double v) { return (std::isnan(v) || v > acc) ? v : acc; }

/// Runs `sample` count times with the check's own stream and records the worst value.
template <class F>
void measure(ExperimentContext& ctx, const std::string& check, int count, F&& sample) {
  Rng rng(ctx.seed_for(check));
  double worst = 0.0;
  int done = 0;
  try {
    for (int i = 0; i < count; ++i) {
      worst = worse(worst, sample(rng));
      ++done;
    }
  } catch (const std::exception& e) {
    ctx.fail(check, e.what());
    return;
  }
  ctx.add(check, done, worst);
}

/// Records a single statistic computed by `f`.
template <class F>
void single(ExperimentContext& ctx, const std::string& check, int samples, F&& f) {
  try {
    ctx.add(check, samples, f());
  } catch (const std::exception& e) {
    ctx.fail(check, e.what());
  }
}

Vec base_center(const GroupoidModel& m) { return 0.5 * (m.base_box.lower + m.base_box.upper); }

Vec reference_point(const GroupoidModel& m) {
  Vec m0 = base_center(m);
  m0[0] += 0.1;
  return m0;
}

Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

/// Smooth section of the algebroid with random coefficients in the orthonormal frame.
Section random_section(const ModelPtr& mp, Rng& rng, const Vec& m) {
  const int n = mp->base_dim;
  const int r = mp->algebroid_rank();
  const Mat c0 = rng.uniform_mat(r, 1, 1.0);
  const Mat c1 = rng.uniform_mat(r, n, 1.0);
  return [mp, c0, c1, m](const Vec& x) -> Vec {
    const Vec d = x - m;
    const Vec c = c0.col(0) + c1 * d + 0.3 * d.squaredNorm() * (c1 * d);
    return algebroid_basis(*mp, x) * c;
  };
}

KernelSection random_kernel_section(const ModelPtr& mp, Rng& rng, const Vec& center, double scale = 0.2) {
  const int n = mp->base_dim;
  const int r = mp->algebroid_rank();
  const Mat c0 = rng.uniform_mat(r, n, scale);
  std::vector<Mat> slopes;
  for (int l = 0; l < n; ++l) slopes.push_back(rng.uniform_mat(r, n, scale));
  return [mp, c0, slopes, center](const Vec& x) -> KernelHom {
    Mat c = c0;
    for (std::size_t l = 0; l < slopes.size(); ++l) c += (x - center)[static_cast<Eigen::Index>(l)] * slopes[l];
    return KernelHom{x, algebroid_basis(*mp, x) * c};
  };
}

Vec random_algebroid(const GroupoidModel& m, Rng& rng, const Vec& base) {
  return algebroid_basis(m, base) * rng.uniform_vec(m.algebroid_rank(), 1.0);
}

Vec sample_total(const ClassicalCartan& w, Rng& rng) {
  return concat(rng.uniform(w.base_box), 0.8 * rng.uniform(w.fibre_box));
}

// ---------------------------------------------------------------------------

void jet_axioms(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const GroupoidModel& M = *lm.model;
  const CartanConnection& S = lm.connection;
  const int count = ctx.samples();

  measure(ctx, "groupoid-axioms", count, [&](Rng& rng) {
    const auto [g, h] = sample_composable(M, rng, kMargin);
    const Vec k = M.inverse(sample_arrow_from(M, rng, M.source(h), kMargin));
    const Vec gh = M.multiply(g, h);
    double e = max_abs(M.multiply(gh, k) - M.multiply(g, M.multiply(h, k)));
    e = worse(e, max_abs(M.multiply(g, M.unit(M.source(g))) - g));
    e = worse(e, max_abs(M.multiply(M.unit(M.target(g)), g) - g));
    e = worse(e, max_abs(M.multiply(M.inverse(g), g) - M.unit(M.source(g))));
    e = worse(e, max_abs(M.source(gh) - M.source(h)));
    return worse(e, max_abs(M.target(gh) - M.target(g)));
  });
  measure(ctx, "extend-bisection", count, [&](Rng& rng) {
    const Jet1 j = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    return jet_distance(oracle_jet(M, M.extend_bisection(j), j.base()), j);
  });
  measure(ctx, "jet-invert", count, [&](Rng& rng) {
    const Jet1 j = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    return jet_distance(jet_invert(M, j), oracle_jet_inverse(M, j));
  });
  measure(ctx, "mul-kernel-right", count, [&](Rng& rng) {
    const Jet1 mu = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    const KernelHom phi = sample_kernel_hom(M, rng, mu.base());
    return jet_distance(mul_kernel_right(M, mu, phi), oracle_jet_mul(M, mu, vee(M, phi)));
  });
  measure(ctx, "jet-decompose", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    const Jet1 nu = sample_jet(M, rng, g);
    const JetParts parts = jet_decompose(nu, S);
    const double e = jet_distance(oracle_jet_mul(M, vee(M, parts.phi), S.at(g)), nu);
    return worse(e, max_abs(jet_decompose(S.at(g), S).phi.phi));
  });
  measure(ctx, "jet-mul", count, [&](Rng& rng) {
    const auto [g, h] = sample_composable(M, rng, kMargin);
    const Jet1 a = sample_jet(M, rng, g);
    const Jet1 b = sample_jet(M, rng, h);
    return jet_distance(jet_mul(a, b, S), oracle_jet_mul(M, a, b));
  });
  measure(ctx, "adjoint-morphism", count, [&](Rng& rng) {
    const auto [g, h] = sample_composable(M, rng, kMargin);
    const Jet1 a = sample_jet(M, rng, g);
    const Jet1 b = sample_jet(M, rng, h);
    const Jet1 ab = jet_mul(a, b, S);
    const AlgebroidVec x{M.source(h), random_algebroid(M, rng, M.source(h))};
    const Vec v = rng.uniform_vec(M.base_dim, 1.0);
    const double e = max_abs(adjoint(M, ab, x).vec - adjoint(M, a, adjoint(M, b, x)).vec);
    return worse(e, max_abs(adjoint(M, ab, v) - adjoint(M, a, adjoint(M, b, v))));
  });
  measure(ctx, "anchor-equivariance", count, [&](Rng& rng) {
    const Jet1 mu = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    const AlgebroidVec x{mu.base(), random_algebroid(M, rng, mu.base())};
    return max_abs(anchor(M, adjoint(M, mu, x)) - adjoint(M, mu, anchor(M, x)));
  });
  measure(ctx, "inversion-tangent", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, kMargin);
    const Vec x = random_algebroid(M, rng, m);
    const Vec expected = M.unit_jacobian(m) * anchor(M, AlgebroidVec{m, x}) - x;
    return max_abs(inversion_jacobian(M, M.unit(m)) * x - expected);
  });
}

void kernel_products(ExperimentContext& ctx) {
  const GroupoidModel& M = *ctx.model().model;
  const int count = ctx.samples();

  measure(ctx, "right-product", count, [&](Rng& rng) {
    const Jet1 mu = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    const KernelHom phi = sample_kernel_hom(M, rng, mu.base());
    return jet_distance(mul_kernel_right(M, mu, phi), oracle_jet_mul(M, mu, vee(M, phi)));
  });
  measure(ctx, "left-product", count, [&](Rng& rng) {
    const Jet1 mu = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    const KernelHom phi = sample_kernel_hom(M, rng, mu.arrow.target);
    return jet_distance(mul_kernel_left(M, phi, mu), oracle_jet_mul(M, vee(M, phi), mu));
  });
  measure(ctx, "kernel-difference", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    const Jet1 mu = sample_jet(M, rng, g);
    const Jet1 nu = sample_jet(M, rng, g);
    const KernelHom psi = kernel_difference(M, nu, mu);
    return jet_distance(oracle_jet_mul(M, vee(M, psi), mu), nu);
  });
  measure(ctx, "conjugation", count, [&](Rng& rng) {
    const Jet1 mu = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    const KernelHom phi = sample_kernel_hom(M, rng, mu.base());
    const Jet1 lhs = oracle_jet_mul(M, oracle_jet_mul(M, mu, vee(M, phi)), oracle_jet_inverse(M, mu));
    return jet_distance(lhs, vee(M, adjoint(M, mu, phi)));
  });
  measure(ctx, "right-difference", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    const Jet1 mu = sample_jet(M, rng, g);
    const KernelHom phi = sample_kernel_hom(M, rng, mu.base());
    const Jet1 nu = mul_kernel_right(M, mu, phi);
    const Mat tr = right_translation_jacobian(M, g, M.unit(mu.arrow.target));
    double e = 0.0;
    for (int i = 0; i < M.base_dim; ++i) {
      const Vec v = Vec::Unit(M.base_dim, i);
      const AlgebroidVec x{mu.base(), phi.phi * v};
      e = worse(e, max_abs((mu.mu - nu.mu) * v - tr * adjoint(M, mu, x).vec));
    }
    return e;
  });
}

void semidirect(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const ModelPtr mp = lm.model;
  const GroupoidModel& M = *mp;
  const CartanConnection& S = lm.connection;
  const int count = ctx.samples();

  measure(ctx, "vee-morphism", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, kMargin);
    const KernelHom psi = sample_kernel_hom(M, rng, m);
    const KernelHom phi = sample_kernel_hom(M, rng, m);
    return jet_distance(vee(M, aut_mul(M, psi, phi)), oracle_jet_mul(M, vee(M, psi), vee(M, phi)));
  });
  measure(ctx, "vee-equivariance", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, kMargin);
    const KernelHom phi = sample_kernel_hom(M, rng, m);
    const Jet1 j = vee(M, phi);
    const Mat basis = algebroid_basis(M, m);
    const double e = max_abs(adjoint_tm_matrix(M, j) - hom_tm(M, phi));
    return worse(e, max_abs((adjoint_algebroid_matrix(M, j) - hom_algebroid(M, phi)) * basis));
  });
  // Bisections of J^1 G multiply as the semidirect product of the bisection group
  // with kernel sections; the left side is computed with the oracle jet product.
  const int law_count = std::max(1, count / 4);
  measure(ctx, "bisection-law", law_count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.2);
    const Bisection b2 = M.extend_bisection(sample_jet(M, rng, sample_arrow_from(M, rng, m, 0.2), 0.5));
    const Vec m1 = M.target(b2(m));
    const Bisection b1 = M.extend_bisection(sample_jet(M, rng, sample_arrow_from(M, rng, m1, 0.2), 0.5));
    const KernelSection phi1 = random_kernel_section(mp, rng, m1);
    const KernelSection phi2 = random_kernel_section(mp, rng, m);
    const JetBisection lhs =
        compose_jet_bisections(M, assemble_bisection(M, b1, phi1), assemble_bisection(M, b2, phi2));
    const JetBisection rhs = assemble_bisection(
        M, compose_bisections(M, b1, b2), kernel_section_product(M, phi1, act_on_kernel_section(M, b1, phi2)));
    return jet_distance(lhs(m), rhs(m));
  });
  measure(ctx, "parts-roundtrip", count, [&](Rng& rng) {
    const Jet1 nu = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    return jet_distance(jet_assemble(jet_decompose(nu, S), S), nu);
  });
  measure(ctx, "product-rule", count, [&](Rng& rng) {
    const auto [g, h] = sample_composable(M, rng, kMargin);
    const Jet1 a = sample_jet(M, rng, g);
    const Jet1 b = sample_jet(M, rng, h);
    return jet_distance(jet_mul(a, b, S), oracle_jet_mul(M, a, b));
  });
  measure(ctx, "horizontal-product", count, [&](Rng& rng) {
    const auto [g, h] = sample_composable(M, rng, kMargin);
    // Horizontal elements multiply to a horizontal element: no kernel part.
    return max_abs(jet_decompose(oracle_jet_mul(M, S.at(g), S.at(h)), S).phi.phi);
  });
}

void inversion(ExperimentContext& ctx) {
  const GroupoidModel& M = *ctx.model().model;
  const int count = ctx.samples();

  measure(ctx, "jet-invert", count, [&](Rng& rng) {
    const Jet1 j = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    return jet_distance(jet_invert(M, j), oracle_jet_inverse(M, j));
  });
  measure(ctx, "involution", count, [&](Rng& rng) {
    const Jet1 j = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    return jet_distance(jet_invert(M, jet_invert(M, j)), j);
  });
  measure(ctx, "inverse-law", count, [&](Rng& rng) {
    const Jet1 j = sample_jet(M, rng, sample_arrow(M, rng, kMargin));
    return jet_distance(oracle_jet_mul(M, jet_invert(M, j), j), identity_jet(M, j.base()));
  });
  measure(ctx, "aut-inverse", count, [&](Rng& rng) {
    const KernelHom phi = sample_kernel_hom(M, rng, sample_base(M, rng, kMargin));
    return max_abs(aut_mul(M, aut_inv(M, phi), phi).phi);
  });
  measure(ctx, "aut-involution", count, [&](Rng& rng) {
    const KernelHom phi = sample_kernel_hom(M, rng, sample_base(M, rng, kMargin));
    return max_abs(aut_inv(M, aut_inv(M, phi)).phi - phi.phi);
  });
}

void multiplicativity(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const ModelPtr mp = lm.model;
  const GroupoidModel& M = *mp;
  const CartanConnection& S = lm.connection;
  const int count = ctx.samples();

  single(ctx, "multiplicative", count, [&] {
    return check_multiplicative(S, ctx.seed_for("multiplicative"), count, ctx.tolerance("multiplicative")).max_error;
  });
  measure(ctx, "unit-identity", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng);
    return jet_distance(S.at(M.unit(m)), identity_jet(M, m));
  });
  // S perturbed on the left by a fixed nonzero kernel section must be caught.
  single(ctx, "fault-injection", count, [&] {
    Rng rng(ctx.seed_for("fault-injection"));
    const KernelSection phi = random_kernel_section(mp, rng, base_center(M), 0.3);
    CartanConnection bad = S;
    bad.name = S.name + "-perturbed";
    bad.mu = [mp, S, phi](const Vec& g) -> Mat {
      return mul_kernel_left(*mp, phi(mp->target(g)), S.at(g)).mu;
    };
    return check_multiplicative(bad, ctx.seed_for("fault-injection"), count).max_error;
  });
}

void nabla_compare(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const ModelPtr mp = lm.model;
  const GroupoidModel& M = *mp;
  const CartanConnection& S = lm.connection;
  const int count = ctx.samples();
  const int n = M.base_dim;

  const AlgebroidConnection flow = infinitesimalize(S, Provenance::FlowFormula);
  const AlgebroidConnection transport = infinitesimalize(S, Provenance::ParallelTransport);
  const AlgebroidConnection linear = infinitesimalize(S, Provenance::Linearized);

  measure(ctx, "flow-vs-transport", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.1);
    const Vec v = rng.uniform_vec(n, 1.0);
    const Section x = random_section(mp, rng, m);
    return max_abs(flow.nabla(m, v, x) - transport.nabla(m, v, x));
  });
  measure(ctx, "flow-vs-linearized", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.1);
    const Vec v = rng.uniform_vec(n, 1.0);
    const Section x = random_section(mp, rng, m);
    return max_abs(flow.nabla(m, v, x) - linear.nabla(m, v, x));
  });
  measure(ctx, "path-independence", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.1);
    const Vec v = rng.uniform_vec(n, 1.0);
    InfinitesimalOptions bent;
    bent.path_curvature = rng.uniform_vec(n, 1.0);
    const AlgebroidConnection curved = infinitesimalize(S, Provenance::ParallelTransport, bent);
    const Section x = random_section(mp, rng, m);
    return max_abs(curved.nabla(m, v, x) - transport.nabla(m, v, x));
  });
  measure(ctx, "additivity", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.1);
    const Vec v = rng.uniform_vec(n, 1.0);
    const Vec w = rng.uniform_vec(n, 1.0);
    const Section x = random_section(mp, rng, m);
    return max_abs(flow.nabla(m, v + w, x) - flow.nabla(m, v, x) - flow.nabla(m, w, x));
  });
  measure(ctx, "leibniz", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.1);
    const Vec v = rng.uniform_vec(n, 1.0);
    const Section x = random_section(mp, rng, m);
    const Vec a = rng.uniform_vec(n, 1.0);
    const auto f = [a](const Vec& y) { return 1.0 + 0.5 * std::sin(a.dot(y)); };
    const Section fx = [x, f](const Vec& y) -> Vec { return f(y) * x(y); };
    const double df = 0.5 * std::cos(a.dot(m)) * a.dot(v);
    return max_abs(flow.nabla(m, v, fx) - df * x(m) - f(m) * flow.nabla(m, v, x));
  });
  measure(ctx, "transport-fixes-units", count, [&](Rng& rng) {
    const Vec m = sample_base(M, rng, 0.2);
    const Vec v = rng.uniform_vec(n, 0.1);
    const Arrow end = parallel_transport(S, Path::straight(m, v), 0.0, 1.0, M.unit_arrow(m));
    return max_abs(end.coords - M.unit(m + v));
  });
  if (lm.classical) {
    const AlgebroidConnection classical = nabla_omega(*lm.classical, mp);
    measure(ctx, "classical-vs-flow", count, [&](Rng& rng) {
      const Vec m = sample_base(M, rng, 0.1);
      const Vec v = rng.uniform_vec(n, 1.0);
      const Section x = random_section(mp, rng, m);
      return max_abs(classical.nabla(m, v, x) - flow.nabla(m, v, x));
    });
  }
}

void flatness(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const CartanConnection& S = lm.connection;
  const int count = ctx.samples();
  const double tol = ctx.tolerance("curvature");

  FlatnessReport report;
  try {
    report = flatness_experiment(S, ctx.seed_for("flatness"), count, tol);
  } catch (const std::exception& e) {
    ctx.fail(lm.expect_flat ? "curvature" : "non-flat-fraction", e.what());
    return;
  }
  if (lm.expect_flat) {
    ctx.add("curvature", count, report.max_curvature);
    ctx.add("torsion", count, report.max_torsion);
  } else {
    ctx.add("non-flat-fraction", count, report.fraction_both_above(10.0),
            "fraction of samples with both norms above 10x tolerance");
  }
  ctx.add("consistency", count, report.consistent ? 0.0 : 1.0,
          report.consistent ? "" : "curvature and torsion verdicts disagree");

  const AlgebroidConnection nabla = infinitesimalize(S, Provenance::Linearized);
  measure(ctx, "curvature-antisymmetry", std::min(count, 5), [&](Rng& rng) {
    return curvature(nabla, sample_base(*lm.model, rng, kMargin)).antisymmetry_defect();
  });
}

void reconstruct(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const GroupoidModel& M = *lm.model;
  const AlgebroidConnection nabla = infinitesimalize(lm.connection, Provenance::Linearized);
  const Vec m0 = reference_point(M);
  const Grid grid;
  const int points = static_cast<int>(grid_points(m0, grid).size());

  if (!lm.expect_flat) {
    try {
      reconstruct_action(nabla, m0, grid);
      ctx.add("holonomy-detected", points, 0.0, "reconstruction succeeded on a non-flat connection");
    } catch (const FlatnessError& e) {
      ctx.add("holonomy-detected", points, 1.0, e.what());
    } catch (const std::exception& e) {
      ctx.fail("holonomy-detected", e.what());
    }
    return;
  }

  ReconstructionResult res;
  try {
    res = reconstruct_action(nabla, m0, grid);
  } catch (const std::exception& e) {
    ctx.fail("dimension", e.what());
    return;
  }
  ctx.add("dimension", 1, std::abs(res.dim_g0 - M.algebroid_rank()),
          "dim g0 = " + std::to_string(res.dim_g0) + ", rank = " + std::to_string(M.algebroid_rank()));
  double anti = 0.0;
  for (const Mat& c : res.structure_constants) anti = worse(anti, max_abs(c + c.transpose()));
  ctx.add("structure-antisymmetry", 1, anti);
  ctx.add("jacobi", 1, res.jacobi_residual);
  ctx.add("anchor-homomorphism", points, res.anchor_residual);
  ctx.add("parallelism", points, res.parallel_residual);
  ctx.add("path-independence", points, res.path_independence);
}

// ---------------------------------------------------------------------------
// Classical bridge.

Vec pushed_column(const VectorFn& psi, const Vec& g, const Vec& v) { return directional_fd(psi, g, v, kOracleDiff); }

double max_curvature_form(const ClassicalCartan& w, const VBracket& b, const Vec& p) {
  const int d = w.dim();
  double out = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      out = worse(out, max_abs(curvature_form(w, b, p, Vec::Unit(d, i), Vec::Unit(d, j))));
    }
  }
  return out;
}

void classical_bridge(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const ModelPtr mp = lm.model;
  const GroupoidModel& M = *mp;
  const CartanConnection& S = lm.connection;
  const int count = ctx.samples();
  const int n = M.base_dim;
  const Vec m0 = reference_point(M);

  // The classical form attached to the model: the defining one for gauge models,
  // otherwise the one recovered from S.
  ClassicalCartan w0;
  ModelWithConnection gauge;
  ClassicalCartan recovered;
  try {
    w0 = lm.classical ? *lm.classical : recover_omega(S, m0);
    gauge = lm.classical ? ModelWithConnection{mp, S} : classical_to_groupoid(w0);
    gauge.connection = verified(gauge.connection);
    recovered = recover_omega(S, m0);
  } catch (const std::exception& e) {
    ctx.fail("omega-roundtrip", e.what());
    return;
  }
  const GroupoidModel& G = *gauge.model;
  const int dp = w0.dim();
  ctx.add("gauge-multiplicative", gauge.connection.record.samples, gauge.connection.record.max_error);

  measure(ctx, "omega-fundamental", count, [&](Rng& rng) {
    const Vec p = sample_total(w0, rng);
    const Vec v = rng.uniform_vec(dp, 1.0);
    const Vec f = 0.8 * rng.uniform(w0.fibre_box);
    return worse(check_classical(w0, p, v, f).fundamental, check_classical(recovered, p, v, f).fundamental);
  });
  measure(ctx, "omega-equivariance", count, [&](Rng& rng) {
    const Vec p = sample_total(w0, rng);
    const Vec v = rng.uniform_vec(dp, 1.0);
    const Vec f = 0.8 * rng.uniform(w0.fibre_box);
    return worse(check_classical(w0, p, v, f).equivariance, check_classical(recovered, p, v, f).equivariance);
  });

  // recover_omega after classical_to_groupoid gives back omega.
  {
    ClassicalCartan again;
    Mat ident;
    try {
      again = recover_omega(gauge.connection, m0);
      ident = omega_identification(w0, again, w0.slice(m0));
    } catch (const std::exception& e) {
      ctx.fail("omega-roundtrip", e.what());
    }
    if (again.omega) {
      measure(ctx, "omega-roundtrip", count, [&](Rng& rng) {
        const Vec p = sample_total(w0, rng);
        return max_abs(again.matrix(p) - ident * w0.matrix(p));
      });
    }
  }

  // classical_to_groupoid after recover_omega gives back S, pushed through the
  // isomorphism of the gauge groupoid onto the model.
  {
    const FibreChart chart = *M.fibre_chart;
    ModelWithConnection rebuilt;
    try {
      rebuilt = classical_to_groupoid(recovered);
    } catch (const std::exception& e) {
      ctx.fail("s-roundtrip", e.what());
    }
    if (rebuilt.model) {
      const VectorFn psi = [mp, chart, m0, recovered, n](const Vec& gp) -> Vec {
        const Vec q = gp.head(recovered.dim());
        const Vec to = chart.to_arrow(m0, recovered.slice(gp.tail(n)));
        return mp->product(chart.to_arrow(m0, q), mp->inverse(to));
      };
      measure(ctx, "s-roundtrip", count, [&](Rng& rng) {
        const Vec gp = sample_arrow(*rebuilt.model, rng, kMargin);
        const Mat mu = rebuilt.connection.mu(gp);
        const Vec g = psi(gp);
        Mat pushed(M.arrow_dim, n);
        for (int i = 0; i < n; ++i) pushed.col(i) = pushed_column(psi, gp, mu.col(i));
        const double e = max_abs(pushed - S.mu(g));
        return worse(e, max_abs(M.source(g) - gp.tail(n)));
      });
    }
  }

  measure(ctx, "representative-independence", count, [&](Rng& rng) {
    const Vec g = sample_arrow(G, rng, kMargin);
    const Vec q = g.head(dp);
    const Vec m = g.tail(n);
    const Vec f = 0.8 * rng.uniform(w0.fibre_box);
    const Vec s = w0.slice(m);
    const Vec qh = w0.right_action(q, f);
    const Vec sh = w0.right_action(s, f);
    const Mat tr_h = jacobian_fd([&](const Vec& x) { return w0.right_action(x, f); }, s, kStructureDiff);
    const Vec finv = w0.h_inverse(f);
    const Mat tr_back = jacobian_fd([&](const Vec& x) { return w0.right_action(x, finv); }, qh, kStructureDiff);
    const Mat lifted = tr_h.leftCols(n);
    const Mat top = tr_back * w0.matrix(qh).fullPivLu().solve(w0.matrix(sh) * lifted);
    return max_abs(top - gauge.connection.mu(g).topRows(dp));
  });

  {
    const AlgebroidConnection classical = nabla_omega(w0, gauge.model);
    const AlgebroidConnection flow = infinitesimalize(gauge.connection, Provenance::FlowFormula);
    measure(ctx, "nabla-classical", count, [&](Rng& rng) {
      const Vec m = sample_base(G, rng, 0.1);
      const Vec v = rng.uniform_vec(n, 1.0);
      const Section x = random_section(gauge.model, rng, m);
      return max_abs(classical.nabla(m, v, x) - flow.nabla(m, v, x));
    });
  }

  // Identities characterising the covariant derivative of the form.
  measure(ctx, "vertical-bracket", count, [&](Rng& rng) {
    const int k = w0.fibre_dim;
    const Vec a = rng.uniform_vec(dp, 1.0);
    const Mat amat = rng.uniform_mat(dp, n, 1.0);
    const Mat cmat = rng.uniform_mat(k, dp, 1.0);
    const Vec c0 = rng.uniform_vec(k, 1.0);
    // H-invariant field pushed from the slice, and a vertical field with varying coefficients.
    const VectorFn x = [&w0, a, amat, n, k](const Vec& p) -> Vec {
      const Vec m = p.head(n);
      const Vec f = p.tail(k);
      const Mat tr = jacobian_fd([&](const Vec& y) { return w0.right_action(y, f); }, w0.slice(m), kStructureDiff);
      return tr * (a + amat * m);
    };
    const VectorFn y = [&w0, cmat, c0, k, dp](const Vec& p) -> Vec {
      Vec out = Vec::Zero(dp);
      for (int j = 0; j < k; ++j) out += (c0[j] + cmat.row(j).dot(p)) * w0.fundamental(p, j);
      return out;
    };
    const Vec p = sample_total(w0, rng);
    const Vec bracket = jacobian_fd(y, p, kStructureDiff) * x(p) - jacobian_fd(x, p, kStructureDiff) * y(p);
    return max_abs(nabla_bar(w0, p, x(p), y) - bracket);
  });
  measure(ctx, "parallel-field", count, [&](Rng& rng) {
    const Vec c = rng.uniform_vec(dp, 1.0);
    const VectorFn y = [&w0, c](const Vec& q) -> Vec { return w0.matrix(q).fullPivLu().solve(c); };
    const Vec p = sample_total(w0, rng);
    return max_abs(nabla_bar(w0, p, rng.uniform_vec(dp, 1.0), y));
  });

  const VBracket zero = [](const Vec& u, const Vec&) -> Vec { return Vec::Zero(u.size()); };
  measure(ctx, "curvature-antisymmetry", count, [&](Rng& rng) {
    const Vec p = sample_total(w0, rng);
    const Vec u = rng.uniform_vec(dp, 1.0);
    const Vec v = rng.uniform_vec(dp, 1.0);
    const VBracket& b = lm.lie_bracket ? lm.lie_bracket : zero;
    return max_abs(curvature_form(w0, b, p, u, v) + curvature_form(w0, b, p, v, u));
  });
  if (lm.lie_bracket) {
    measure(ctx, "maurer-cartan", count, [&](Rng& rng) {
      return max_curvature_form(w0, lm.lie_bracket, sample_total(w0, rng));
    });
  }

  // Curvature of the induced algebroid connection, and the covariant constancy of
  // the curvature form that it predicts.
  const AlgebroidConnection induced = nabla_omega(w0, gauge.model);
  measure(ctx, "nabla-flat", std::min(count, 10), [&](Rng& rng) {
    return curvature(induced, sample_base(G, rng, kMargin)).max_abs();
  });
  if (lm.model_bracket) {
    const int cc = std::min(count, 10);
    measure(ctx, "covariant-constancy", cc, [&](Rng& rng) {
      return classical_curvature(w0, lm.model_bracket, sample_total(w0, rng)).covariant_derivative;
    });
    if (lm.model_data_curved) {
      single(ctx, "model-data-curvature", cc, [&] {
        Rng rng(ctx.seed_for("model-data-curvature"));
        double least = std::numeric_limits<double>::infinity();
        for (int i = 0; i < cc; ++i) least = std::min(least, max_curvature_form(w0, lm.model_bracket, sample_total(w0, rng)));
        return least;
      });
    }
  }
}

// ---------------------------------------------------------------------------
// Riemannian prolongation.

Vec flat2(const Eigen::Matrix2d& a) { return Eigen::Map<const Vec>(a.data(), 4); }

Eigen::Matrix2d unflat2(const Vec& v) { return Eigen::Map<const Eigen::Matrix2d>(v.data()); }

void riemannian(ExperimentContext& ctx) {
  const LabModel& lm = ctx.model();
  const GroupoidModel& M = *lm.model;
  const CartanConnection& S = lm.connection;
  const IsoJetGeometry& geo = *lm.geometry;
  const MetricChart& metric = geo.metric();
  const int count = ctx.samples();
  const VectorFn gflat = [&metric](const Vec& x) -> Vec { return flat2(metric(x)); };

  measure(ctx, "isometry", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    const Eigen::Matrix2d a = geo.isometry(g);
    return max_abs(a.transpose() * metric(g.head(2)) * a - metric(g.tail(2)));
  });
  measure(ctx, "anchor-isometry", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    return max_abs(M.target_jacobian(g) * S.mu(g) - Mat(geo.isometry(g)));
  });
  // The one-jet S(g) determines the derivative H_i of the isometry field along a
  // representative bisection; holonomy asks for H_i e_j = H_j e_i.
  const auto derivative_of_isometry = [&](const Vec& g) {
    const Bisection b = M.extend_bisection(S.at(g));
    const VectorFn along = [&](const Vec& x) -> Vec { return flat2(geo.isometry(b(x))); };
    const Mat jac = jacobian_fd(along, g.tail(2), kOracleDiff);
    return std::array<Eigen::Matrix2d, 2>{unflat2(jac.col(0)), unflat2(jac.col(1))};
  };
  measure(ctx, "holonomic-symmetry", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    const auto h = derivative_of_isometry(g);
    return max_abs(h[0].col(1) - h[1].col(0));
  });
  measure(ctx, "first-order-metric", count, [&](Rng& rng) {
    const Vec g = sample_arrow(M, rng, kMargin);
    const Vec mp = g.head(2);
    const Vec m = g.tail(2);
    const Eigen::Matrix2d a = geo.isometry(g);
    const Eigen::Matrix2d gp = metric(mp);
    const auto h = derivative_of_isometry(g);
    double e = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Vec ai = a.col(i);
      const Eigen::Matrix2d dgp = unflat2(directional_fd(gflat, mp, ai, kOracleDiff));
      const Eigen::Matrix2d dg = unflat2(directional_fd(gflat, m, Vec::Unit(2, i), kOracleDiff));
      const Eigen::Matrix2d lhs = h[i].transpose() * gp * a + a.transpose() * dgp * a + a.transpose() * gp * h[i];
      e = worse(e, max_abs(lhs - dg));
    }
    return e;
  });
  measure(ctx, "christoffel-symmetry", count, [&](Rng& rng) {
    const Christoffel c = christoffel(metric, sample_base(M, rng));
    double e = 0.0;
    for (const Mat& gk : c.gamma) e = worse(e, max_abs(gk - gk.transpose()));
    return e;
  });
  single(ctx, "multiplicative", count, [&] {
    return check_multiplicative(S, ctx.seed_for("multiplicative"), count, ctx.tolerance("multiplicative")).max_error;
  });
  if (lm.id == "isojet-flat") {
    measure(ctx, "euclidean-rigid", count, [&](Rng& rng) {
      const Vec g = sample_arrow(M, rng, kMargin);
      const Vec m = g.tail(2);
      const Bisection rigid = [g, m](const Vec& x) -> Vec {
        Vec out(5);
        out.head(2) = g.head(2) + rotation2(g[2]) * (x - m);
        out[2] = g[2];
        out.tail(2) = x;
        return out;
      };
      return jet_distance(S.at(g), oracle_jet(M, rigid, m));
    });
  }
}

std::string needs_fibre_chart(const LabModel& m) {
  return m.model->fibre_chart ? std::string{} : "the model has no source-fibre chart (not a transitive model with a bundle presentation)";
}

std::string needs_geometry(const LabModel& m) {
  return m.geometry ? std::string{} : "the model is not an isometric-jet model";
}

std::vector<ExperimentInfo> build_experiments() {
  const Bound up = Bound::Upper;
  const Bound low = Bound::Lower;
  std::vector<ExperimentInfo> out;
  out.push_back({"jet-axioms",
                 "groupoid axioms and closed-form jet arithmetic against the bisection-jet oracle",
                 50,
                 {{"groupoid-axioms", 1e-10, up},
                  {"extend-bisection", 1e-8, up},
                  {"jet-invert", 1e-7, up},
                  {"mul-kernel-right", 1e-7, up},
                  {"jet-decompose", 1e-7, up},
                  {"jet-mul", 1e-7, up},
                  {"adjoint-morphism", 1e-7, up},
                  {"anchor-equivariance", 1e-8, up},
                  {"inversion-tangent", 1e-8, up}},
                 {},
                 jet_axioms});
  out.push_back({"kernel-products",
                 "products of jets with kernel elements on either side, conjugation and difference identities",
                 50,
                 {{"right-product", 1e-7, up},
                  {"left-product", 1e-7, up},
                  {"kernel-difference", 1e-7, up},
                  {"conjugation", 1e-7, up},
                  {"right-difference", 1e-7, up}},
                 {},
                 kernel_products});
  out.push_back({"semidirect",
                 "kernel embedding as a morphism, semidirect bisection law and the decomposition product rule",
                 50,
                 {{"vee-morphism", 1e-7, up},
                  {"vee-equivariance", 1e-8, up},
                  {"bisection-law", 1e-7, up},
                  {"parts-roundtrip", 1e-7, up},
                  {"product-rule", 1e-7, up},
                  {"horizontal-product", 1e-7, up}},
                 {},
                 semidirect});
  out.push_back({"inversion",
                 "closed-form jet inversion and kernel-group inversion",
                 50,
                 {{"jet-invert", 1e-7, up},
                  {"involution", 1e-8, up},
                  {"inverse-law", 1e-7, up},
                  {"aut-inverse", 1e-9, up},
                  {"aut-involution", 1e-9, up}},
                 {},
                 inversion});
  out.push_back({"multiplicativity",
                 "multiplicativity of the connection, unit law, and detection of a perturbed connection",
                 30,
                 {{"multiplicative", 1e-7, up}, {"unit-identity", 1e-9, up}, {"fault-injection", 1e-3, low}},
                 {},
                 multiplicativity});
  out.push_back({"nabla-compare",
                 "infinitesimal connection by the flow formula, parallel transport, closed form and classical route",
                 30,
                 {{"flow-vs-transport", 1e-4, up},
                  {"flow-vs-linearized", 1e-4, up},
                  {"path-independence", 1e-4, up},
                  {"additivity", 1e-6, up},
                  {"leibniz", 1e-6, up},
                  {"transport-fixes-units", 1e-8, up},
                  {"classical-vs-flow", 1e-4, up}},
                 {},
                 nabla_compare});
  out.push_back({"flatness",
                 "curvature of the infinitesimal connection paired with Frobenius torsion of the distribution",
                 20,
                 {{"curvature", 1e-4, up},
                  {"torsion", 1e-4, up},
                  {"non-flat-fraction", 0.8, low},
                  {"consistency", 0.0, up},
                  {"curvature-antisymmetry", 1e-8, up}},
                 {},
                 flatness});
  out.push_back({"reconstruct",
                 "action algebroid from parallel sections of a flat connection",
                 1,
                 {{"dimension", 0.0, up},
                  {"structure-antisymmetry", 1e-12, up},
                  {"jacobi", 1e-5, up},
                  {"anchor-homomorphism", 1e-5, up},
                  {"parallelism", 1e-5, up},
                  {"path-independence", 1e-4, up},
                  {"holonomy-detected", 1.0, low}},
                 {},
                 reconstruct});
  out.push_back({"classical-bridge",
                 "classical Cartan connection round trips, induced connection and curvature form",
                 20,
                 {{"gauge-multiplicative", 1e-7, up},
                  {"omega-fundamental", 1e-9, up},
                  {"omega-equivariance", 1e-9, up},
                  {"omega-roundtrip", 1e-6, up},
                  {"s-roundtrip", 1e-6, up},
                  {"representative-independence", 1e-8, up},
                  {"nabla-classical", 1e-4, up},
                  {"vertical-bracket", 1e-6, up},
                  {"parallel-field", 1e-8, up},
                  {"curvature-antisymmetry", 1e-12, up},
                  {"maurer-cartan", 1e-6, up},
                  {"nabla-flat", 1e-4, up},
                  {"covariant-constancy", 1e-4, up},
                  {"model-data-curvature", 1e-2, low}},
                 needs_fibre_chart,
                 classical_bridge});
  out.push_back({"riemannian",
                 "prolongation connection of an isometric-jet model: isometry, holonomy and metric compatibility",
                 30,
                 {{"isometry", 1e-9, up},
                  {"anchor-isometry", 1e-9, up},
                  {"holonomic-symmetry", 1e-7, up},
                  {"first-order-metric", 1e-7, up},
                  {"christoffel-symmetry", 0.0, up},
                  {"multiplicative", 1e-7, up},
                  {"euclidean-rigid", 1e-8, up}},
                 needs_geometry,
                 riemannian});
  return out;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> experiments = build_experiments();
  return experiments;
}

}  // namespace cartan::lab

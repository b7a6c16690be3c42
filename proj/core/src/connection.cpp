#include "cartan/connection.hpp"

#include "cartan/errors.hpp"
#include "cartan/sampling.hpp"

#include <algorithm>

namespace cartan {

MultiplicativityRecord check_multiplicative(const CartanConnection& s, std::uint64_t seed, int count,
                                            double tolerance) {
  const GroupoidModel& model = *s.model;
  Rng rng(seed);
  MultiplicativityRecord rec;
  rec.tolerance = tolerance;
  for (int i = 0; i < count; ++i) {
    const auto [g1, g2] = sample_composable(model, rng);
    const Jet1 direct = s.at(model.product(g1, g2));
    const Jet1 oracle = oracle_jet_mul(model, s.at(g1), s.at(g2));
    rec.max_error = std::max(rec.max_error, jet_distance(direct, oracle));
    ++rec.samples;
  }
  rec.verified = rec.max_error <= tolerance;
  return rec;
}

CartanConnection verified(const CartanConnection& s, std::uint64_t seed, int count, double tolerance) {
  return s.with_record(check_multiplicative(s, seed, count, tolerance));
}

Path Path::straight(const Vec& m, const Vec& v) {
  return Path{[m, v](double t) -> Vec { return m + t * v; }, [v](double) -> Vec { return v; }};
}

Path Path::quadratic(const Vec& m, const Vec& v, const Vec& w) {
  return Path{[m, v, w](double t) -> Vec { return m + t * v + t * t * w; },
              [v, w](double t) -> Vec { return v + 2.0 * t * w; }};
}

Path Path::segment(const Vec& a, const Vec& b) { return straight(a, b - a); }

namespace {

Vec transport_coords(const CartanConnection& s, const Path& gamma, double t0, double t1,
                     const Vec& g, int steps) {
  if (t0 == t1) return g;
  const int n = steps > 0 ? steps : rk4_steps_for(t1 - t0);
  const TimeVectorField field = [&](double t, const Vec& x) -> Vec {
    return s.mu(x) * gamma.velocity(t);
  };
  const Box* box = s.model->domain ? &*s.model->domain : nullptr;
  try {
    return flow_time(field, g, t0, t1, n, box);
  } catch (const NonFiniteError& e) {
    throw EscapeError(std::string("parallel transport: ") + e.what());
  }
}

}  // namespace

Arrow parallel_transport(const CartanConnection& s, const Path& gamma, double t0, double t1,
                         const Arrow& g, int steps) {
  return s.model->arrow(transport_coords(s, gamma, t0, t1, g.coords, steps));
}

AlgebroidVec parallel_action(const CartanConnection& s, const Path& gamma, double t_from,
                             double t_to, const AlgebroidVec& x) {
  const GroupoidModel& model = *s.model;
  const int steps = rk4_steps_for(t_to - t_from);
  const Vec out = directional_fd(
      [&](const Vec& y) { return transport_coords(s, gamma, t_from, t_to, y, steps); },
      model.unit(gamma.point(t_from)), x.vec, kStructureDiff);
  return AlgebroidVec{gamma.point(t_to), out};
}

Bisection integral_bisection(const CartanConnection& s, const Vec& g, int steps) {
  const Vec start = s.model->source(g);
  return [s, g, start, steps](const Vec& x) {
    return transport_coords(s, Path::segment(start, x), 0.0, 1.0, g, steps);
  };
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::FlowFormula:
      return "flow-formula";
    case Provenance::ParallelTransport:
      return "parallel-transport";
    case Provenance::ClassicalOmega:
      return "classical-omega";
    case Provenance::Linearized:
      return "linearized";
  }
  return "unknown";
}

AlgebroidConnection infinitesimalize(const CartanConnection& s, Provenance method,
                                     const InfinitesimalOptions& opts) {
  const DiffOptions outer{opts.t_step, 4, false};
  AlgebroidConnection out;
  out.model = s.model;
  out.provenance = method;

  switch (method) {
    case Provenance::FlowFormula:
      out.nabla = [s, outer](const Vec& m, const Vec& v, const Section& x) -> Vec {
        const GroupoidModel& model = *s.model;
        const VectorField xr = [&](const Vec& g) { return right_invariant(model, x, g); };
        const auto phi = [&](double t, const Vec& y) { return flow(xr, y, t, rk4_steps_for(t)); };
        const Vec e = model.unit(m);
        const auto f = [&](double t) -> Vec {
          const Vec pushed = directional_fd(
              [&](const Vec& p) { return phi(t, model.unit(p)); }, m, v, kStructureDiff);
          return pushed - s.mu(phi(t, e)) * v;
        };
        return curve_derivative(f, 0.0, outer);
      };
      break;
    case Provenance::ParallelTransport:
      out.nabla = [s, outer, w = opts.path_curvature](const Vec& m, const Vec& v,
                                                      const Section& x) -> Vec {
        const Path gamma = w ? Path::quadratic(m, v, *w) : Path::straight(m, v);
        const auto f = [&](double t) -> Vec {
          const Vec at = gamma.point(t);
          return parallel_action(s, gamma, t, 0.0, AlgebroidVec{at, x(at)}).vec;
        };
        return curve_derivative(f, 0.0, outer);
      };
      break;
    case Provenance::Linearized:
      out.nabla = [s](const Vec& m, const Vec& v, const Section& x) -> Vec {
        const GroupoidModel& model = *s.model;
        const Vec dx = directional_fd(x, m, v, kStructureDiff);
        const Vec dmu = directional_fd([&](const Vec& g) -> Vec { return s.mu(g) * v; },
                                       model.unit(m), x(m), kStructureDiff);
        return dx - dmu;
      };
      break;
    case Provenance::ClassicalOmega:
      throw DomainError("infinitesimalize: the classical route is built by nabla_omega");
  }
  return out;
}

}  // namespace cartan

#pragma once

#include "cartan/classical.hpp"
#include "cartan/connection.hpp"
#include "cartan/models.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace cartan::testing {

struct Named {
  std::string name;
  ModelWithConnection mc;
  bool flat = true;
};

inline ModelWithConnection from_isojet(const MetricChart& g, double half_width, const std::string& name) {
  IsoJetModel m = make_isometry_jet_groupoid(g, Box::cube(2, half_width), name);
  return {m.model, m.connection};
}

/// One instance of every model family the library ships.
inline const std::vector<Named>& shipped_models() {
  static const std::vector<Named> models = [] {
    std::vector<Named> out;
    out.push_back({"pair", make_pair_groupoid(Box::cube(2, 1.0))});
    out.push_back({"translation", make_action_groupoid(translation_action(2))});
    out.push_back({"se2", make_action_groupoid(se2_action())});
    out.push_back({"so3", make_action_groupoid(so3_sphere_action())});
    out.push_back({"gauge_se2", classical_to_groupoid(maurer_cartan_se2())});
    out.push_back({"gauge_so3", classical_to_groupoid(maurer_cartan_so3())});
    out.push_back({"isojet_flat", from_isojet(euclidean_metric(), 1.0, "isojet-flat")});
    out.push_back({"isojet_sphere", from_isojet(sphere_metric(), 0.6, "isojet-sphere")});
    out.push_back({"isojet_hyperbolic", from_isojet(hyperbolic_metric(), 0.4, "isojet-hyperbolic")});
    out.push_back({"isojet_perturbed", from_isojet(perturbed_metric(1.0), 0.5, "isojet-perturbed"), false});
    return out;
  }();
  return models;
}

inline void PrintTo(const Named& n, std::ostream* os) { *os << n.name; }

inline std::string param_name(const ::testing::TestParamInfo<Named>& info) { return info.param.name; }

inline double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace cartan::testing

#pragma once

// A Cartan connection on a groupoid model: a section g -> S(g) of the jet groupoid
// over G, stored as the matrix part of the jet (the arrow is g itself).

#include "cartan/groupoid.hpp"

#include <string>

namespace cartan {

struct MultiplicativityRecord {
  bool verified = false;
  int samples = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
};

class CartanConnection {
 public:
  ModelPtr model;
  std::string name;
  /// Matrix part of S(g): T_{alpha(g)}M -> T_gG.
  std::function<Mat(const Vec& g)> mu;
  MultiplicativityRecord record;

  Jet1 at(const Vec& g) const { return Jet1{model->arrow(g), mu(g)}; }
  Jet1 operator()(const Arrow& g) const { return Jet1{g, mu(g.coords)}; }

  /// The distribution D(g): columns span the horizontal n-plane at g.
  Mat distribution(const Vec& g) const { return mu(g); }

  CartanConnection with_record(MultiplicativityRecord r) const {
    CartanConnection out = *this;
    out.record = r;
    return out;
  }
};

}  // namespace cartan

#pragma once

#include <string>
#include <vector>

#include "lwb/potential/solver.hpp"

namespace lwb::harnack {

using walk::Point;

struct SampleSpec {
  int targets = 16;
  int sources = 8;
};

struct HarnackReport {
  std::string side;  // "interior" or "exterior"
  double r = 0.0, R = 0.0, band = 0.0;
  // max over y and sources x, x' of H(x,y)/H(x',y), and its reciprocal
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  std::vector<Point> sources;
  std::vector<Point> targets;
  std::vector<std::vector<double>> h;  // h[source][target]
  std::string grid;
  // Exterior only.
  double truncation_radius = 0.0;
  double gap = 0.0;  // max relative change of H between K and 2K (unconditioned)
  bool conditioned = false;
};

// H_{D(0,R)^c}(x,y) for x on a grid in D(0,r) and y in the band of D(0,R).
HarnackReport interior_harnack_ratio(const walk::JumpLaw& law, double r, double R, double band,
                                     const SampleSpec& spec = {});

enum class ExteriorMode {
  // P^x(X_T = y; T < T_{D(0,K)^c}), T the hitting time of D(0,r+band).
  Killed,
  // The same divided by P^x(T < T_{D(0,K)^c}).
  Conditioned,
  // Unconditioned H_{D(0,r+band)}(x,y) approximated at K and 2K; throws
  // TruncationBudgetExceeded when the relative change exceeds the budget.
  Unconditioned,
};

// Sources in the band of D(0,R), targets in the band of D(0,r) inside
// D(0,r+band). K = truncation_radius.
HarnackReport exterior_harnack_ratio(const walk::JumpLaw& law, double r, double R, double band,
                                     double truncation_radius, ExteriorMode mode = ExteriorMode::Killed,
                                     const SampleSpec& spec = {}, double budget = 0.05);

}  // namespace lwb::harnack

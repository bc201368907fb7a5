#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "lwb/walk/jump_law.hpp"

namespace lwb::walk {

// p(0)=0.2 and 0.1 on each of (+-1,0),(0,+-1),(+-2,0),(0,+-2); covariance I.
JumpLaw id_a();

// 1/4 on each unit step; covariance I/2, period 2.
JumpLaw srw();

// Holds with probability `hold`, otherwise a simple random walk step.
JumpLaw lazy_srw(double hold = 0.2);

// (1-w) * ID-A shape with retuned hold + w * c|x|^-6 on 1 <= |x| <= 1e4.
// The hold mass is solved so that the covariance is the identity.
// beta is the nominal moment parameter and must lie in (0, 1/2).
JumpLaw heavy(double beta, double w = 0.2);

// "id-a", "srw", "lazy-srw", "heavy-beta0.25"; throws ConfigInvalid.
JumpLaw preset(std::string_view name);

// Array of {"dx","dy","p"} objects, optionally with one {"preset": name}
// element; a preset element alone selects that preset.
JumpLaw law_from_json(const nlohmann::json& j);
JumpLaw load_law_file(const std::string& path);

nlohmann::json law_to_json(const JumpLaw& law);

// Sums over 1 <= |x| <= r_max of |x|^-e, |x|^{2-e} and ring masses, cached.
struct PowerSums {
  double s_e = 0.0;
  double s_e2 = 0.0;
  std::vector<double> ring_mass;  // index j = floor(|x|)
};
const PowerSums& power_sums(double exponent, double r_max);

}  // namespace lwb::walk

#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lwb/walk/lattice.hpp"

namespace lwb::walk {

struct JumpEntry {
  Point offset;
  double p = 0.0;
};

// coef * |x|^-exponent on r_min <= |x| <= r_max.
struct PowerTail {
  double coef = 0.0;
  double exponent = 6.0;
  double r_min = 1.0;
  double r_max = 1e4;

  double prob(Point x) const;
  double mass() const;
};

struct Covariance {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

struct ConditionAScan {
  double R = 0.0;
  double s = 0.0;
  double inf_sum = 0.0;   // inf over R <= |y| <= R+s of sum_{z in D(0,R)} p(z-y)
  double envelope = 0.0;  // exp(-beta s^{1/4})
};

struct ConditionAReport {
  bool finite_range = false;
  double beta = 0.0;
  std::vector<ConditionAScan> scans;
  double min_constant = 0.0;  // largest c with inf_sum >= c * envelope on the scan
};

class JumpLaw {
 public:
  JumpLaw() = default;
  JumpLaw(std::vector<JumpEntry> core, std::optional<PowerTail> tail, std::string preset);

  const std::vector<JumpEntry>& core() const { return core_; }
  const std::optional<PowerTail>& tail() const { return tail_; }
  const std::string& preset() const { return preset_; }

  double prob(Point x) const;
  double hold_prob() const { return prob({0, 0}); }
  double total_mass() const;

  const Covariance& covariance() const { return cov_; }
  bool finite_range() const { return !tail_.has_value(); }
  double range() const { return range_; }
  // Supremum of moment orders m with sum |x|^m p(x) finite for the untruncated
  // tail; infinity for finite range.
  double moment_exponent_budget() const;
  // Smallest n0 <= 64 whose n0-step support covers the 3x3 block at 0, or -1.
  int aperiodicity_n0() const { return n0_; }
  bool strongly_aperiodic() const { return n0_ > 0; }
  bool identity_covariance(double tol) const;

  // Every point with positive mass within |x| <= radius (tail included).
  std::vector<JumpEntry> support_within(double radius) const;

  // Mass of jumps from y landing outside the disk.
  double exit_mass(Point y, const Disk& d) const;

 private:
  void compute_metadata();

  std::vector<JumpEntry> core_;
  std::optional<PowerTail> tail_;
  std::string preset_;
  std::unordered_map<std::uint64_t, double> lookup_;
  Covariance cov_;
  double range_ = 0.0;
  int n0_ = -1;
};

struct ValidateOptions {
  double normalization_tol = 1e-12;
  double covariance_tol = 1e-9;
  bool require_identity_covariance = false;
};

struct LawDiagnostics {
  bool normalized = false;
  bool symmetric = false;
  bool identity_covariance = false;
  bool strongly_aperiodic = false;
  int aperiodicity_n0 = -1;
  double total_mass = 0.0;
  Covariance covariance;
  std::vector<std::string> errors;
};

struct ValidationResult {
  std::optional<JumpLaw> law;
  LawDiagnostics diagnostics;
};

// Checks the raw table; on failure returns no law and lists error names.
ValidationResult validate_law(const std::vector<JumpEntry>& raw, const ValidateOptions& opts = {});

// Throwing variant: raises lwb::Error with the first failure code.
JumpLaw make_law(const std::vector<JumpEntry>& raw, const ValidateOptions& opts = {});

ConditionAReport condition_a_scan(const JumpLaw& law, double beta, const std::vector<double>& radii,
                                  const std::vector<double>& widths);

}  // namespace lwb::walk

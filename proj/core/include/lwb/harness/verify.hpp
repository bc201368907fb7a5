#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace lwb::harness {

enum class Profile { Quick, Full };

// Throws ConfigInvalid.
Profile parse_profile(const std::string& s);

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string measured;
  std::string band;
  bool passed = false;
  // Failing criteria whose cause is analysed in the notes; see README.
  bool known_failure = false;
  std::string note;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  // Canonical dump of the stochastic outputs, compared across re-runs.
  std::string payload;
};

struct VerifyReport {
  Profile profile = Profile::Full;
  std::vector<CriterionResult> criteria;

  bool all_passed() const;
  // True when every failure is a known one.
  bool only_known_failures() const;
};

struct VerifyOptions {
  Profile profile = Profile::Full;
  int threads = 1;
  std::vector<int> only;  // empty: all
  std::ostream* progress = nullptr;  // one line per criterion as it finishes
};

// "[PASS] 7 name: measured | band: ... | 1.2s", plus the note if any.
std::string format_line(const CriterionResult& r);

VerifyReport verify_all(const VerifyOptions& opts);

}  // namespace lwb::harness

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qos/model.hpp"

namespace qos {

enum class CheckOutcome { kPass, kFail, kNotApplicable };

struct VerifyLine {
  std::string name;
  CheckOutcome outcome = CheckOutcome::kPass;
  std::string detail;

  std::string render() const;  // "<name>: pass|FAIL|n/a[ (detail)]"
};

struct VerifyResult {
  std::vector<VerifyLine> lines;
  bool all_pass() const;
};

inline constexpr std::size_t kDefaultOracleChecks = 100;

// Full run with every invariant enabled plus oracle comparisons at randomly
// chosen slots. Each comparison shrinks the live policy input to a shadow
// instance the exhaustive search can handle (at most three flows, capacity
// and drop caps clipped to the oracle limits) and checks that the
// closed-form one-step decision attains the exhaustive minimum.
// Throws ValidationError for rejected specs.
VerifyResult verify_scenario(const ScenarioSpec& spec,
                             std::size_t oracle_checks = kDefaultOracleChecks);

}  // namespace qos

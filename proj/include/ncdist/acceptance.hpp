#pragma once

// The acceptance suite: ten criteria, each a set of named checks with expected value, computed value
// and tolerance. Shared by the acceptance binary and `ncdist verify`.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ncdist/husimi.hpp"

namespace ncdist {

enum class Relation {
  equal,     // |computed - expected| <= tolerance
  at_most,   // computed <= expected + tolerance
  at_least,  // computed >= expected - tolerance
  less,      // computed < expected (strict)
};

struct CheckResult {
  int criterion = 0;
  std::string group;
  std::string name;
  Relation relation = Relation::equal;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;  // error message when the computation itself failed
};

struct AcceptanceOptions {
  /// Groups to run (empty = all).
  std::set<std::string> only;
  std::uint64_t seed = kDefaultSeed;
  /// Called after each group with its results (progress reporting).
  std::function<void(const std::string&, const std::vector<CheckResult>&)> on_group;
};

/// Group names in criterion order: number, multimode, single_photon, noon, qsup, cat, eigen, mixture,
/// properties, determinism.
const std::vector<std::string>& acceptance_groups();
const char* criterion_title(int criterion);
const char* to_string(Relation r);

/// Throws InvalidArgument for an unknown group name in options.only.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options = {});

struct CriterionSummary {
  int criterion = 0;
  int passed = 0;
  int total = 0;
  std::optional<CheckResult> first_failure;

  bool ok() const { return total > 0 && !first_failure; }
};

/// One summary per criterion that has results, in criterion order.
std::vector<CriterionSummary> summarize(const std::vector<CheckResult>& results);
/// "PASS  3 single-photon superpositions (15/15 checks)" plus the first failure, if any.
std::string summary_line(const CriterionSummary& s);
/// "PASS  [group] name: computed ... expected <rel> ... (tol ...)".
std::string check_line(const CheckResult& r);

}  // namespace ncdist

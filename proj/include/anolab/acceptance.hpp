#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace anolab::acceptance {

enum class Suite { kExactness, kInvariants, kLemmaDecay, kRateEnvelope, kNoiseOrdering, kAll };

std::string_view to_string(Suite suite) noexcept;
/// Throws ConfigError for unknown suite names.
Suite parse_suite(std::string_view name);

struct CriterionResult {
  std::string id;     // "C1" ... "C8"
  std::string name;
  Suite suite;
  bool passed = false;
  std::string detail;  // measured values
};

struct Options {
  /// Worker threads for multi-seed criteria; 0 = hardware concurrency.
  unsigned jobs = 0;
};

/// Runs every criterion belonging to `suite` (all of them for kAll) and
/// writes one "PASS"/"FAIL" line per criterion to `out` as it completes.
std::vector<CriterionResult> run_suite(Suite suite, const Options& options, std::ostream& out);

/// check subcommand: 0 if every criterion passed, 1 otherwise, 2 for an
/// unknown suite name.
int check(std::string_view suite, const Options& options, std::ostream& out);

// Individual criteria, exposed for the test binaries.
CriterionResult hand_trace_exactness();
CriterionResult adamw_oracle_equivalence();
CriterionResult invariant_fuzzing();
CriterionResult closed_form_checks();
CriterionResult lemma_decay_order(const Options& options);
CriterionResult rate_envelope(const Options& options);
CriterionResult noise_robustness_ordering(const Options& options);
CriterionResult ablation_grid_integrity(const Options& options);

}  // namespace anolab::acceptance

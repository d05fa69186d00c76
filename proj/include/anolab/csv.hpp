#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "anolab/harness.hpp"

namespace anolab {

inline constexpr const char* kTraceCsvHeader =
    "k,loss,grad_norm_sq,lr,beta1,mismatch_rate,param_norm";
inline constexpr const char* kSummaryCsvHeader =
    "group,optimizer,sigma,metric,mean,ci95,seeds,diverged";

/// One row per recorded step, 17 significant digits, '\n' line endings and a
/// trailing "# diverged at k=<K>" line for aborted runs.
std::string trace_csv(const Trace& trace);
std::string summary_csv(std::span<const SummaryRow> rows);

/// Atomic file writers; throw IoError.
void emit_trace_csv(const Trace& trace, const std::filesystem::path& path);
void emit_summary_csv(std::span<const SummaryRow> rows, const std::filesystem::path& path);

}  // namespace anolab

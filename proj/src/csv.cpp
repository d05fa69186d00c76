#include "anolab/csv.hpp"

#include "anolab/io.hpp"

namespace anolab {

std::string trace_csv(const Trace& trace) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const auto& r : trace.rows) {
    out += std::to_string(r.k);
    for (const double v :
         {r.loss, r.grad_norm_sq, r.lr, r.beta1, r.mismatch_rate, r.param_norm}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  if (trace.diverged_at) out += "# diverged at k=" + std::to_string(*trace.diverged_at) + "\n";
  return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = kSummaryCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.group + ',' + r.optimizer + ',' + format_shortest(r.sigma) + ',' + r.metric + ',' +
           format_double(r.mean) + ',' + format_double(r.ci95) + ',' + std::to_string(r.seeds) +
           ',' + std::to_string(r.diverged) + '\n';
  }
  return out;
}

void emit_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  write_file_atomic(path, trace_csv(trace));
}

void emit_summary_csv(std::span<const SummaryRow> rows, const std::filesystem::path& path) {
  write_file_atomic(path, summary_csv(rows));
}

}  // namespace anolab

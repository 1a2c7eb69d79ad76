#pragma once

#include <string>
#include <vector>

namespace eea {

struct RunRecord;
struct SummaryRow;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Raw per-episode records. Header is exactly
/// `experiment,agent,seed,episode,steps,return,ms`.
void write_csv(const std::vector<RunRecord>& records, const std::string& path);

/// Per-episode cross-seed summary. Header is exactly `episode,mean,stderr,n`.
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

std::vector<RunRecord> read_csv(const std::string& path);

}  // namespace eea

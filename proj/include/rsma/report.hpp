#pragma once

#include <string>
#include <vector>

#include "rsma/types.hpp"

namespace rsma {

/// JSON object with fields {mmf_rate_nats, outer_iters, inner_iters_total,
/// elapsed_seconds, variant, seed, trace: [...]}.
std::string report_to_json(const SolverReport& report);

/// CSV rows (iteration, inner_obj, alpha, h_norm).
void write_inner_trace_csv(const std::vector<InnerTraceRow>& rows,
                           const std::string& path);

/// CSV rows (iteration, mmf_nats, surrogate_obj, inner_iters).
void write_outer_trace_csv(const std::vector<OuterTraceRow>& rows,
                           const std::string& path);

}  // namespace rsma

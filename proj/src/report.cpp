#include "rsma/report.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rsma {

std::string report_to_json(const SolverReport& report) {
  nlohmann::json j;
  j["mmf_rate_nats"] = report.mmf_rate_nats;
  j["outer_iters"] = report.outer_iters;
  j["inner_iters_total"] = report.inner_iters_total;
  j["elapsed_seconds"] = report.elapsed_seconds;
  j["variant"] = report.variant;
  j["seed"] = report.seed;
  nlohmann::json trace = nlohmann::json::array();
  for (const OuterTraceRow& row : report.trace) {
    trace.push_back({{"iteration", row.iteration},
                     {"mmf_nats", row.mmf_nats},
                     {"surrogate_obj", row.surrogate_obj},
                     {"inner_iters", row.inner_iters}});
  }
  j["trace"] = trace;
  return j.dump(2);
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  return out;
}

}  // namespace

void write_inner_trace_csv(const std::vector<InnerTraceRow>& rows,
                           const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "iteration,inner_obj,alpha,h_norm\n";
  for (const InnerTraceRow& r : rows)
    out << r.iteration << ',' << r.inner_obj << ',' << r.alpha << ','
        << r.h_norm << '\n';
}

void write_outer_trace_csv(const std::vector<OuterTraceRow>& rows,
                           const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "iteration,mmf_nats,surrogate_obj,inner_iters\n";
  for (const OuterTraceRow& r : rows)
    out << r.iteration << ',' << r.mmf_nats << ',' << r.surrogate_obj << ','
        << r.inner_iters << '\n';
}

}  // namespace rsma

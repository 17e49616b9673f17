#include "rsma/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "rsma/channel.hpp"
#include "rsma/report.hpp"
#include "rsma/solver.hpp"
#include "rsma/version.hpp"

namespace rsma {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t acc, std::uint64_t v) {
  return splitmix64(acc ^ (v + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2)));
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& value, Parse parse,
                          const std::string& key) {
  std::vector<T> out;
  for (const std::string& item : split_list(value)) {
    try {
      out.push_back(parse(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad value '" + item + "' for key " + key);
    }
  }
  return out;
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergenceTrace: return "convergence-trace";
    case ExperimentKind::kSweepAntennas: return "sweep-antennas";
    case ExperimentKind::kSweepUsers: return "sweep-users";
    case ExperimentKind::kSweepKappa: return "sweep-kappa";
    case ExperimentKind::kSdmaCompare: return "sdma-compare";
  }
  return "unknown";
}

std::string variant_choice_name(VariantChoice v) {
  switch (v) {
    case VariantChoice::kFull: return "full";
    case VariantChoice::kLowDim: return "lowdim";
    case VariantChoice::kAuto: return "auto";
    case VariantChoice::kBoth: return "both";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (users_list.empty()) throw std::invalid_argument("K list must be nonempty");
  if (antennas_list.empty())
    throw std::invalid_argument("Nt list must be nonempty");
  if (snr_db_list.empty())
    throw std::invalid_argument("snr_db list must be nonempty");
  if (kappa_list.empty())
    throw std::invalid_argument("kappa list must be nonempty");
  if (num_realizations < 1)
    throw std::invalid_argument("num_realizations must be >= 1");
  for (int k : users_list)
    if (k < 1) throw std::invalid_argument("K values must be >= 1");
  for (int nt : antennas_list)
    if (nt < 1) throw std::invalid_argument("Nt values must be >= 1");
  for (double kp : kappa_list)
    if (kp < 0.0 || kp >= 1.0)
      throw std::invalid_argument("kappa values must lie in [0, 1)");
  if (!(eps_outer > 0.0) || !(eps_inner > 0.0))
    throw std::invalid_argument("tolerances must be positive");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key = value on line " +
                                  std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "experiment") {
      if (value == "convergence-trace") cfg.kind = ExperimentKind::kConvergenceTrace;
      else if (value == "sweep-antennas") cfg.kind = ExperimentKind::kSweepAntennas;
      else if (value == "sweep-users") cfg.kind = ExperimentKind::kSweepUsers;
      else if (value == "sweep-kappa") cfg.kind = ExperimentKind::kSweepKappa;
      else if (value == "sdma-compare") cfg.kind = ExperimentKind::kSdmaCompare;
      else throw std::invalid_argument("unknown experiment kind: " + value);
    } else if (key == "K") {
      cfg.users_list = parse_list<int>(value, [](const std::string& s) { return std::stoi(s); }, key);
    } else if (key == "Nt") {
      cfg.antennas_list = parse_list<int>(value, [](const std::string& s) { return std::stoi(s); }, key);
    } else if (key == "snr_db") {
      cfg.snr_db_list = parse_list<double>(value, [](const std::string& s) { return std::stod(s); }, key);
    } else if (key == "kappa") {
      cfg.kappa_list = parse_list<double>(value, [](const std::string& s) { return std::stod(s); }, key);
    } else if (key == "num_realizations") {
      cfg.num_realizations = std::stoi(value);
    } else if (key == "base_seed") {
      cfg.base_seed = std::stoull(value);
    } else if (key == "variant") {
      if (value == "full") cfg.variant = VariantChoice::kFull;
      else if (value == "lowdim") cfg.variant = VariantChoice::kLowDim;
      else if (value == "auto") cfg.variant = VariantChoice::kAuto;
      else if (value == "both") cfg.variant = VariantChoice::kBoth;
      else throw std::invalid_argument("unknown variant: " + value);
    } else if (key == "eps_outer") {
      cfg.eps_outer = std::stod(value);
    } else if (key == "eps_inner") {
      cfg.eps_inner = std::stod(value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::uint64_t derive_seed(std::uint64_t base_seed, int users, int antennas,
                          double snr_db, double kappa, int variant_id,
                          int realization) {
  std::uint64_t acc = 0x243f6a8885a308d3ULL;  // arbitrary nonzero start
  acc = mix(acc, static_cast<std::uint64_t>(users));
  acc = mix(acc, static_cast<std::uint64_t>(antennas));
  acc = mix(acc, static_cast<std::uint64_t>(std::llround(snr_db * 1e3)));
  acc = mix(acc, static_cast<std::uint64_t>(std::llround(kappa * 1e6)));
  acc = mix(acc, static_cast<std::uint64_t>(variant_id));
  acc = mix(acc, static_cast<std::uint64_t>(realization));
  return base_seed ^ acc;
}

namespace {

struct RunOutcome {
  double mmf_nats = 0.0;
  double secs = 0.0;
  int outer_iters = 0;
  long inner_iters = 0;
  bool diverged = false;
  std::vector<OuterTraceRow> trace;
};

struct Coordinate {
  int users;
  int antennas;
  double snr_db;
  double kappa;
};

enum class RunMode { kRsma, kSdma };

RunOutcome run_single(const Coordinate& co, const ExperimentConfig& cfg,
                      Variant variant, RunMode mode, std::uint64_t seed,
                      bool keep_trace) {
  const double power = std::pow(10.0, co.snr_db / 10.0);
  const SystemConfig sys =
      SystemConfig::uniform_noise(co.users, co.antennas, power);
  EgfpConfig solver_cfg;
  solver_cfg.outer_tol = cfg.eps_outer;
  solver_cfg.eg.inner_tol = cfg.eps_inner;
  solver_cfg.variant = variant;

  RunOutcome out;
  try {
    SolverReport report;
    if (co.kappa == 0.0) {
      const ChannelSet ch = gen_channel(sys, seed);
      report = mode == RunMode::kSdma ? sdma_solve(ch, sys, solver_cfg, seed)
                                      : solve_mmf(ch, sys, solver_cfg, seed);
    } else {
      const ImperfectChannelSet ics = gen_imperfect_channel(sys, co.kappa, seed);
      report = mode == RunMode::kSdma
                   ? sdma_solve(ics, sys, solver_cfg, seed)
                   : egfp_solve_imperfect(ics, sys, solver_cfg, seed);
    }
    out.mmf_nats = report.mmf_rate_nats;
    out.secs = report.elapsed_seconds;
    out.outer_iters = report.outer_iters;
    out.inner_iters = report.inner_iters_total;
    if (keep_trace) out.trace = report.trace;
  } catch (const DivergenceError&) {
    out.diverged = true;
  }
  return out;
}

std::vector<RunOutcome> run_realizations(const Coordinate& co,
                                         const ExperimentConfig& cfg,
                                         Variant variant, RunMode mode,
                                         int variant_id, int jobs,
                                         bool keep_trace,
                                         std::vector<RunRecord>& records) {
  const int n = cfg.num_realizations;
  std::vector<RunOutcome> outcomes(n);
  std::vector<std::uint64_t> seeds(n);
  for (int r = 0; r < n; ++r)
    seeds[r] = derive_seed(cfg.base_seed, co.users, co.antennas, co.snr_db,
                           co.kappa, variant_id, r);

  if (jobs <= 1 || n == 1) {
    for (int r = 0; r < n; ++r)
      outcomes[r] = run_single(co, cfg, variant, mode, seeds[r], keep_trace);
  } else {
    std::atomic<int> next{0};
    const int workers = std::min(jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int r = next.fetch_add(1); r < n; r = next.fetch_add(1))
          outcomes[r] = run_single(co, cfg, variant, mode, seeds[r], keep_trace);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  const std::string label =
      (mode == RunMode::kSdma ? std::string("sdma-") : std::string("")) +
      (variant == Variant::kFullDim ? "full"
       : variant == Variant::kLowDim ? "lowdim"
                                     : "auto");
  for (int r = 0; r < n; ++r)
    records.push_back({co.users, co.antennas, co.snr_db, co.kappa, label, r,
                       seeds[r], outcomes[r].diverged});
  return outcomes;
}

ResultRow aggregate(const Coordinate& co, const std::string& variant_label,
                    const std::vector<RunOutcome>& outcomes) {
  ResultRow row;
  row.users = co.users;
  row.antennas = co.antennas;
  row.snr_db = co.snr_db;
  row.kappa = co.kappa;
  row.variant = variant_label;
  int ok = 0;
  for (const RunOutcome& o : outcomes) {
    if (o.diverged) continue;
    ++ok;
    row.mmf_nats_mean += o.mmf_nats;
    row.secs_mean += o.secs;
    row.outer_iters_mean += o.outer_iters;
    row.inner_iters_mean += static_cast<double>(o.inner_iters);
  }
  if (ok > 0) {
    row.mmf_nats_mean /= ok;
    row.secs_mean /= ok;
    row.outer_iters_mean /= ok;
    row.inner_iters_mean /= ok;
  }
  row.mmf_bits_mean = row.mmf_nats_mean / kLn2;
  row.n_realizations = ok;
  return row;
}

void write_traces(const Coordinate& co, const std::string& label,
                  const std::vector<RunOutcome>& outcomes,
                  const std::string& trace_dir) {
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].diverged) continue;
    std::ostringstream name;
    name << trace_dir << "/trace_K" << co.users << "_Nt" << co.antennas
         << "_snr" << co.snr_db << "_kappa" << co.kappa << '_' << label << "_r"
         << r << ".csv";
    write_outer_trace_csv(outcomes[r].trace, name.str());
  }
}

}  // namespace

ExperimentResults run_experiment(const ExperimentConfig& cfg, int jobs,
                                 const std::string& trace_dir) {
  cfg.validate();
  const bool keep_trace = cfg.kind == ExperimentKind::kConvergenceTrace &&
                          !trace_dir.empty();
  ExperimentResults results;

  for (int users : cfg.users_list) {
    for (int antennas : cfg.antennas_list) {
      for (double snr : cfg.snr_db_list) {
        for (double kappa : cfg.kappa_list) {
          const Coordinate co{users, antennas, snr, kappa};

          if (cfg.kind == ExperimentKind::kSdmaCompare) {
            const auto rsma_runs = run_realizations(
                co, cfg, Variant::kAuto, RunMode::kRsma, 0, jobs, keep_trace,
                results.runs);
            const auto sdma_runs = run_realizations(
                co, cfg, Variant::kAuto, RunMode::kSdma, 1, jobs, keep_trace,
                results.runs);
            const ResultRow a = aggregate(co, "rsma-auto", rsma_runs);
            const ResultRow b = aggregate(co, "sdma-auto", sdma_runs);
            results.rows.push_back(a);
            results.rows.push_back(b);
            PairedRow pair{co.users, co.antennas, co.snr_db, co.kappa,
                           a.variant,  b.variant,  a.mmf_nats_mean,
                           b.mmf_nats_mean,
                           std::abs(a.mmf_nats_mean - b.mmf_nats_mean) /
                               std::max(a.mmf_nats_mean, 1e-300),
                           a.secs_mean, b.secs_mean};
            results.paired.push_back(pair);
          } else if (cfg.variant == VariantChoice::kBoth) {
            const auto full_runs = run_realizations(
                co, cfg, Variant::kFullDim, RunMode::kRsma, 0, jobs, keep_trace,
                results.runs);
            const auto low_runs = run_realizations(
                co, cfg, Variant::kLowDim, RunMode::kRsma, 0, jobs, keep_trace,
                results.runs);
            const ResultRow a = aggregate(co, "full", full_runs);
            const ResultRow b = aggregate(co, "lowdim", low_runs);
            results.rows.push_back(a);
            results.rows.push_back(b);
            PairedRow pair{co.users, co.antennas, co.snr_db, co.kappa,
                           a.variant,  b.variant,  a.mmf_nats_mean,
                           b.mmf_nats_mean,
                           std::abs(a.mmf_nats_mean - b.mmf_nats_mean) /
                               std::max(a.mmf_nats_mean, 1e-300),
                           a.secs_mean, b.secs_mean};
            results.paired.push_back(pair);
            if (keep_trace) {
              write_traces(co, "full", full_runs, trace_dir);
              write_traces(co, "lowdim", low_runs, trace_dir);
            }
          } else {
            const Variant variant = cfg.variant == VariantChoice::kFull
                                        ? Variant::kFullDim
                                    : cfg.variant == VariantChoice::kLowDim
                                        ? Variant::kLowDim
                                        : Variant::kAuto;
            const auto runs = run_realizations(co, cfg, variant, RunMode::kRsma,
                                               0, jobs, keep_trace, results.runs);
            const std::string label = variant_choice_name(
                cfg.variant == VariantChoice::kBoth ? VariantChoice::kAuto
                                                    : cfg.variant);
            results.rows.push_back(aggregate(co, label, runs));
            if (keep_trace) write_traces(co, label, runs, trace_dir);
          }
        }
      }
    }
  }

  for (const RunRecord& rec : results.runs)
    if (rec.diverged) ++results.divergences;
  return results;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  return out;
}

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path) {
  std::ofstream out = open_out(path);
  out << "K,Nt,snr_db,kappa,variant,mmf_nats_mean,mmf_bits_mean,secs_mean,"
         "outer_iters_mean,inner_iters_mean,n_realizations\n";
  for (const ResultRow& r : rows)
    out << r.users << ',' << r.antennas << ',' << r.snr_db << ',' << r.kappa
        << ',' << r.variant << ',' << r.mmf_nats_mean << ',' << r.mmf_bits_mean
        << ',' << r.secs_mean << ',' << r.outer_iters_mean << ','
        << r.inner_iters_mean << ',' << r.n_realizations << '\n';
}

void write_paired_csv(const std::vector<PairedRow>& rows,
                      const std::string& path) {
  std::ofstream out = open_out(path);
  out << "K,Nt,snr_db,kappa,variant_a,variant_b,mmf_a,mmf_b,rel_diff,"
         "secs_a,secs_b\n";
  for (const PairedRow& r : rows)
    out << r.users << ',' << r.antennas << ',' << r.snr_db << ',' << r.kappa
        << ',' << r.variant_a << ',' << r.variant_b << ',' << r.mmf_a << ','
        << r.mmf_b << ',' << r.rel_diff << ',' << r.secs_a << ',' << r.secs_b
        << '\n';
}

void write_manifest(const ExperimentConfig& cfg, const ExperimentResults& results,
                    const std::string& path) {
  nlohmann::json j;
  j["library_version"] = kVersion;
  j["config"] = {
      {"experiment", kind_name(cfg.kind)},
      {"K", cfg.users_list},
      {"Nt", cfg.antennas_list},
      {"snr_db", cfg.snr_db_list},
      {"kappa", cfg.kappa_list},
      {"num_realizations", cfg.num_realizations},
      {"base_seed", cfg.base_seed},
      {"variant", variant_choice_name(cfg.variant)},
      {"eps_outer", cfg.eps_outer},
      {"eps_inner", cfg.eps_inner},
  };
  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& rec : results.runs) {
    runs.push_back({{"K", rec.users},
                    {"Nt", rec.antennas},
                    {"snr_db", rec.snr_db},
                    {"kappa", rec.kappa},
                    {"variant", rec.variant},
                    {"realization", rec.realization},
                    {"seed", rec.seed},
                    {"diverged", rec.diverged}});
  }
  j["runs"] = runs;
  j["divergences"] = results.divergences;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace rsma

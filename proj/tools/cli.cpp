#include "cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hybridiq/correlations.hpp"
#include "hybridiq/error.hpp"
#include "hybridiq/hybrid_channel.hpp"
#include "hybridiq/hybrid_state.hpp"
#include "hybridiq/json_io.hpp"
#include "hybridiq/locc.hpp"
#include "hybridiq/properties.hpp"
#include "hybridiq/random.hpp"

namespace hybridiq::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
};

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes to --out when given, otherwise to `out`.
void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.out);
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + config.out);
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

bool is_input_error(const Error& e) {
  return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::IoError;
}

std::pair<int, int> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    const int a = std::stoi(text.substr(0, x));
    const int b = std::stoi(text.substr(x + 1));
    if (a < 1 || b < 1) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "dimensions must look like 2x3, got \"" + text + "\"");
  }
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  double deviation;
  double tolerance;
  bool pass;
};

struct FileReport {
  std::string path;
  std::string kind;
  std::vector<Check> checks;
  std::optional<std::string> error;
  bool input_error = false;

  bool pass() const {
    if (error) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

std::string detect_kind(const json& j) {
  if (!j.is_object()) return "unknown";
  if (j.contains("masses")) return "state";
  if (j.contains("blocks") || j.contains("type")) return "channel";
  if (j.contains("rounds")) return "protocol";
  if (j.contains("P")) return "kernel";
  if (j.contains("weights")) return "space";
  if (j.contains("re")) return "matrix";
  return "unknown";
}

void add_check(FileReport& report, std::string name, double deviation, double tolerance) {
  report.checks.push_back(Check{std::move(name), deviation, tolerance, deviation <= tolerance});
}

void validate_state(const json& j, double tolerance, FileReport& report) {
  const io::RawState raw = io::raw_state_from_json(j);
  const StateCheck check = check_state(raw.masses, tolerance);
  add_check(report, "hermiticity", check.hermiticity_defect, tol::kHermitian);
  if (check.failure == ErrorCode::NotPositive && check.hermiticity_defect > tol::kHermitian) {
    report.error = "NotPositive";
    return;
  }
  // Non-negativity via the smallest block eigenvalue; normalization is w(X, I) = 1.
  add_check(report, "non_negativity", std::max(0.0, -check.min_eigenvalue), tolerance);
  add_check(report, "normalization", std::abs(check.total_trace - 1.0), tolerance);
  if (!check.ok) report.error = std::string(to_string(*check.failure));
}

void validate_channel(const json& j, FileReport& report) {
  if (j.contains("type")) {
    // Constructor specs validate while lowering.
    const HybridChannel ch = io::channel_from_json(j);
    const CompletenessReport c = check_completeness(ch.src().size(), ch.dst().size(), ch.qdim_src(),
                                                    ch.qdim_dst(), ch.entries());
    add_check(report, "completeness", c.worst, tol::kCompleteness);
    return;
  }
  const io::RawChannel raw = io::raw_channel_from_json(j);
  const CompletenessReport c =
      check_completeness(raw.src.size(), raw.dst.size(), raw.qdim_src, raw.qdim_dst, raw.blocks);
  add_check(report, "completeness", c.worst, tol::kCompleteness);
  if (!c.ok) report.error = "IncompleteChannel";
}

void validate_kernel_file(const json& j, FileReport& report) {
  const KernelReport k = validate_kernel(io::kernel_from_json(j));
  add_check(report, "stochasticity", k.deviation, tol::kKernel);
  if (!k.ok) {
    report.checks.back().pass = false;
    report.error = "BadKernel: " + k.message;
  }
}

void validate_matrix(const json& j, double tolerance, FileReport& report) {
  const CMatrix m = io::matrix_from_json(j);
  add_check(report, "hermiticity", hermiticity_defect(m), tol::kHermitian);
  if (!report.checks.back().pass) return;
  add_check(report, "non_negativity", std::max(0.0, -min_eigenvalue(m)), tolerance);
  add_check(report, "normalization", std::abs(m.trace().real() - 1.0), tolerance);
}

FileReport validate_file(const std::string& path, double tolerance) {
  FileReport report;
  report.path = path;
  try {
    const json j = io::read_file(path);
    report.kind = detect_kind(j);
    if (report.kind == "state") {
      validate_state(j, tolerance, report);
    } else if (report.kind == "channel") {
      validate_channel(j, report);
    } else if (report.kind == "kernel") {
      validate_kernel_file(j, report);
    } else if (report.kind == "protocol") {
      (void)io::protocol_from_json(j);
    } else if (report.kind == "space") {
      (void)io::space_from_json(j);
    } else if (report.kind == "matrix") {
      validate_matrix(j, tolerance, report);
    } else {
      throw Error(ErrorCode::ParseError, "unrecognized document kind");
    }
  } catch (const Error& e) {
    report.error = e.what();
    report.input_error = is_input_error(e);
  }
  return report;
}

int cmd_validate(const std::vector<std::string>& paths, const RunConfig& config, std::ostream& out) {
  const double tolerance = config.tol.value_or(tol::kState);
  std::vector<FileReport> reports;
  for (const std::string& path : paths) reports.push_back(validate_file(path, tolerance));

  const bool input_error = std::any_of(reports.begin(), reports.end(), [](const FileReport& r) { return r.input_error; });
  const bool all_pass = std::all_of(reports.begin(), reports.end(), [](const FileReport& r) { return r.pass(); });

  std::string text;
  if (config.format == "csv") {
    text = "path,kind,check,deviation,tolerance,pass,error\n";
    for (const FileReport& r : reports) {
      const std::string error = r.error ? *r.error : "";
      if (r.checks.empty()) text += r.path + "," + r.kind + ",,,," + (r.pass() ? "true" : "false") + ",\"" + error + "\"\n";
      for (const Check& c : r.checks) {
        text += r.path + "," + r.kind + "," + c.name + "," + fmt17(c.deviation) + "," + fmt17(c.tolerance) + "," +
                (c.pass ? "true" : "false") + ",\"" + error + "\"\n";
      }
    }
  } else {
    json files = json::array();
    for (const FileReport& r : reports) {
      json checks = json::array();
      for (const Check& c : r.checks) {
        checks.push_back(json{{"name", c.name}, {"deviation", c.deviation}, {"tolerance", c.tolerance}, {"pass", c.pass}});
      }
      json entry{{"path", r.path}, {"kind", r.kind}, {"pass", r.pass()}, {"checks", checks}};
      if (r.error) entry["error"] = *r.error;
      files.push_back(entry);
    }
    text = dump(json{{"pass", all_pass}, {"files", files}});
  }
  emit(config, text, out);
  if (input_error) return kFailure;
  return all_pass ? kOk : kViolation;
}

// ------------------------------------------------------------------ evolve

struct EvolveOptions {
  std::string state_path;
  std::vector<std::string> channel_paths;
  int steps = 1;
  std::string metrics_path;
  std::string bipartite;
};

double smallest_block_eigenvalue(const HybridState& w) {
  double lo = std::numeric_limits<double>::infinity();
  for (const CMatrix& sigma : w.masses()) lo = std::min(lo, min_eigenvalue(sigma));
  return lo;
}

int cmd_evolve(const EvolveOptions& options, const RunConfig& config, std::ostream& out) {
  HybridState state = io::state_from_json(io::read_file(options.state_path));
  std::vector<HybridChannel> channels;
  for (const std::string& path : options.channel_paths) channels.push_back(io::channel_from_json(io::read_file(path)));
  std::optional<std::pair<int, int>> dims;
  if (!options.bipartite.empty()) dims = parse_dims(options.bipartite);

  std::string csv = "step,total_trace,min_block_eigenvalue,mutual_information,distance_from_previous";
  if (dims) csv += ",ppt";
  csv += "\n";
  auto row = [&](int step, const HybridState& w, double moved) {
    csv += std::to_string(step) + "," + fmt17(w.total_trace()) + "," + fmt17(smallest_block_eigenvalue(w)) + "," +
           fmt17(mutual_information(w)) + "," + fmt17(moved);
    if (dims) csv += std::string(",") + (is_ppt(quantum_marginal(w), dims->first, dims->second) ? "true" : "false");
    csv += "\n";
  };
  row(0, state, 0.0);
  for (int step = 1; step <= options.steps; ++step) {
    HybridState next = state;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      try {
        next = apply(channels[c], next);
      } catch (const Error& e) {
        throw Error(e.code(), "step " + std::to_string(step) + ", channel " + std::to_string(c) + " (" +
                                  options.channel_paths[c] + "): " + e.what());
      }
    }
    const double moved = next.space().same_as(state.space()) && next.qdim() == state.qdim()
                             ? distance(next, state)
                             : std::numeric_limits<double>::quiet_NaN();
    row(step, next, moved);
    state = std::move(next);
  }

  if (!config.out.empty()) io::write_file(config.out, io::to_json(state));
  if (options.metrics_path.empty()) {
    out << csv;
  } else {
    std::ofstream file(options.metrics_path);
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + options.metrics_path);
    file << csv;
  }
  return kOk;
}

// -------------------------------------------------------------------- locc

json ppt_json(const PptReport& ppt) {
  std::string verdict = ppt.ppt ? (ppt.conclusive ? "separable" : "PPT (necessary only)") : "entangled";
  return json{{"ppt", ppt.ppt}, {"conclusive", ppt.conclusive}, {"min_eigenvalue", ppt.min_eigenvalue}, {"verdict", verdict}};
}

int cmd_locc(const std::string& protocol_path, const std::string& rho_path, const std::string& channels_dir,
             const RunConfig& config, std::ostream& out) {
  const LoccProtocol protocol = io::protocol_from_json(io::read_file(protocol_path));
  const CMatrix rho = io::matrix_from_json(io::read_file(rho_path));
  const LoccResult result = run(protocol, rho);
  const PptReport ppt = ppt_report(result.lambda, protocol.d1(), protocol.d2(), config.tol.value_or(1e-9));
  json records = json::array();
  for (const OutcomeRecord& r : result.records) records.push_back(r);
  json report{{"records", records},
              {"state", io::to_json(result.state)},
              {"lambda", io::to_json(result.lambda)},
              {"ppt", ppt_json(ppt)}};
  if (!channels_dir.empty()) {
    fs::create_directories(channels_dir);
    const std::vector<HybridChannel> channels = as_hybrid_channels(protocol);
    io::write_file(fs::path(channels_dir) / "initial_state.json", io::to_json(initial_record_state(protocol, rho)));
    for (std::size_t r = 0; r < channels.size(); ++r) {
      io::write_file(fs::path(channels_dir) / ("round_" + std::to_string(r + 1) + ".json"), io::to_json(channels[r]));
    }
  }
  emit(config, dump(report), out);
  return kOk;
}

// ----------------------------------------------------------------- metrics

int cmd_metrics(const std::string& state_path, const std::string& other_path, const std::string& channel_path,
                const RunConfig& config, std::ostream& out) {
  const HybridState w = io::state_from_json(io::read_file(state_path));
  const ClassicalMarginal marginal = classical_marginal(w);
  const double entropy = von_neumann_entropy(quantum_marginal(w));
  json report{{"cells", w.cells()},
              {"qdim", w.qdim()},
              {"classical_masses", marginal.masses},
              {"classical_densities", marginal.densities},
              {"quantum_entropy", entropy},
              {"mutual_information", mutual_information(w)},
              {"mutual_information_three_term", mutual_information_three_term(w)},
              {"bound_2S", 2.0 * entropy}};
  if (!other_path.empty()) report["distance"] = distance(w, io::state_from_json(io::read_file(other_path)));
  if (!channel_path.empty()) {
    report["monotonicity"] = io::to_json(monotonicity_report(w, io::channel_from_json(io::read_file(channel_path))));
  }
  if (config.format == "csv") {
    std::string text = "metric,value\n";
    for (const char* key : {"quantum_entropy", "mutual_information", "mutual_information_three_term", "bound_2S"}) {
      text += std::string(key) + "," + fmt17(report[key].get<double>()) + "\n";
    }
    if (report.contains("distance")) text += "distance," + fmt17(report["distance"].get<double>()) + "\n";
    emit(config, text, out);
  } else {
    emit(config, dump(report), out);
  }
  return kOk;
}

// -------------------------------------------------------------- properties

int cmd_properties(const std::string& suite, std::size_t trials, const RunConfig& config, std::ostream& out) {
  const SuiteReport report = run_suite(suite, trials, config.seed);
  if (config.format == "csv") {
    std::string text = "suite,property,checks,violations,max_deviation,tolerance\n";
    for (const PropertyResult& p : report.properties) {
      text += report.suite + "," + p.name + "," + std::to_string(p.checks) + "," + std::to_string(p.violations) + "," +
              fmt17(p.max_deviation) + "," + fmt17(p.tolerance) + "\n";
    }
    emit(config, text, out);
  } else {
    json props = json::array();
    for (const PropertyResult& p : report.properties) {
      props.push_back(json{{"name", p.name}, {"tolerance", p.tolerance}, {"checks", p.checks},
                           {"violations", p.violations}, {"max_deviation", p.max_deviation}});
    }
    emit(config, dump(json{{"suite", report.suite}, {"seed", report.seed}, {"trials", report.trials},
                           {"passed", report.passed()}, {"violations", report.violations()}, {"properties", props}}),
         out);
  }
  return report.passed() ? kOk : kViolation;
}

// ----------------------------------------------------------------- randgen

struct RandgenOptions {
  std::string kind;
  int cells = 2;
  int dst_cells = 0;
  int qdim = 2;
  int qdim_dst = 0;
  int branching = 1;
  int rounds = 2;
  int outcomes = 2;
  std::string dims = "2x2";
};

int cmd_randgen(const RandgenOptions& o, const RunConfig& config, std::ostream& out) {
  Rng rng(config.seed);
  const ClassicalSpace src = ClassicalSpace::counting(static_cast<std::size_t>(o.cells));
  const ClassicalSpace dst = ClassicalSpace::counting(static_cast<std::size_t>(o.dst_cells > 0 ? o.dst_cells : o.cells));
  json doc;
  if (o.kind == "state") {
    doc = io::to_json(random_state(src, o.qdim, rng));
  } else if (o.kind == "channel") {
    doc = io::to_json(random_channel(src, dst, o.qdim, o.qdim_dst > 0 ? o.qdim_dst : o.qdim, o.branching, rng));
  } else if (o.kind == "kernel") {
    doc = io::to_json(MarkovKernel(src, dst, random_stochastic(static_cast<int>(dst.size()), o.cells, rng)));
  } else if (o.kind == "density") {
    doc = io::to_json(random_density(o.qdim, rng));
  } else if (o.kind == "effect") {
    doc = io::to_json(random_effect(o.qdim, rng));
  } else if (o.kind == "protocol") {
    const auto [d1, d2] = parse_dims(o.dims);
    doc = io::to_json(random_protocol(d1, d2, o.rounds, o.outcomes, rng));
  } else {
    throw Error(ErrorCode::ParseError, "unknown randgen kind \"" + o.kind + "\"");
  }
  emit(config, dump(doc), out);
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& config) {
  sub->add_option("--seed", config.seed, "Seed of the 64-bit generator");
  sub->add_option("--tol", config.tol, "Tolerance override")->check(CLI::PositiveNumber);
  sub->add_option("--out", config.out, "Output path (default: stdout)");
  sub->add_option("--format", config.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid classical-quantum states, channels and LOCC protocols", "hybridiq"};
  app.require_subcommand(1);
  RunConfig config;

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "Check state, channel, kernel, protocol or matrix files");
  validate->add_option("paths", validate_paths, "Input JSON files")->required();
  add_common(validate, config);

  EvolveOptions evolve_opts;
  auto* evolve = app.add_subcommand("evolve", "Evolve a state through a channel pipeline");
  evolve->add_option("state", evolve_opts.state_path, "State JSON")->required();
  evolve->add_option("channels", evolve_opts.channel_paths, "Channel JSON files, applied in order")->required();
  evolve->add_option("--steps", evolve_opts.steps, "Pipeline repetitions")->check(CLI::NonNegativeNumber);
  evolve->add_option("--metrics", evolve_opts.metrics_path, "Per-step CSV path (default: stdout)");
  evolve->add_option("--bipartite", evolve_opts.bipartite, "Report PPT of the quantum marginal, e.g. 2x2");
  add_common(evolve, config);

  std::string protocol_path;
  std::string rho_path;
  std::string channels_dir;
  auto* locc = app.add_subcommand("locc", "Run an LOCC protocol on a density matrix");
  locc->add_option("protocol", protocol_path, "Protocol JSON")->required();
  locc->add_option("--rho", rho_path, "Input density matrix JSON")->required();
  locc->add_option("--emit-channels", channels_dir, "Write per-round hybrid channels and the initial record state here");
  add_common(locc, config);

  std::string metrics_state;
  std::string metrics_other;
  std::string metrics_channel;
  auto* metrics = app.add_subcommand("metrics", "Marginals, entropies, mutual information, distance");
  metrics->add_option("state", metrics_state, "State JSON")->required();
  metrics->add_option("--other", metrics_other, "Second state for the distance");
  metrics->add_option("--channel", metrics_channel, "Channel for a monotonicity report");
  add_common(metrics, config);

  std::string suite;
  std::size_t trials = 100;
  auto* properties = app.add_subcommand("properties", "Run a randomized property suite");
  properties->add_option("suite", suite, "axioms | metric | channel | vieq | correlations | locc")->required();
  properties->add_option("--trials", trials, "Number of random trials");
  add_common(properties, config);

  RandgenOptions rg;
  auto* randgen = app.add_subcommand("randgen", "Generate seeded random instances");
  randgen->add_option("kind", rg.kind, "state | channel | kernel | density | effect | protocol")->required();
  randgen->add_option("--cells", rg.cells, "Source cells")->check(CLI::PositiveNumber);
  randgen->add_option("--dst-cells", rg.dst_cells, "Destination cells (default: --cells)");
  randgen->add_option("--qdim", rg.qdim, "Quantum dimension")->check(CLI::PositiveNumber);
  randgen->add_option("--qdim-dst", rg.qdim_dst, "Destination quantum dimension (default: --qdim)");
  randgen->add_option("--branching", rg.branching, "Kraus blocks per cell pair")->check(CLI::PositiveNumber);
  randgen->add_option("--rounds", rg.rounds, "Protocol rounds")->check(CLI::PositiveNumber);
  randgen->add_option("--outcomes", rg.outcomes, "Maximum outcomes per round")->check(CLI::PositiveNumber);
  randgen->add_option("--dims", rg.dims, "Protocol dimensions, e.g. 2x2");
  add_common(randgen, config);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_paths, config, out);
    if (evolve->parsed()) return cmd_evolve(evolve_opts, config, out);
    if (locc->parsed()) return cmd_locc(protocol_path, rho_path, channels_dir, config, out);
    if (metrics->parsed()) return cmd_metrics(metrics_state, metrics_other, metrics_channel, config, out);
    if (properties->parsed()) return cmd_properties(suite, trials, config, out);
    if (randgen->parsed()) return cmd_randgen(rg, config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace hybridiq::cli

// gfanm: filter design, signal filtering, line-spectrum estimation and the
// Monte Carlo harness from the command line.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfanm/io.hpp"

#ifndef GFANM_CONFIG_DIR
#define GFANM_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace gfanm;
using gfanm::io::json;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kSolver = 4 };

std::vector<PoleSpec> parse_pole_list(const std::string& text) {
  // "modulus:phase:multiplicity,..."
  std::vector<PoleSpec> poles;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    PoleSpec p;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> p.modulus >> c1 >> p.phase >> c2 >> p.multiplicity) || c1 != ':' || c2 != ':') {
      throw ConfigError("--poles: expected modulus:phase:multiplicity, got '" + item + "'");
    }
    poles.push_back(p);
  }
  json j = io::poles_json(poles);
  return io::parse_poles(j);  // shared range checks
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw ConfigError(what + " '" + p.string() + "' does not exist");
}

void require_parent(const fs::path& p) {
  const fs::path dir = p.parent_path();
  if (!dir.empty() && !fs::is_directory(dir)) {
    throw ConfigError("output directory '" + dir.string() + "' does not exist");
  }
}

SolverOptions solver_from(const std::string& file, double eps_rel, int max_iters) {
  SolverOptions opts;
  if (!file.empty()) {
    require_file(file, "solver file");
    std::ifstream in(file);
    try {
      opts = io::parse_solver_options(json::parse(in));
    } catch (const json::parse_error& e) {
      throw ConfigError("solver file is not valid JSON: " + std::string(e.what()));
    }
  }
  if (eps_rel > 0.0) opts.eps_rel = eps_rel;
  if (max_iters > 0) opts.max_iters = max_iters;
  return opts;
}

struct DesignArgs {
  std::string preset;
  int delay = 0;
  std::string poles;
  std::string spec;
  std::optional<double> epsilon;  // overrides the spec file's value
  Index grid = 8192;
  std::string out;
};

int cmd_design_filter(const DesignArgs& a) {
  const int forms = static_cast<int>(!a.preset.empty()) + static_cast<int>(a.delay > 0) +
                    static_cast<int>(!a.poles.empty()) + static_cast<int>(!a.spec.empty());
  if (forms != 1) throw ConfigError("design-filter: give exactly one of --preset, --delay, --poles or --spec");
  io::FilterDesign design;
  if (!a.spec.empty()) {
    require_file(a.spec, "filter spec");
    design = io::load_filter_design(a.spec);
  } else if (!a.preset.empty()) {
    design = io::parse_filter_design(json{{"preset", a.preset}});
  } else if (a.delay > 0) {
    design = io::parse_filter_design(json{{"delay", a.delay}});
  } else {
    design.poles = parse_pole_list(a.poles);
  }
  if (a.epsilon) design.epsilon = *a.epsilon;
  if (!(design.epsilon > 0.0 && design.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (a.grid < 2) throw ConfigError("--grid must be >= 2");

  const GFilter f = design.build();
  const fs::path out(a.out);
  fs::create_directories(out);
  if (!design.a_file.empty()) {
    // Keep the raw pair next to the record so it stays self-contained.
    io::save_matrix(out / "A_raw.tsv", io::load_matrix(design.a_file));
    io::save_matrix(out / "b_raw.tsv", io::load_matrix(design.b_file));
    design.a_file = out / "A_raw.tsv";
    design.b_file = out / "b_raw.tsv";
  }
  const json record = io::filter_design_json(design, f);
  write_json(out / "filter.json", record);
  io::save_matrix(out / "A.tsv", f.a());
  io::save_matrix(out / "b.tsv", f.b());
  {
    std::ofstream gain(out / "gain.tsv");
    gain << "theta\tgain\n";
    for (const auto& p : squared_gain_profile(f, a.grid)) {
      gain << io::format_number(p.theta) << '\t' << io::format_number(p.gain) << '\n';
    }
  }
  std::cout << "n " << f.size() << '\n'
            << "transient_length " << record.at("transient_length").get<Index>() << '\n'
            << "normalization_residual " << io::format_number(f.normalization_residual()) << '\n';
  return kOk;
}

struct SimulateArgs {
  std::string theta;
  double amplitude = 1.0;
  Index length = 117;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (!(a.amplitude > 0.0)) throw ConfigError("--amplitude must be positive");
  if (a.length < 1) throw ConfigError("--length must be >= 1");
  require_parent(a.out);
  const auto thetas = parse_real_list(a.theta, "--theta");
  Rng rng(a.seed);
  CisoidSpec spec{random_phase_amplitudes(thetas.size(), a.amplitude, rng), thetas};
  try {
    spec.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  const double variance = a.snr_db ? snr_to_sigma2(*a.snr_db, a.amplitude) : 0.0;
  const CVector y = generate_signal(spec, a.length, variance, rng);
  io::save_matrix(a.out, y);
  return kOk;
}

struct FilterArgs {
  std::string signal;
  std::string filter;
  std::optional<double> epsilon;
  std::optional<Index> discard;
  std::string out;
};

int cmd_filter(const FilterArgs& a) {
  require_file(a.signal, "signal");
  require_file(a.filter, "filter");
  require_parent(a.out);
  const auto design = io::load_filter_design(a.filter);
  const GFilter f = design.build();
  const Index discard = a.discard ? *a.discard : transient_length(f, a.epsilon.value_or(design.epsilon));
  const CVector y = io::load_signal(a.signal);
  const OutputMatrix x = apply_filter_skip(f, y, discard);
  io::save_matrix(a.out, x.x);
  std::cout << "discarded " << x.discarded << "\noutputs " << x.x.cols() << '\n';
  return kOk;
}

struct EstimateArgs {
  std::string signal;
  std::string filter;
  std::string method = "manm";
  std::optional<double> lambda;
  std::optional<double> sigma;
  std::string beta_variant = "as_printed";
  std::string solver;
  double eps_rel = 0.0;
  int max_iters = 0;
  std::optional<double> epsilon;
  std::string out;
  std::string profile;
  Index profile_grid = kScanGridSize;
};

int cmd_estimate(const EstimateArgs& a) {
  require_file(a.signal, "signal");
  require_file(a.filter, "filter");
  require_parent(a.out);
  if (!a.profile.empty()) require_parent(a.profile);
  if (a.profile_grid < 2) throw ConfigError("--profile-grid must be at least 2");
  if (a.method != "manm" && a.method != "sanm") throw ConfigError("--method must be manm or sanm");
  if (a.lambda && a.sigma) throw ConfigError("--lambda and --sigma are mutually exclusive");
  if (a.lambda && !(*a.lambda > 0.0)) throw ConfigError("--lambda must be positive");
  if (a.beta_variant != "as_printed" && a.beta_variant != "lx_only") {
    throw ConfigError("--beta-variant must be as_printed or lx_only");
  }
  const SolverOptions opts = solver_from(a.solver, a.eps_rel, a.max_iters);
  const auto design = io::load_filter_design(a.filter);
  const GFilter f = design.build();
  const CVector y = io::load_signal(a.signal);
  const Index discard = transient_length(f, a.epsilon.value_or(design.epsilon));
  const OutputMatrix out = apply_filter_skip(f, y, discard);
  const CMatrix x = a.method == "manm" ? out.x : CMatrix(out.x.rightCols(1));

  json record;
  double lambda = 0.0;
  if (a.lambda) {
    lambda = *a.lambda;
  } else {
    const double sigma = a.sigma ? *a.sigma : std::sqrt(estimate_noise_variance(y));
    const auto params = lambda_heuristic(sigma, f.size(), y.size(), x.cols(),
                                         a.beta_variant == "lx_only" ? BetaVariant::lx_only
                                                                     : BetaVariant::as_printed);
    lambda = params.lambda;
    record["sigma_hat"] = std::stod(io::format_number(params.sigma_hat));
    record["beta"] = std::stod(io::format_number(params.beta));
  }
  if (!(lambda > 0.0) && !x.isZero(0.0)) {
    throw ConfigError("estimated noise level is zero; pass --lambda explicitly");
  }
  const auto result = estimate_line_spectrum(x, f, lambda, RankRule{}, opts);
  record["lambda"] = std::stod(io::format_number(lambda));
  record["method"] = a.method;
  record["transient_length"] = discard;
  record["outputs"] = x.cols();
  record["spectrum"] = io::spectrum_json(result.spectrum);
  record["solver"] = io::solution_json(result.solution);
  write_json(a.out, record);
  if (!a.profile.empty()) {
    if (result.spectrum.rank < f.size()) {
      std::ofstream prof(a.profile);
      prof << "theta\td\n";
      for (const auto& p : null_function_profile(result.solution.sigma_hat, f, a.profile_grid)) {
        prof << io::format_number(p.theta) << '\t' << io::format_number(p.value) << '\n';
      }
    } else {
      std::cerr << "warning: Σ̂ has full rank, no null-function profile written\n";
    }
  }
  std::cout << "rank " << result.spectrum.rank << '\n';
  for (std::size_t k = 0; k < result.spectrum.count(); ++k) {
    std::cout << "theta " << io::format_number(result.spectrum.frequencies[k]) << " power "
              << io::format_number(result.spectrum.powers[k]) << '\n';
  }
  if (result.solution.status == SdpStatus::infeasible_like) {
    std::cerr << "solver stopped without reaching feasibility\n";
    return kSolver;
  }
  if (result.solution.status == SdpStatus::max_iters) {
    std::cerr << "warning: solver hit the iteration cap\n";
  }
  return kOk;
}

struct AtomicArgs {
  std::string data;
  std::string filter;
  std::string solver;
  double eps_rel = 0.0;
  int max_iters = 0;
  std::string out;
};

int cmd_atomic_norm(const AtomicArgs& a) {
  require_file(a.data, "data");
  require_file(a.filter, "filter");
  if (!a.out.empty()) require_parent(a.out);
  const SolverOptions opts = solver_from(a.solver, a.eps_rel, a.max_iters);
  const GFilter f = io::load_filter_design(a.filter).build();
  const CMatrix s = io::load_matrix(a.data);
  if (s.rows() != f.size()) {
    throw DimensionError("data has " + std::to_string(s.rows()) + " rows but the filter size is " +
                         std::to_string(f.size()));
  }
  json record;
  if (s.isZero(0.0)) {
    record["atomic_norm"] = 0.0;
  } else {
    const auto sol = solve(SdpProblem{f, s, SdpMode::noiseless, 0.0, nullptr}, opts);
    record["atomic_norm"] = std::stod(io::format_number(sol.objective));
    record["solver"] = io::solution_json(sol);
    if (sol.status == SdpStatus::infeasible_like) {
      std::cerr << "solver stopped without reaching feasibility\n";
      return kSolver;
    }
  }
  std::cout << "atomic_norm " << io::format_number(record["atomic_norm"].get<double>()) << '\n';
  if (!a.out.empty()) write_json(a.out, record);
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::string preset;
  bool reduced = false;
  std::string out;
  unsigned threads = 0;
};

int cmd_experiment(const ExperimentArgs& a) {
  if (a.config.empty() == a.preset.empty()) throw ConfigError("experiment: give exactly one of --config or --preset");
  fs::path path = a.config;
  if (!a.preset.empty()) {
    path = fs::path(GFANM_CONFIG_DIR) / (a.preset + ".json");
    if (!fs::is_regular_file(path)) throw ConfigError("unknown preset '" + a.preset + "'");
  }
  require_file(path, "config");
  std::vector<ScenarioConfig> scenarios;
  try {
    scenarios = io::load_scenarios(path, a.reduced);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  std::vector<ScenarioResult> results;
  for (const auto& cfg : scenarios) {
    std::cerr << "scenario " << cfg.name << " (" << to_string(cfg.method) << "): "
              << cfg.theta0.size() * cfg.snr_db.size() << " cells x " << cfg.trials << " trials\n";
    results.push_back(run_scenario(cfg, a.threads));
  }
  io::write_experiment_outputs(a.out, results);
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      std::cout << r.config.name << ' ' << to_string(r.config.method) << " theta0 "
                << io::format_number(c.theta0) << " snr_db " << io::format_number(c.snr_db)
                << " p_succ " << io::format_number(c.p_succ) << '\n';
    }
  }
  return kOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const StabilityError*>(&e) ||
      dynamic_cast<const ArgumentError*>(&e)) {
    return kConfig;
  }
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const InsufficientDataError*>(&e)) {
    return kData;
  }
  if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const StageError*>(&e) ||
      dynamic_cast<const NotPsdError*>(&e) || dynamic_cast<const ConditioningError*>(&e)) {
    return kSolver;
  }
  return kOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G-filter atomic-norm line spectral estimation"};
  app.require_subcommand(1);

  DesignArgs design;
  auto* c_design = app.add_subcommand("design-filter", "Normalize a filter and write its gain profile");
  c_design->add_option("--preset", design.preset, "Built-in pole set (g1 or g2)");
  c_design->add_option("--delay", design.delay, "Shift-register filter of this size");
  c_design->add_option("--poles", design.poles, "Pole list modulus:phase:multiplicity,...");
  c_design->add_option("--spec", design.spec, "Filter JSON (poles, preset, delay or a_file/b_file)");
  double design_eps = 1e-3;
  auto* design_eps_opt = c_design->add_option("--epsilon", design_eps, "Transient tolerance (default 1e-3)");
  c_design->add_option("--grid", design.grid, "Gain profile grid size")->capture_default_str();
  c_design->add_option("--out", design.out, "Output directory")->required();

  SimulateArgs sim;
  double snr = 0.0;
  auto* c_sim = app.add_subcommand("simulate", "Write a synthetic multi-cisoid signal table");
  c_sim->add_option("--theta", sim.theta, "Frequencies, comma separated")->required();
  c_sim->add_option("--amplitude", sim.amplitude, "Common amplitude modulus")->capture_default_str();
  c_sim->add_option("--length", sim.length, "Signal length L")->capture_default_str();
  auto* snr_opt = c_sim->add_option("--snr-db", snr, "SNR in dB (omit for a noise-free signal)");
  c_sim->add_option("--seed", sim.seed, "Seed for phases then noise")->capture_default_str();
  c_sim->add_option("--out", sim.out, "Signal table")->required();

  FilterArgs filt;
  double filt_eps = 0.0;
  Index filt_discard = 0;
  auto* c_filter = app.add_subcommand("filter", "Run a signal through a filter and keep post-transient states");
  c_filter->add_option("--signal", filt.signal, "Signal table")->required();
  c_filter->add_option("--filter", filt.filter, "filter.json from design-filter")->required();
  auto* filt_eps_opt = c_filter->add_option("--epsilon", filt_eps, "Override the transient tolerance");
  auto* filt_discard_opt = c_filter->add_option("--discard", filt_discard, "Drop exactly this many states");
  c_filter->add_option("--out", filt.out, "Output matrix table")->required();
  filt_eps_opt->excludes(filt_discard_opt);

  EstimateArgs est;
  double est_lambda = 0.0, est_sigma = 0.0, est_eps = 0.0;
  auto* c_est = app.add_subcommand("estimate", "Estimate the line spectrum of a signal");
  c_est->add_option("--signal", est.signal, "Signal table")->required();
  c_est->add_option("--filter", est.filter, "filter.json from design-filter")->required();
  c_est->add_option("--method", est.method, "manm or sanm")->capture_default_str();
  auto* lambda_opt = c_est->add_option("--lambda", est_lambda, "Fixed regularization weight");
  auto* sigma_opt = c_est->add_option("--sigma", est_sigma, "Known noise standard deviation for the λ rule");
  c_est->add_option("--beta-variant", est.beta_variant, "as_printed or lx_only")->capture_default_str();
  c_est->add_option("--solver", est.solver, "Solver options JSON");
  c_est->add_option("--eps-rel", est.eps_rel, "Relative solver tolerance");
  c_est->add_option("--max-iters", est.max_iters, "Solver iteration cap");
  auto* est_eps_opt = c_est->add_option("--epsilon", est_eps, "Override the transient tolerance");
  c_est->add_option("--out", est.out, "Spectrum JSON")->required();
  c_est->add_option("--profile", est.profile, "Also write the null function d(θ) as a table");
  c_est->add_option("--profile-grid", est.profile_grid, "Profile grid size")->capture_default_str();

  AtomicArgs atom;
  auto* c_atom = app.add_subcommand("atomic-norm", "Atomic norm of a filter-output matrix");
  c_atom->add_option("--data", atom.data, "n x L_x matrix table")->required();
  c_atom->add_option("--filter", atom.filter, "filter.json from design-filter")->required();
  c_atom->add_option("--solver", atom.solver, "Solver options JSON");
  c_atom->add_option("--eps-rel", atom.eps_rel, "Relative solver tolerance");
  c_atom->add_option("--max-iters", atom.max_iters, "Solver iteration cap");
  c_atom->add_option("--out", atom.out, "Solution JSON");

  ExperimentArgs exp;
  auto* c_exp = app.add_subcommand("experiment", "Run Monte Carlo scenarios and write result tables");
  c_exp->add_option("--config", exp.config, "Scenario JSON");
  c_exp->add_option("--preset", exp.preset, "Preset name from the configs directory");
  c_exp->add_flag("--reduced", exp.reduced, "Apply each scenario's reduced block");
  c_exp->add_option("--out", exp.out, "Output directory")->required();
  c_exp->add_option("--threads", exp.threads, "Worker threads (default: GFANM_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (c_design->parsed()) {
      if (*design_eps_opt) design.epsilon = design_eps;
      return cmd_design_filter(design);
    }
    if (c_sim->parsed()) {
      if (*snr_opt) sim.snr_db = snr;
      return cmd_simulate(sim);
    }
    if (c_filter->parsed()) {
      if (*filt_eps_opt) filt.epsilon = filt_eps;
      if (*filt_discard_opt) filt.discard = filt_discard;
      return cmd_filter(filt);
    }
    if (c_est->parsed()) {
      if (*lambda_opt) est.lambda = est_lambda;
      if (*sigma_opt) est.sigma = est_sigma;
      if (*est_eps_opt) est.epsilon = est_eps;
      return cmd_estimate(est);
    }
    if (c_atom->parsed()) return cmd_atomic_norm(atom);
    if (c_exp->parsed()) return cmd_experiment(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kOther;
}

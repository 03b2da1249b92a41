#include "gfanm/io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace gfanm::io {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad or missing '" + key + "' (" + e.what() + ")");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get_as<T>(j, key, where);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

double rounded(double v) { return std::stod(format_number(v)); }

}  // namespace

std::string format_number(double value) {
  std::ostringstream os;
  os << std::setprecision(12) << value;
  return os.str();
}

void write_matrix_table(std::ostream& out, const CMatrix& m) {
  out << "# rows " << m.rows() << " cols " << m.cols() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << m(i, j).real() << ' ' << m(i, j).imag();
    }
    out << '\n';
  }
}

CMatrix read_matrix_table(std::istream& in) {
  long rows = -1;
  long cols = -1;
  std::vector<std::vector<double>> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream header(line.substr(first + 1));
      std::string k1, k2;
      long r = -1, c = -1;
      if (header >> k1 >> r >> k2 >> c && k1 == "rows" && k2 == "cols") {
        rows = r;
        cols = c;
      }
      continue;
    }
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ParseError("matrix table: bad number '" + token + "' on data line " +
                         std::to_string(lines.size() + 1));
      }
    }
    if (values.empty() || values.size() % 2 != 0) {
      throw ParseError("matrix table: line " + std::to_string(lines.size() + 1) +
                       " must hold (re, im) pairs");
    }
    lines.push_back(std::move(values));
  }
  if (lines.empty()) throw ParseError("matrix table: no data");
  const long width = static_cast<long>(lines.front().size() / 2);
  for (const auto& l : lines) {
    if (static_cast<long>(l.size() / 2) != width) throw ParseError("matrix table: ragged rows");
  }
  if (rows >= 0 && (rows != static_cast<long>(lines.size()) || cols != width)) {
    throw ParseError("matrix table: header announces " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " but the data is " + std::to_string(lines.size()) +
                     "x" + std::to_string(width) + " (truncated file?)");
  }
  CMatrix m(static_cast<Index>(lines.size()), width);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < width; ++j) {
      const auto& l = lines[static_cast<std::size_t>(i)];
      m(i, j) = {l[static_cast<std::size_t>(2 * j)], l[static_cast<std::size_t>(2 * j + 1)]};
    }
  }
  if (!m.allFinite()) throw ParseError("matrix table: non-finite entries");
  return m;
}

void save_matrix(const std::filesystem::path& path, const CMatrix& m) {
  auto out = open_out(path);
  write_matrix_table(out, m);
}

CMatrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_table(in);
}

CVector load_signal(const std::filesystem::path& path) {
  const CMatrix m = load_matrix(path);
  if (m.cols() != 1) throw ParseError("signal table must have exactly one (re, im) column pair");
  return m.col(0);
}

std::vector<PoleSpec> parse_poles(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("poles: expected a nonempty array");
  std::vector<PoleSpec> out;
  for (const auto& p : j) {
    check_keys(p, {"modulus", "phase", "multiplicity"}, "pole");
    PoleSpec spec{get_as<double>(p, "modulus", "pole"), get_as<double>(p, "phase", "pole"),
                  get_as<int>(p, "multiplicity", "pole")};
    if (!(spec.modulus >= 0.0 && spec.modulus < 1.0)) {
      throw StabilityError("pole modulus " + format_number(spec.modulus) +
                           " is outside [0, 1): the filter would be unstable");
    }
    if (spec.multiplicity < 1) throw ConfigError("pole multiplicity must be >= 1");
    out.push_back(spec);
  }
  return out;
}

json poles_json(const std::vector<PoleSpec>& poles) {
  json arr = json::array();
  for (const auto& p : poles) {
    arr.push_back({{"modulus", p.modulus}, {"phase", p.phase}, {"multiplicity", p.multiplicity}});
  }
  return arr;
}

FilterDesign parse_filter_design(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"poles", "preset", "delay", "a_file", "b_file", "epsilon", "size", "transient_length",
              "normalization_residual"},
             "filter");
  FilterDesign d;
  d.epsilon = get_or<double>(j, "epsilon", 1e-3, "filter");
  const int forms = static_cast<int>(j.contains("poles")) + static_cast<int>(j.contains("preset")) +
                    static_cast<int>(j.contains("delay")) + static_cast<int>(j.contains("a_file"));
  if (forms != 1) {
    throw ConfigError("filter: give exactly one of 'poles', 'preset', 'delay' or 'a_file'/'b_file'");
  }
  if (j.contains("poles")) {
    d.poles = parse_poles(j.at("poles"));
  } else if (j.contains("preset")) {
    const auto name = get_as<std::string>(j, "preset", "filter");
    if (name == "g1") {
      d.poles = g1_poles();
    } else if (name == "g2") {
      d.poles = g2_poles();
    } else {
      throw ConfigError("filter: unknown preset '" + name + "' (expected g1 or g2)");
    }
  } else if (j.contains("delay")) {
    const int n = get_as<int>(j, "delay", "filter");
    if (n < 1) throw ConfigError("filter: delay size must be >= 1");
    d.poles = {PoleSpec{0.0, 0.0, n}};
  } else {
    d.a_file = base_dir / get_as<std::string>(j, "a_file", "filter");
    d.b_file = base_dir / get_as<std::string>(j, "b_file", "filter");
  }
  return d;
}

FilterDesign load_filter_design(const std::filesystem::path& path) {
  return parse_filter_design(read_json(path), path.parent_path());
}

GFilter FilterDesign::build() const {
  if (!poles.empty()) return design_filter(poles);
  const CMatrix a = load_matrix(a_file);
  const CMatrix b = load_matrix(b_file);
  if (b.cols() != 1) throw ParseError("filter: b table must be a single column");
  return normalize_filter(a, b.col(0));
}

json filter_design_json(const FilterDesign& design, const GFilter& f) {
  json j;
  if (!design.poles.empty()) {
    j["poles"] = poles_json(design.poles);
  } else {
    j["a_file"] = design.a_file.filename().string();
    j["b_file"] = design.b_file.filename().string();
  }
  j["epsilon"] = design.epsilon;
  j["size"] = f.size();
  j["transient_length"] = transient_length(f, design.epsilon);
  j["normalization_residual"] = rounded(f.normalization_residual());
  return j;
}

json spectrum_json(const LineSpectrum& s) {
  json lines = json::array();
  for (std::size_t k = 0; k < s.count(); ++k) {
    lines.push_back({{"theta", rounded(s.frequencies[k])},
                     {"power", k < s.powers.size() ? rounded(s.powers[k]) : 0.0}});
  }
  return {{"rank", s.rank},
          {"lines", lines},
          {"under_resolved", s.under_resolved},
          {"powers_clamped", s.powers_clamped}};
}

json solution_json(const SdpSolution& s) {
  return {{"objective", rounded(s.objective)},
          {"primal_residual", rounded(s.primal_residual)},
          {"dual_residual", rounded(s.dual_residual)},
          {"iterations", s.iterations},
          {"status", to_string(s.status)}};
}

SolverOptions parse_solver_options(const json& j, SolverOptions base) {
  check_keys(j, {"eps_rel", "eps_abs", "max_iters", "rho", "over_relaxation", "adaptive_rho"},
             "solver");
  base.eps_rel = get_or<double>(j, "eps_rel", base.eps_rel, "solver");
  base.eps_abs = get_or<double>(j, "eps_abs", base.eps_abs, "solver");
  base.max_iters = get_or<int>(j, "max_iters", base.max_iters, "solver");
  base.rho = get_or<double>(j, "rho", base.rho, "solver");
  base.over_relaxation = get_or<double>(j, "over_relaxation", base.over_relaxation, "solver");
  base.adaptive_rho = get_or<bool>(j, "adaptive_rho", base.adaptive_rho, "solver");
  if (!(base.eps_rel > 0.0) || !(base.eps_abs >= 0.0) || base.max_iters < 1 ||
      !(base.over_relaxation > 0.0 && base.over_relaxation < 2.0)) {
    throw ConfigError("solver: tolerances must be positive and over_relaxation in (0, 2)");
  }
  return base;
}

namespace {

ScenarioConfig parse_scenario(const json& j, bool reduced) {
  check_keys(j,
             {"name", "method", "filter", "length", "m", "layout", "theta0", "snr_db", "amplitude",
              "trials", "base_seed", "epsilon", "lambda", "beta_variant", "rank_rule", "solver",
              "standard_size", "reduced"},
             "scenario");
  ScenarioConfig cfg;
  cfg.name = get_or<std::string>(j, "name", cfg.name, "scenario");
  const std::string where = "scenario '" + cfg.name + "'";
  cfg.method = method_from_string(get_as<std::string>(j, "method", where));
  if (j.contains("filter")) {
    const FilterDesign d = parse_filter_design(j.at("filter"));
    if (!d.a_file.empty()) throw ConfigError(where + ": scenario filters must be pole based");
    cfg.poles = d.poles;
  }
  cfg.length = get_or<Index>(j, "length", cfg.length, where);
  cfg.m = get_or<Index>(j, "m", cfg.m, where);
  cfg.layout = layout_from_string(get_or<std::string>(j, "layout", to_string(cfg.layout), where));
  cfg.theta0 = get_as<std::vector<double>>(j, "theta0", where);
  cfg.snr_db = get_as<std::vector<double>>(j, "snr_db", where);
  cfg.amplitude = get_or<double>(j, "amplitude", cfg.amplitude, where);
  cfg.trials = get_or<int>(j, "trials", cfg.trials, where);
  cfg.base_seed = get_or<std::uint64_t>(j, "base_seed", cfg.base_seed, where);
  cfg.epsilon = get_or<double>(j, "epsilon", cfg.epsilon, where);
  cfg.standard_size = get_or<Index>(j, "standard_size", cfg.standard_size, where);
  if (j.contains("lambda")) {
    const json& l = j.at("lambda");
    if (l.is_string() && l == "eq13") {
      cfg.lambda.kind = LambdaPolicy::Kind::eq13;
    } else if (l.is_string() && l == "oracle_sigma") {
      cfg.lambda.kind = LambdaPolicy::Kind::oracle_sigma;
    } else if (l.is_object()) {
      check_keys(l, {"fixed"}, where + " lambda");
      cfg.lambda.kind = LambdaPolicy::Kind::fixed;
      cfg.lambda.value = get_as<double>(l, "fixed", where);
    } else {
      throw ConfigError(where + ": lambda must be \"eq13\", \"oracle_sigma\" or {\"fixed\": value}");
    }
  }
  const auto beta = get_or<std::string>(j, "beta_variant", "as_printed", where);
  if (beta == "as_printed") {
    cfg.beta_variant = BetaVariant::as_printed;
  } else if (beta == "lx_only") {
    cfg.beta_variant = BetaVariant::lx_only;
  } else {
    throw ConfigError(where + ": beta_variant must be as_printed or lx_only");
  }
  if (j.contains("rank_rule")) {
    const json& r = j.at("rank_rule");
    check_keys(r, {"abs_threshold", "ratio_threshold"}, where + " rank_rule");
    cfg.rank_rule.abs_threshold = get_or<double>(r, "abs_threshold", cfg.rank_rule.abs_threshold, where);
    cfg.rank_rule.ratio_threshold = get_or<double>(r, "ratio_threshold", cfg.rank_rule.ratio_threshold, where);
  }
  if (j.contains("solver")) cfg.solver = parse_solver_options(j.at("solver"));
  if (j.contains("reduced")) {
    const json& r = j.at("reduced");
    check_keys(r, {"theta0", "snr_db", "trials"}, where + " reduced");
    if (reduced) {
      cfg.theta0 = get_or<std::vector<double>>(r, "theta0", cfg.theta0, where);
      cfg.snr_db = get_or<std::vector<double>>(r, "snr_db", cfg.snr_db, where);
      cfg.trials = get_or<int>(r, "trials", cfg.trials, where);
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<ScenarioConfig> parse_scenarios(const json& j, bool reduced) {
  check_keys(j, {"scenarios", "description"}, "experiment config");
  if (!j.contains("scenarios") || !j.at("scenarios").is_array() || j.at("scenarios").empty()) {
    throw ConfigError("experiment config: 'scenarios' must be a nonempty array");
  }
  std::vector<ScenarioConfig> out;
  for (const auto& s : j.at("scenarios")) out.push_back(parse_scenario(s, reduced));
  return out;
}

std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& path, bool reduced) {
  return parse_scenarios(read_json(path), reduced);
}

json scenario_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["method"] = to_string(cfg.method);
  if (!cfg.poles.empty()) j["filter"] = {{"poles", poles_json(cfg.poles)}};
  j["length"] = cfg.length;
  j["m"] = cfg.m;
  j["layout"] = to_string(cfg.layout);
  j["theta0"] = cfg.theta0;
  j["snr_db"] = cfg.snr_db;
  j["amplitude"] = cfg.amplitude;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["epsilon"] = cfg.epsilon;
  switch (cfg.lambda.kind) {
    case LambdaPolicy::Kind::eq13:
      j["lambda"] = "eq13";
      break;
    case LambdaPolicy::Kind::oracle_sigma:
      j["lambda"] = "oracle_sigma";
      break;
    case LambdaPolicy::Kind::fixed:
      j["lambda"] = {{"fixed", cfg.lambda.value}};
      break;
  }
  j["beta_variant"] = cfg.beta_variant == BetaVariant::as_printed ? "as_printed" : "lx_only";
  j["rank_rule"] = {{"abs_threshold", cfg.rank_rule.abs_threshold},
                    {"ratio_threshold", cfg.rank_rule.ratio_threshold}};
  j["solver"] = {{"eps_rel", cfg.solver.eps_rel},
                 {"eps_abs", cfg.solver.eps_abs},
                 {"max_iters", cfg.solver.max_iters},
                 {"rho", cfg.solver.rho},
                 {"over_relaxation", cfg.solver.over_relaxation},
                 {"adaptive_rho", cfg.solver.adaptive_rho}};
  if (cfg.method == Method::standard_anm) j["standard_size"] = cfg.standard_size;
  return j;
}

void write_recovery_table(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "method,theta0,snr_db,trials,successes,p_succ\n";
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      out << to_string(r.config.method) << ',' << format_number(c.theta0) << ','
          << format_number(c.snr_db) << ',' << c.trials << ',' << c.successes << ','
          << format_number(c.p_succ) << '\n';
    }
  }
}

void write_error_table(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "method,theta0,snr_db,trial_index,freq_error\n";
  for (const auto& r : results) {
    for (const auto& t : r.records) {
      if (!t.freq_error) continue;
      out << to_string(r.config.method) << ',' << format_number(t.theta0) << ','
          << format_number(t.snr_db) << ',' << t.trial_index << ',' << format_number(*t.freq_error)
          << '\n';
    }
  }
}

void write_error_stats_table(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "method,theta0,snr_db,successes,min,q1,median,q3,max\n";
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      out << to_string(r.config.method) << ',' << format_number(c.theta0) << ','
          << format_number(c.snr_db) << ',' << c.successes;
      if (c.errors) {
        for (double v : {c.errors->min, c.errors->q1, c.errors->median, c.errors->q3, c.errors->max}) {
          out << ',' << format_number(v);
        }
      } else {
        out << ",,,,,";
      }
      out << '\n';
    }
  }
}

void write_comparison_table(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "method,scenario,theta0,snr_db,p_succ,median_freq_error\n";
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      out << to_string(r.config.method) << ',' << r.config.name << ',' << format_number(c.theta0)
          << ',' << format_number(c.snr_db) << ',' << format_number(c.p_succ) << ','
          << (c.errors ? format_number(c.errors->median) : std::string()) << '\n';
    }
  }
}

void write_trials_table(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "method,theta0,snr_db,trial_index,rank,success,freq_error,objective,iterations,failure\n";
  for (const auto& r : results) {
    for (const auto& t : r.records) {
      std::string failure = t.failure;
      for (char& ch : failure) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << to_string(r.config.method) << ',' << format_number(t.theta0) << ','
          << format_number(t.snr_db) << ',' << t.trial_index << ',' << t.rank << ','
          << (t.success ? 1 : 0) << ',' << (t.freq_error ? format_number(*t.freq_error) : "") << ','
          << format_number(t.objective) << ',' << t.iterations << ',' << failure << '\n';
    }
  }
}

void write_experiment_outputs(const std::filesystem::path& dir,
                              const std::vector<ScenarioResult>& results) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "recovery.csv");
    write_recovery_table(out, results);
  }
  {
    auto out = open_out(dir / "errors.csv");
    write_error_table(out, results);
  }
  {
    auto out = open_out(dir / "error_stats.csv");
    write_error_stats_table(out, results);
  }
  {
    auto out = open_out(dir / "comparison.csv");
    write_comparison_table(out, results);
  }
  {
    auto out = open_out(dir / "trials.csv");
    write_trials_table(out, results);
  }
  json meta;
  meta["rng"] = std::string(kRngName);
  meta["scenarios"] = json::array();
  double wall = 0.0;
  for (const auto& r : results) {
    meta["scenarios"].push_back(scenario_json(r.config));
    for (const auto& t : r.records) wall += t.wall_time;
  }
  // Run-dependent values share one compact line so reruns differ only there.
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  const json run = {{"generated_at", stamp.str()}, {"total_trial_seconds", wall}};
  std::string text = meta.dump(2);
  text.insert(text.size() - 2, ",\n  \"run\": " + run.dump());
  auto out = open_out(dir / "metadata.json");
  out << text << '\n';
}

}  // namespace gfanm::io

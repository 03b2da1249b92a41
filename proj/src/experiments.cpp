#include "gfanm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace gfanm {

std::string to_string(Method m) {
  switch (m) {
    case Method::manm:
      return "manm";
    case Method::sanm:
      return "sanm";
    case Method::standard_anm:
      return "standard_anm";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "manm") return Method::manm;
  if (s == "sanm") return Method::sanm;
  if (s == "standard_anm") return Method::standard_anm;
  throw ConfigError("unknown method '" + s + "' (expected manm, sanm or standard_anm)");
}

std::string to_string(Layout layout) {
  switch (layout) {
    case Layout::three_spaced:
      return "three_spaced";
    case Layout::two_close:
      return "two_close";
    case Layout::two_spaced:
      return "two_spaced";
  }
  return "unknown";
}

Layout layout_from_string(const std::string& s) {
  if (s == "three_spaced") return Layout::three_spaced;
  if (s == "two_close") return Layout::two_close;
  if (s == "two_spaced") return Layout::two_spaced;
  throw ConfigError("unknown layout '" + s + "' (expected three_spaced, two_close or two_spaced)");
}

namespace {

Index filter_size(const ScenarioConfig& cfg) {
  if (cfg.method == Method::standard_anm) {
    return cfg.standard_size > 0 ? cfg.standard_size : cfg.length;
  }
  Index n = 0;
  for (const auto& p : cfg.poles) n += p.multiplicity;
  return n;
}

Index layout_count(Layout layout) { return layout == Layout::three_spaced ? 3 : 2; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void ScenarioConfig::validate() const {
  const std::string where = "scenario '" + name + "': ";
  if (trials < 1) throw ConfigError(where + "trials must be >= 1");
  if (theta0.empty() || snr_db.empty()) throw ConfigError(where + "theta0 and snr_db grids must be nonempty");
  if (length < 1) throw ConfigError(where + "signal length must be >= 1");
  if (!(amplitude > 0.0)) throw ConfigError(where + "amplitude must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError(where + "epsilon must lie in (0, 1)");
  if (method == Method::standard_anm) {
    if (!poles.empty()) throw ConfigError(where + "standard_anm uses the delay filter; remove the pole list");
    if (standard_size > length) throw ConfigError(where + "standard_size cannot exceed the signal length");
  } else if (poles.empty()) {
    throw ConfigError(where + to_string(method) + " needs a pole list");
  }
  const Index n = filter_size(*this);
  if (m < 1 || m >= n) {
    throw ConfigError(where + "the number of cisoids m = " + std::to_string(m) +
                      " must be strictly less than the filter size n = " + std::to_string(n));
  }
  if (m != layout_count(layout)) {
    throw ConfigError(where + "layout " + to_string(layout) + " places " +
                      std::to_string(layout_count(layout)) + " cisoids, but m = " + std::to_string(m));
  }
  for (double t : theta0) {
    try {
      experiment_frequencies(t, layout, length);
    } catch (const ArgumentError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (lambda.kind == LambdaPolicy::Kind::fixed && !(lambda.value > 0.0)) {
    throw ConfigError(where + "fixed lambda must be positive");
  }
  if (!(solver.eps_rel > 0.0) || solver.max_iters < 1) {
    throw ConfigError(where + "solver tolerances must be positive");
  }
  if (!(rank_rule.abs_threshold > 0.0 && rank_rule.ratio_threshold > 0.0)) {
    throw ConfigError(where + "rank thresholds must be positive");
  }
}

MethodPipeline::MethodPipeline(const ScenarioConfig& cfg) : method_(cfg.method) {
  cfg.validate();
  if (cfg.method == Method::standard_anm) {
    filter_ = std::make_shared<GFilter>(delay_filter(filter_size(cfg)));
    // A full shift register carries no trace of the initial state.
    discard_ = filter_->size() - 1;
  } else {
    filter_ = std::make_shared<GFilter>(design_filter(cfg.poles));
    discard_ = transient_length(*filter_, cfg.epsilon);
  }
  if (cfg.length <= discard_) {
    throw ConfigError("scenario '" + cfg.name + "': signal length " + std::to_string(cfg.length) +
                      " leaves no output after discarding " + std::to_string(discard_) +
                      " transient states");
  }
  subspace_ = make_range_subspace(*filter_);
}

CMatrix MethodPipeline::data(const CVector& y) const {
  const OutputMatrix out = apply_filter_skip(*filter_, y, discard_);
  if (method_ == Method::manm) return out.x;
  return out.x.rightCols(1);
}

MethodPipeline make_method_pipeline(const ScenarioConfig& cfg) { return MethodPipeline(cfg); }

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t theta_index, std::size_t snr_index,
                         int trial_index) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(theta_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(snr_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
  return h;
}

double frequency_error(std::vector<double> estimate, std::vector<double> truth) {
  if (estimate.size() != truth.size()) {
    throw ArgumentError("frequency_error: estimate and truth differ in length");
  }
  std::sort(estimate.begin(), estimate.end());
  std::sort(truth.begin(), truth.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = estimate[k] - truth[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

TrialRecord run_trial(const ScenarioConfig& cfg, const MethodPipeline& pipeline,
                      std::size_t theta_index, std::size_t snr_index, int trial_index) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.theta0 = cfg.theta0.at(theta_index);
  rec.snr_db = cfg.snr_db.at(snr_index);
  rec.theta_index = theta_index;
  rec.snr_index = snr_index;
  rec.trial_index = trial_index;

  Rng rng(trial_seed(cfg.base_seed, theta_index, snr_index, trial_index));
  const std::vector<double> truth = experiment_frequencies(rec.theta0, cfg.layout, cfg.length);
  CisoidSpec spec{random_phase_amplitudes(truth.size(), cfg.amplitude, rng), truth};
  const double variance = snr_to_sigma2(rec.snr_db, cfg.amplitude);
  const CVector y = generate_signal(spec, cfg.length, variance, rng);

  try {
    const CMatrix x = pipeline.data(y);
    double lambda = cfg.lambda.value;
    if (cfg.lambda.kind != LambdaPolicy::Kind::fixed) {
      const double sigma_hat = cfg.lambda.kind == LambdaPolicy::Kind::oracle_sigma
                                   ? std::sqrt(variance)
                                   : std::sqrt(estimate_noise_variance(y));
      lambda = lambda_heuristic(sigma_hat, pipeline.filter().size(), cfg.length, x.cols(),
                                cfg.beta_variant)
                   .lambda;
    }
    const auto result = estimate_line_spectrum(x, pipeline.filter(), lambda, cfg.rank_rule,
                                               cfg.solver, pipeline.subspace());
    rec.rank = result.spectrum.rank;
    rec.objective = result.solution.objective;
    rec.iterations = result.solution.iterations;
    if (rec.rank == cfg.m) {
      if (result.spectrum.count() == truth.size()) {
        rec.success = true;
        rec.freq_error = frequency_error(result.spectrum.frequencies, truth);
      } else {
        rec.failure = "under_resolved";
      }
    }
  } catch (const Error& e) {
    rec.failure = e.what();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

TrialRecord run_trial(const ScenarioConfig& cfg, std::size_t theta_index, std::size_t snr_index,
                      int trial_index) {
  return run_trial(cfg, MethodPipeline(cfg), theta_index, snr_index, trial_index);
}

ErrorStats quantiles(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("quantiles: empty sample");
  std::sort(values.begin(), values.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

CellSummary summarize_cell(const std::vector<TrialRecord>& records) {
  CellSummary cell;
  if (records.empty()) return cell;
  cell.theta0 = records.front().theta0;
  cell.snr_db = records.front().snr_db;
  cell.trials = static_cast<int>(records.size());
  std::vector<double> errors;
  for (const auto& r : records) {
    if (r.success) {
      ++cell.successes;
      if (r.freq_error) errors.push_back(*r.freq_error);
    }
  }
  cell.p_succ = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
  if (!errors.empty()) cell.errors = quantiles(std::move(errors));
  return cell;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("GFANM_THREADS")) {
    const long value = std::strtol(env, nullptr, 10);
    if (value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  const MethodPipeline pipeline(cfg);
  ScenarioResult result;
  result.config = cfg;

  const std::size_t n_theta = cfg.theta0.size();
  const std::size_t n_snr = cfg.snr_db.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = n_theta * n_snr * n_trials;
  result.records.resize(total);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t ti = job / (n_snr * n_trials);
      const std::size_t si = (job / n_trials) % n_snr;
      const int trial = static_cast<int>(job % n_trials);
      result.records[job] = run_trial(cfg, pipeline, ti, si, trial);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : default_thread_count(),
                                                           static_cast<unsigned>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t cell = 0; cell < n_theta * n_snr; ++cell) {
    const auto first = result.records.begin() + static_cast<std::ptrdiff_t>(cell * n_trials);
    result.cells.push_back(
        summarize_cell(std::vector<TrialRecord>(first, first + static_cast<std::ptrdiff_t>(n_trials))));
  }
  return result;
}

}  // namespace gfanm

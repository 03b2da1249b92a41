#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gfanm/anm.hpp"
#include "gfanm/cfdecomp.hpp"
#include "gfanm/gfilter.hpp"
#include "gfanm/sigmodel.hpp"

namespace gfanm {

enum class Method { manm, sanm, standard_anm };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
std::string to_string(Layout layout);
Layout layout_from_string(const std::string& s);

struct LambdaPolicy {
  enum class Kind { eq13, fixed, oracle_sigma };
  Kind kind = Kind::eq13;
  double value = 0.0;  // used by Kind::fixed
};

struct ScenarioConfig {
  std::string name = "scenario";
  Method method = Method::manm;
  std::vector<PoleSpec> poles;  // G-filter methods only
  Index length = 117;
  Index m = 3;
  Layout layout = Layout::three_spaced;
  std::vector<double> theta0;
  std::vector<double> snr_db;
  double amplitude = 1.0;
  int trials = 50;
  std::uint64_t base_seed = 0;
  double epsilon = 1e-3;
  LambdaPolicy lambda;
  BetaVariant beta_variant = BetaVariant::as_printed;
  RankRule rank_rule;
  SolverOptions solver;
  Index standard_size = 0;  // delay-filter size for standard_anm; 0 means L

  /// Throws ConfigError; enforces m < n for every method.
  void validate() const;
};

/// Per-method data path: which filter, how many states are dropped, and
/// which output columns reach the SDP.
class MethodPipeline {
 public:
  explicit MethodPipeline(const ScenarioConfig& cfg);

  Method method() const noexcept { return method_; }
  const GFilter& filter() const noexcept { return *filter_; }
  Index discard() const noexcept { return discard_; }
  const std::shared_ptr<const HermitianSubspace>& subspace() const noexcept { return subspace_; }

  /// Filters y and keeps every post-transient state (MANM) or only x(L-1).
  CMatrix data(const CVector& y) const;

 private:
  Method method_;
  std::shared_ptr<const GFilter> filter_;
  Index discard_ = 0;
  std::shared_ptr<const HermitianSubspace> subspace_;
};

MethodPipeline make_method_pipeline(const ScenarioConfig& cfg);

struct TrialRecord {
  double theta0 = 0.0;
  double snr_db = 0.0;
  std::size_t theta_index = 0;
  std::size_t snr_index = 0;
  int trial_index = 0;
  Index rank = 0;
  bool success = false;
  std::optional<double> freq_error;
  double objective = 0.0;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  std::string failure;     // empty unless a pipeline stage threw
};

struct ErrorStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct CellSummary {
  double theta0 = 0.0;
  double snr_db = 0.0;
  int trials = 0;
  int successes = 0;
  double p_succ = 0.0;
  std::optional<ErrorStats> errors;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<TrialRecord> records;  // ordered by (theta, snr, trial)
  std::vector<CellSummary> cells;    // ordered by (theta, snr)
};

/// Stable 64-bit seed for one trial.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t theta_index, std::size_t snr_index,
                         int trial_index);

/// One Monte Carlo trial; never throws for pipeline failures (see failure).
TrialRecord run_trial(const ScenarioConfig& cfg, const MethodPipeline& pipeline,
                      std::size_t theta_index, std::size_t snr_index, int trial_index);
TrialRecord run_trial(const ScenarioConfig& cfg, std::size_t theta_index, std::size_t snr_index,
                      int trial_index);

/// Summaries for one (θ₀, SNR) cell.
CellSummary summarize_cell(const std::vector<TrialRecord>& records);

/// Linear-interpolation quantiles (min, q1, median, q3, max).
ErrorStats quantiles(std::vector<double> values);

/// Runs all trials, in parallel over `threads` workers (0 = default_thread_count()).
ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads = 0);

/// GFANM_THREADS if set, hardware concurrency otherwise.
unsigned default_thread_count();

/// Euclidean distance between the ascending sorts of both lists.
double frequency_error(std::vector<double> estimate, std::vector<double> truth);

}  // namespace gfanm

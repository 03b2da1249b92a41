#include <doctest.h>

#include <set>

#include "gfanm/experiments.hpp"
#include "gfanm/subspace.hpp"

using namespace gfanm;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig c;
  c.name = "unit";
  c.method = Method::manm;
  c.poles = g1_poles();
  c.m = 3;
  c.layout = Layout::three_spaced;
  c.theta0 = {2.0};
  c.snr_db = {6.0};
  c.trials = 4;
  c.base_seed = 99;
  return c;
}

std::string config_error(const ScenarioConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool same_outcome(const TrialRecord& a, const TrialRecord& b) {
  return a.theta0 == b.theta0 && a.snr_db == b.snr_db && a.trial_index == b.trial_index && a.rank == b.rank &&
         a.success == b.success && a.freq_error == b.freq_error && a.objective == b.objective &&
         a.iterations == b.iterations && a.failure == b.failure;
}

double p_succ(const ScenarioConfig& c) { return run_scenario(c).cells.front().p_succ; }

}  // namespace

TEST_CASE("frequency_error") {
  CHECK(frequency_error({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(frequency_error({2.0, 1.0}, {1.0, 2.0}) == 0.0);
  CHECK(frequency_error({1.1}, {1.0}) == doctest::Approx(0.1));
  CHECK(frequency_error({1.0, 2.3}, {1.0, 2.0}) == doctest::Approx(0.3));
  CHECK(frequency_error({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(frequency_error({}, {}) == 0.0);
  CHECK_THROWS_AS(frequency_error({1.0}, {1.0, 2.0}), ArgumentError);
}

TEST_CASE("enum names round trip") {
  for (Method m : {Method::manm, Method::sanm, Method::standard_anm}) CHECK(method_from_string(to_string(m)) == m);
  for (Layout l : {Layout::three_spaced, Layout::two_close, Layout::two_spaced}) {
    CHECK(layout_from_string(to_string(l)) == l);
  }
  CHECK_THROWS_AS(method_from_string("music"), ConfigError);
  CHECK_THROWS_AS(layout_from_string("four"), ConfigError);
}

TEST_CASE("scenario validation") {
  CHECK(config_error(base_config()).empty());

  ScenarioConfig big = base_config();
  big.poles = {{0.5, 2.0, 2}};
  big.m = 2;
  big.layout = Layout::two_close;
  CHECK(config_error(big).find("strictly less than the filter size") != std::string::npos);

  ScenarioConfig std_poles = base_config();
  std_poles.method = Method::standard_anm;
  CHECK(!config_error(std_poles).empty());

  ScenarioConfig no_poles = base_config();
  no_poles.poles.clear();
  CHECK(!config_error(no_poles).empty());

  ScenarioConfig mismatch = base_config();
  mismatch.layout = Layout::two_close;
  CHECK(config_error(mismatch).find("layout") != std::string::npos);

  ScenarioConfig edge = base_config();
  edge.theta0 = {2.0, 0.01};
  CHECK(!config_error(edge).empty());

  ScenarioConfig bad = base_config();
  bad.trials = 0;
  CHECK(!config_error(bad).empty());
  bad = base_config();
  bad.snr_db.clear();
  CHECK(!config_error(bad).empty());
  bad = base_config();
  bad.lambda = {LambdaPolicy::Kind::fixed, 0.0};
  CHECK(!config_error(bad).empty());
  bad = base_config();
  bad.epsilon = 1.5;
  CHECK(!config_error(bad).empty());

  // The transient must leave at least one output.
  ScenarioConfig short_signal = base_config();
  short_signal.length = 97;
  short_signal.theta0 = {2.0};
  CHECK_THROWS_AS(MethodPipeline{short_signal}, ConfigError);
}

TEST_CASE("method pipelines shape the data") {
  const CVector y = CVector::Ones(117);
  SUBCASE("manm keeps every post-transient state") {
    const MethodPipeline p(base_config());
    CHECK(p.discard() == 97);
    const CMatrix x = p.data(y);
    CHECK(x.rows() == 20);
    CHECK(x.cols() == 20);
  }
  SUBCASE("sanm keeps the last state") {
    ScenarioConfig c = base_config();
    c.method = Method::sanm;
    const MethodPipeline p(c);
    const CMatrix x = p.data(y);
    CHECK(x.cols() == 1);
    CHECK((x.col(0) - MethodPipeline(base_config()).data(y).col(19)).norm() == 0.0);
  }
  SUBCASE("standard_anm stacks the raw samples") {
    ScenarioConfig c = base_config();
    c.method = Method::standard_anm;
    c.poles.clear();
    const MethodPipeline p(c);
    CHECK(p.filter().size() == 117);
    CHECK(p.filter().is_delay());
    CHECK(dynamic_cast<const ToeplitzSubspace*>(p.subspace().get()) != nullptr);
    CVector ramp(117);
    for (Index t = 0; t < 117; ++t) ramp(t) = static_cast<double>(t);
    const CMatrix x = p.data(ramp);
    CHECK(x.rows() == 117);
    CHECK(x.cols() == 1);
    // x(L-1) holds y(0), ..., y(L-1), oldest first.
    for (Index i = 0; i < 117; ++i) CHECK(x(i, 0) == static_cast<double>(i));
  }
}

TEST_CASE("trial seeds are stable and distinct") {
  CHECK(trial_seed(1, 0, 0, 0) == trial_seed(1, 0, 0, 0));
  std::set<std::uint64_t> seen;
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t s = 0; s < 4; ++s)
      for (int k = 0; k < 10; ++k) seen.insert(trial_seed(7, t, s, k));
  CHECK(seen.size() == 160);
  CHECK(trial_seed(7, 1, 0, 0) != trial_seed(8, 1, 0, 0));
  // Chained splitmix64 over (seed, θ index, SNR index, trial), coded here
  // from the published constants.
  const auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  CHECK(mix(0) == 0xE220A8397B1DCDAFULL);
  CHECK(trial_seed(3001, 2, 1, 5) == mix(mix(mix(mix(3001) ^ 2) ^ 1) ^ 5));
}

TEST_CASE("scenario runs are deterministic across thread counts") {
  ScenarioConfig c = base_config();
  c.theta0 = {1.9, 2.1};
  c.snr_db = {0.0, 6.0};
  c.trials = 2;
  const ScenarioResult one = run_scenario(c, 1);
  const ScenarioResult many = run_scenario(c, 3);
  REQUIRE(one.records.size() == 8);
  REQUIRE(one.cells.size() == 4);
  for (std::size_t i = 0; i < one.records.size(); ++i) CHECK(same_outcome(one.records[i], many.records[i]));
  // Records are ordered by (θ₀, SNR, trial).
  CHECK(one.records[0].theta0 == 1.9);
  CHECK(one.records[2].snr_db == 6.0);
  CHECK(one.records[4].theta0 == 2.1);
  CHECK(one.records[1].trial_index == 1);
  const TrialRecord lone = run_trial(c, 1, 1, 1);
  CHECK(same_outcome(lone, one.records[7]));
  for (const auto& cell : one.cells) {
    CHECK(cell.p_succ >= 0.0);
    CHECK(cell.p_succ <= 1.0);
    CHECK(cell.trials == 2);
  }
}

TEST_CASE("cell summaries") {
  std::vector<TrialRecord> recs(4);
  for (int i = 0; i < 4; ++i) {
    recs[static_cast<std::size_t>(i)].theta0 = 2.0;
    recs[static_cast<std::size_t>(i)].snr_db = -3.0;
  }
  CellSummary none = summarize_cell(recs);
  CHECK(none.trials == 4);
  CHECK(none.successes == 0);
  CHECK(none.p_succ == 0.0);
  CHECK(!none.errors);

  recs[1].success = true;
  recs[1].freq_error = 0.02;
  recs[3].success = true;
  recs[3].freq_error = 0.01;
  const CellSummary half = summarize_cell(recs);
  CHECK(half.p_succ == 0.5);
  REQUIRE(half.errors);
  CHECK(half.errors->min == 0.01);
  CHECK(half.errors->max == 0.02);
  CHECK(half.theta0 == 2.0);
  CHECK(half.snr_db == -3.0);

  const CellSummary single = summarize_cell({recs[1]});
  CHECK(single.trials == 1);
  CHECK(single.p_succ == 1.0);
  CHECK(single.errors->median == 0.02);
}

TEST_CASE("quantiles interpolate linearly") {
  const ErrorStats odd = quantiles({5, 1, 4, 2, 3});
  CHECK(odd.min == 1);
  CHECK(odd.q1 == 2);
  CHECK(odd.median == 3);
  CHECK(odd.q3 == 4);
  CHECK(odd.max == 5);
  const ErrorStats even = quantiles({4, 3, 2, 1});
  CHECK(even.q1 == doctest::Approx(1.75));
  CHECK(even.median == doctest::Approx(2.5));
  CHECK(even.q3 == doctest::Approx(3.25));
  const ErrorStats one = quantiles({7});
  CHECK(one.min == 7);
  CHECK(one.max == 7);
  CHECK(one.median == 7);
  CHECK_THROWS_AS(quantiles({}), ArgumentError);
}

TEST_CASE("an overwhelming fixed lambda fails every trial") {
  ScenarioConfig c = base_config();
  c.trials = 2;
  c.lambda = {LambdaPolicy::Kind::fixed, 1e6};
  const ScenarioResult r = run_scenario(c, 1);
  for (const auto& rec : r.records) {
    CHECK(rec.rank == 0);
    CHECK(!rec.success);
    CHECK(!rec.freq_error);
  }
  CHECK(r.cells.front().p_succ == 0.0);
  CHECK(!r.cells.front().errors);
}

TEST_CASE("standard ANM runs on a short signal") {
  ScenarioConfig c = base_config();
  c.method = Method::standard_anm;
  c.poles.clear();
  c.length = 24;
  c.m = 2;
  c.layout = Layout::two_spaced;
  c.snr_db = {20.0};
  c.trials = 2;
  const ScenarioResult r = run_scenario(c, 1);
  for (const auto& rec : r.records) CHECK(rec.failure.empty());
}

TEST_CASE("success improves with SNR in band") {
  ScenarioConfig low = base_config();
  low.trials = 20;
  low.snr_db = {-3.0};
  ScenarioConfig high = low;
  high.snr_db = {6.0};
  CHECK(p_succ(high) >= p_succ(low) - 0.15);
}

TEST_CASE("multiple outputs beat a single output for close cisoids") {
  ScenarioConfig manm = base_config();
  manm.m = 2;
  manm.layout = Layout::two_close;
  manm.amplitude = 2.0;
  manm.snr_db = {-3.0};
  manm.trials = 20;
  ScenarioConfig sanm = manm;
  sanm.method = Method::sanm;
  CHECK(p_succ(manm) >= p_succ(sanm) - 0.1);
}

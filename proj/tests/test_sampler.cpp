#include <cmath>
#include <random>

#include "doctest.h"
#include "isingtrack/errors.hpp"
#include "isingtrack/sampler.hpp"
#include "support.hpp"

using namespace isingtrack;
using ising::IsingModel;
using ising::SpinState;

namespace {

sampler::SamplerConfig small_config(std::uint64_t seed = 1) {
  sampler::SamplerConfig c;
  c.n_chains = 4;
  c.n_temperatures = 2;
  c.warmup_iters = 200;
  c.samples_per_temp = 2000;
  c.steps_per_sample = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("annealing schedule examples") {
  const auto two = sampler::build_annealing_schedule(2);
  REQUIRE(two.betas.size() == 2);
  CHECK(two.betas[0] == doctest::Approx(1.9952623150));
  CHECK(two.betas[1] == doctest::Approx(63.0957344480));
  const auto twelve = sampler::build_annealing_schedule(12);
  CHECK(twelve.betas[1] == doctest::Approx(std::pow(10.0, 0.3 + 1.5 / 11)));
  CHECK(std::log10(twelve.betas[1]) == doctest::Approx(0.4364).epsilon(1e-3));
  for (std::size_t k = 1; k < twelve.betas.size(); ++k) CHECK(twelve.betas[k] > twelve.betas[k - 1]);
  CHECK_THROWS_AS(sampler::build_annealing_schedule(1), Error);
  CHECK_THROWS_AS(sampler::build_annealing_schedule(5, 1.0, 1.0), Error);
}

TEST_CASE("logistic is stable at extreme arguments") {
  CHECK(sampler::logistic(0.0) == 0.5);
  CHECK(sampler::logistic(1e4) == 1.0);
  CHECK(sampler::logistic(-1e4) == 0.0);
  CHECK(sampler::logistic(-800) >= 0.0);
  CHECK(std::isfinite(sampler::logistic(std::numeric_limits<double>::max())));
  CHECK(sampler::logistic(3.0) + sampler::logistic(-3.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conditional probability examples") {
  CHECK(sampler::conditional_prob(IsingModel({0}, {}), SpinState(1), 0, 2.0) == 0.5);
  CHECK(sampler::conditional_prob(IsingModel({1}, {}), SpinState(1), 0, 1e6) == 1.0);
  auto s = SpinState(2);
  s.set(1, true);
  CHECK(sampler::conditional_prob(IsingModel({1, 0}, {{0, 1, 1.0}}), s, 0, 0.5) == 0.5);
}

TEST_CASE("conditional ratio matches the Boltzmann factor") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    const auto model = testing::random_model(rng, n);
    const auto s = SpinState::from_bits(rng(), n);
    const std::size_t i = rng() % n;
    const double beta = testing::uniform(rng, 0.1, 5.0);
    auto on = s, off = s;
    on.set(i, true);
    off.set(i, false);
    const auto c = sampler::conditional_distribution(model, s, i, beta);
    const double want = std::exp(-beta * (ising::energy(model, on) - ising::energy(model, off)));
    CHECK(c.p_on / c.p_off == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("gibbs sweep at zero beta is a fair coin per node") {
  const auto model = IsingModel({5, -5, 1}, {{0, 1, 3.0}});
  const auto partition = ising::color_blocks(model);
  sampler::Rng rng(3);
  SpinState s(3);
  std::vector<int> ones(3, 0);
  const int sweeps = 20000;
  for (int k = 0; k < sweeps; ++k) {
    sampler::gibbs_sweep(model, s, partition, 0.0, rng);
    for (int i = 0; i < 3; ++i) ones[i] += s[i];
  }
  for (int i = 0; i < 3; ++i) CHECK(std::abs(ones[i] / double(sweeps) - 0.5) < 4 * 0.5 / std::sqrt(sweeps));
}

TEST_CASE("edgeless model with large biases converges in one sweep") {
  const IsingModel model(std::vector<double>(16, 50.0), {});
  const auto partition = ising::color_blocks(model);
  sampler::Rng rng(9);
  SpinState s(16);
  sampler::gibbs_sweep(model, s, partition, 10.0, rng);
  CHECK(s.count() == 16);
}

TEST_CASE("sweeps are reproducible given the seed") {
  std::mt19937_64 gen(4);
  const auto model = testing::random_model(gen, 12);
  const auto partition = ising::color_blocks(model);
  auto run = [&] {
    sampler::Rng rng(77, 3);
    SpinState s(12);
    for (int k = 0; k < 50; ++k) sampler::gibbs_sweep(model, s, partition, 2.0, rng);
    return s;
  };
  CHECK(run() == run());
}

TEST_CASE("single symmetric node has frequency one half") {
  auto cfg = small_config();
  const auto f = sampler::run_chains(IsingModel({0.0}, {}), sampler::build_annealing_schedule(2), cfg);
  const double se = 0.5 / std::sqrt(static_cast<double>(f.n_samples_total));
  CHECK(f.n_samples_total == 4 * 2 * 2000);
  CHECK(std::abs(f.freq[0] - 0.5) < 3 * se * 2);  // samples are thinned but not independent
}

TEST_CASE("strong antiferromagnetic pair never co-selects") {
  auto cfg = small_config(5);
  cfg.n_chains = 8;
  const IsingModel model({1.0, 1.0}, {{0, 1, 50.0}});
  const auto schedule = sampler::AnnealingSchedule{{20.0, 40.0}};
  const auto f = sampler::run_chains(model, schedule, cfg);
  CHECK(f.freq[0] + f.freq[1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(f.freq[0] == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("run_chains is bit-identical across thread counts and repeated runs") {
  std::mt19937_64 gen(10);
  const auto model = testing::random_model(gen, 14);
  const auto schedule = sampler::build_annealing_schedule(4);
  auto cfg = small_config(123);
  cfg.samples_per_temp = 100;
  cfg.max_threads = 1;
  const auto a = sampler::run_chains(model, schedule, cfg);
  cfg.max_threads = 4;
  const auto b = sampler::run_chains(model, schedule, cfg);
  CHECK(a.freq == b.freq);
  CHECK(a.freq_per_beta == b.freq_per_beta);
  CHECK(a.mean_energy_per_beta == b.mean_energy_per_beta);
  CHECK(a.max_rhat == b.max_rhat);
  cfg.seed = 124;
  CHECK(sampler::run_chains(model, schedule, cfg).freq != a.freq);
}

TEST_CASE("frequencies are monotone in the bias on an edgeless model") {
  std::vector<double> ladder;
  for (int i = 0; i < 8; ++i) ladder.push_back(-1.0 + 0.3 * i);
  auto cfg = small_config(2);
  cfg.samples_per_temp = 5000;
  const auto f = sampler::run_chains(IsingModel(ladder, {}), sampler::AnnealingSchedule{{1.0, 2.0}}, cfg);
  for (std::size_t i = 1; i < ladder.size(); ++i) CHECK(f.freq[i] >= f.freq[i - 1]);
  for (double x : f.freq) CHECK((x >= 0.0 && x <= 1.0));
}

TEST_CASE("per-beta diagnostics are consistent with the pooled frequency") {
  std::mt19937_64 gen(12);
  const auto model = testing::random_model(gen, 8);
  const auto schedule = sampler::build_annealing_schedule(3);
  const auto f = sampler::run_chains(model, schedule, small_config(4));
  REQUIRE(f.freq_per_beta.size() == 3);
  REQUIRE(f.mean_energy_per_beta.size() == 3);
  for (std::size_t i = 0; i < 8; ++i) {
    const double pooled = (f.freq_per_beta[0][i] + f.freq_per_beta[1][i] + f.freq_per_beta[2][i]) / 3.0;
    CHECK(f.freq[i] == doctest::Approx(pooled).epsilon(1e-12));
  }
  CHECK(f.betas == schedule.betas);
  CHECK(f.max_rhat >= 1.0);
}

TEST_CASE("independent chain halves agree") {
  std::mt19937_64 gen(13);
  const auto model = testing::random_model(gen, 10, 0.3, 0, 1, 0.5);
  const auto schedule = sampler::AnnealingSchedule{{1.0}};
  auto cfg = small_config(0);
  cfg.n_chains = 4;
  cfg.samples_per_temp = 20000;
  const auto a = sampler::run_chains(model, schedule, cfg);
  cfg.seed = 1000;
  const auto b = sampler::run_chains(model, schedule, cfg);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(a.freq[i] - b.freq[i]) < 0.02);
  CHECK(a.max_rhat < sampler::kRhatWarnThreshold);
  CHECK(a.warnings.empty());
}

TEST_CASE("aggregate frequencies examples") {
  CHECK_THROWS_AS(sampler::aggregate_frequencies({}), Error);
  std::vector<SpinState> two{SpinState::from_bits(0b01, 2), SpinState::from_bits(0b11, 2)};
  const auto f = sampler::aggregate_frequencies(two);
  CHECK(f.freq == std::vector<double>{1.0, 0.5});
  CHECK(f.n_samples_total == 2);
  std::vector<SpinState> same(3, SpinState::from_bits(0b101, 3));
  CHECK(sampler::aggregate_frequencies(same).freq == std::vector<double>{1, 0, 1});
  std::vector<SpinState> four{SpinState::from_bits(0b001, 3), SpinState::from_bits(0b011, 3),
                              SpinState::from_bits(0b111, 3), SpinState::from_bits(0b100, 3)};
  CHECK(sampler::aggregate_frequencies(four).freq == std::vector<double>{0.75, 0.5, 0.5});
}

TEST_CASE("sampler config validation") {
  sampler::SamplerConfig c;
  c.n_chains = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS((sampler::AnnealingSchedule{{2.0, 1.0}}.validate()), Error);
  CHECK_THROWS_AS((sampler::AnnealingSchedule{{0.0, 1.0}}.validate()), Error);
}

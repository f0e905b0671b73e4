#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "isingtrack/ising.hpp"

namespace isingtrack::sampler {

/// Ascending inverse temperatures.
struct AnnealingSchedule {
  std::vector<double> betas;

  /// Throws Config unless strictly increasing and positive.
  void validate() const;
};

enum class Blocking { Coloring, EvenOdd };

struct SamplerConfig {
  std::size_t n_chains = 8;
  std::size_t n_temperatures = 13;
  std::size_t warmup_iters = 2500;  // full sweeps before recording at each beta
  std::size_t samples_per_temp = 1000;
  std::size_t steps_per_sample = 45;  // sweeps between recorded samples
  std::uint64_t seed = 0;
  Blocking blocking = Blocking::Coloring;
  std::size_t max_threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct SelectionFrequencies {
  std::vector<double> freq;
  std::uint64_t n_samples_total = 0;
  // Diagnostics, one entry per beta of the schedule.
  std::vector<double> betas;
  std::vector<double> mean_energy_per_beta;
  std::vector<std::vector<double>> freq_per_beta;  // [beta][node]
  // Largest per-node potential scale reduction across chains (1.0 when not computable).
  double max_rhat = 1.0;
  std::vector<std::string> warnings;
};

inline constexpr double kRhatWarnThreshold = 1.1;

/// beta_k = 10^(lo + k (hi - lo) / (n - 1)).
AnnealingSchedule build_annealing_schedule(std::size_t n_temps, double log10_beta_min = 0.3,
                                           double log10_beta_max = 1.8);

/// 64-bit Mersenne Twister stream; streams for different (seed, stream) pairs
/// are seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Numerically stable 1 / (1 + e^-x).
double logistic(double x);

struct SpinConditional {
  double p_on;   // P(s_i = 1 | rest)
  double p_off;  // P(s_i = 0 | rest), computed without cancellation
};

/// Exact single-site conditional of exp(-beta E(s)):
/// P(s_i = 1 | rest) = logistic(beta * local_field).
SpinConditional conditional_distribution(const ising::IsingModel& model, const ising::SpinState& state,
                                         std::size_t i, double beta);
double conditional_prob(const ising::IsingModel& model, const ising::SpinState& state, std::size_t i,
                        double beta);

/// One sweep: blocks in order, each block's nodes resampled together from
/// fields evaluated on the state at the start of that block.
void gibbs_sweep(const ising::IsingModel& model, ising::SpinState& state,
                 const ising::BlockPartition& partition, double beta, Rng& rng);

ising::BlockPartition make_partition(const ising::IsingModel& model, Blocking blocking);

/// Annealed multi-chain sampling. Chains start from i.i.d. Bernoulli(0.5)
/// spins and carry their state across the ascending betas; every recorded
/// sample of every chain and temperature has equal weight in `freq`.
/// Results are bit-identical for a given seed regardless of thread count.
SelectionFrequencies run_chains(const ising::IsingModel& model, const AnnealingSchedule& schedule,
                                const SamplerConfig& config);

/// Per-node mean of the samples. Throws NoSamples when empty.
SelectionFrequencies aggregate_frequencies(std::span<const ising::SpinState> samples);

}  // namespace isingtrack::sampler

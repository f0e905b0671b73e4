#include "isingtrack/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::sampler {

void AnnealingSchedule::validate() const {
  if (betas.empty()) fail(ErrorCode::Config, "annealing schedule is empty");
  for (std::size_t k = 0; k < betas.size(); ++k) {
    if (!(betas[k] > 0.0) || !std::isfinite(betas[k]))
      fail(ErrorCode::Config, "annealing betas must be positive and finite");
    if (k > 0 && !(betas[k] > betas[k - 1]))
      fail(ErrorCode::Config, "annealing betas must be strictly increasing");
  }
}

void SamplerConfig::validate() const {
  if (n_chains < 1 || n_temperatures < 1 || warmup_iters < 1 || samples_per_temp < 1 ||
      steps_per_sample < 1)
    fail(ErrorCode::Config, "sampler counts must all be >= 1");
}

AnnealingSchedule build_annealing_schedule(std::size_t n_temps, double log10_beta_min,
                                           double log10_beta_max) {
  if (n_temps < 2) fail(ErrorCode::Config, "annealing schedule needs at least 2 temperatures");
  if (!(log10_beta_max > log10_beta_min))
    fail(ErrorCode::Config, "annealing schedule needs log10_beta_max > log10_beta_min");
  AnnealingSchedule schedule;
  const double step = (log10_beta_max - log10_beta_min) / static_cast<double>(n_temps - 1);
  for (std::size_t k = 0; k < n_temps; ++k)
    schedule.betas.push_back(std::pow(10.0, log10_beta_min + static_cast<double>(k) * step));
  return schedule;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull))) {}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

SpinConditional conditional_distribution(const ising::IsingModel& model, const ising::SpinState& state,
                                         std::size_t i, double beta) {
  if (!(beta >= 0.0)) fail(ErrorCode::Domain, "inverse temperature must be non-negative");
  const double x = beta * ising::local_field(model, state, i);
  return {logistic(x), logistic(-x)};
}

double conditional_prob(const ising::IsingModel& model, const ising::SpinState& state, std::size_t i,
                        double beta) {
  return conditional_distribution(model, state, i, beta).p_on;
}

namespace {

struct SweepScratch {
  std::vector<double> fields;
};

void sweep_impl(const ising::IsingModel& model, ising::SpinState& state,
                const ising::BlockPartition& partition, double beta, Rng& rng, SweepScratch& scratch,
                const simd::KernelTable& k) {
  const auto biases = model.biases();
  const std::size_t n = model.size();
  for (const auto& block : partition.blocks) {
    scratch.fields.resize(block.size());
    const double* spins = state.values().data();
    for (std::size_t b = 0; b < block.size(); ++b) {
      const std::size_t i = block[b];
      scratch.fields[b] = biases[i] - k.dot(model.coupling_row(i).data(), spins, n);
    }
    for (std::size_t b = 0; b < block.size(); ++b)
      state.set(block[b], rng.uniform() < logistic(beta * scratch.fields[b]));
  }
}

struct ChainTally {
  std::vector<std::uint64_t> counts;                  // [node]
  std::vector<std::vector<std::uint64_t>> per_beta;   // [beta][node]
  std::vector<double> energy_sum;                     // [beta]
};

ChainTally run_one_chain(const ising::IsingModel& model, const AnnealingSchedule& schedule,
                         const SamplerConfig& config, const ising::BlockPartition& partition,
                         std::uint64_t chain) {
  const std::size_t n = model.size();
  const simd::KernelTable& k = simd::active();
  Rng rng(config.seed, chain);
  ising::SpinState state(n);
  for (std::size_t i = 0; i < n; ++i) state.set(i, rng.uniform() < 0.5);

  ChainTally tally;
  tally.counts.assign(n, 0);
  tally.per_beta.assign(schedule.betas.size(), std::vector<std::uint64_t>(n, 0));
  tally.energy_sum.assign(schedule.betas.size(), 0.0);
  SweepScratch scratch;

  for (std::size_t t = 0; t < schedule.betas.size(); ++t) {
    const double beta = schedule.betas[t];
    for (std::size_t w = 0; w < config.warmup_iters; ++w)
      sweep_impl(model, state, partition, beta, rng, scratch, k);
    for (std::size_t s = 0; s < config.samples_per_temp; ++s) {
      for (std::size_t step = 0; step < config.steps_per_sample; ++step)
        sweep_impl(model, state, partition, beta, rng, scratch, k);
      for (std::size_t i = 0; i < n; ++i)
        if (state[i]) {
          ++tally.counts[i];
          ++tally.per_beta[t][i];
        }
      tally.energy_sum[t] += ising::energy(model, state);
    }
  }
  return tally;
}

// Gelman-Rubin potential scale reduction per node on the chains' binary traces.
double max_rhat(const std::vector<ChainTally>& chains, std::uint64_t samples_per_chain, std::size_t n) {
  const std::size_t m = chains.size();
  if (m < 2 || samples_per_chain < 2) return 1.0;
  const double len = static_cast<double>(samples_per_chain);
  double worst = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mean_of_means = 0.0, within = 0.0;
    std::vector<double> means(m);
    for (std::size_t c = 0; c < m; ++c) {
      means[c] = static_cast<double>(chains[c].counts[i]) / len;
      mean_of_means += means[c];
      within += means[c] * (1.0 - means[c]) * len / (len - 1.0);
    }
    mean_of_means /= static_cast<double>(m);
    within /= static_cast<double>(m);
    double between = 0.0;
    for (double mu : means) between += (mu - mean_of_means) * (mu - mean_of_means);
    between *= len / static_cast<double>(m - 1);
    if (!(within > 0.0)) continue;
    const double pooled = (len - 1.0) / len * within + between / len;
    worst = std::max(worst, std::sqrt(pooled / within));
  }
  return worst;
}

}  // namespace

void gibbs_sweep(const ising::IsingModel& model, ising::SpinState& state,
                 const ising::BlockPartition& partition, double beta, Rng& rng) {
  if (state.size() != model.size()) fail(ErrorCode::Dimension, "state length differs from model");
  SweepScratch scratch;
  sweep_impl(model, state, partition, beta, rng, scratch, simd::active());
}

ising::BlockPartition make_partition(const ising::IsingModel& model, Blocking blocking) {
  return blocking == Blocking::EvenOdd ? ising::even_odd_blocks(model.size()) : ising::color_blocks(model);
}

SelectionFrequencies run_chains(const ising::IsingModel& model, const AnnealingSchedule& schedule,
                                const SamplerConfig& config) {
  schedule.validate();
  config.validate();
  const std::size_t n = model.size();
  const auto partition = make_partition(model, config.blocking);

  std::vector<ChainTally> tallies(config.n_chains);
  std::size_t workers = config.max_threads ? config.max_threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, config.n_chains);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < config.n_chains; c = next++)
      tallies[c] = run_one_chain(model, schedule, config, partition, c);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  const std::size_t temps = schedule.betas.size();
  const std::uint64_t per_beta_total = static_cast<std::uint64_t>(config.samples_per_temp) * config.n_chains;
  SelectionFrequencies out;
  out.n_samples_total = per_beta_total * temps;
  out.betas = schedule.betas;
  out.freq.assign(n, 0.0);
  out.freq_per_beta.assign(temps, std::vector<double>(n, 0.0));
  out.mean_energy_per_beta.assign(temps, 0.0);

  // Fixed chain order keeps the floating-point reduction reproducible.
  std::vector<std::uint64_t> counts(n, 0);
  for (const auto& tally : tallies) {
    for (std::size_t i = 0; i < n; ++i) counts[i] += tally.counts[i];
    for (std::size_t t = 0; t < temps; ++t) {
      out.mean_energy_per_beta[t] += tally.energy_sum[t];
      for (std::size_t i = 0; i < n; ++i) out.freq_per_beta[t][i] += static_cast<double>(tally.per_beta[t][i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    out.freq[i] = static_cast<double>(counts[i]) / static_cast<double>(out.n_samples_total);
  for (std::size_t t = 0; t < temps; ++t) {
    out.mean_energy_per_beta[t] /= static_cast<double>(per_beta_total);
    for (double& f : out.freq_per_beta[t]) f /= static_cast<double>(per_beta_total);
  }

  out.max_rhat = max_rhat(tallies, static_cast<std::uint64_t>(config.samples_per_temp) * temps, n);
  if (out.max_rhat > kRhatWarnThreshold) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "chains disagree: max R-hat %.4f exceeds %.2f", out.max_rhat,
                  kRhatWarnThreshold);
    out.warnings.emplace_back(msg);
  }
  return out;
}

SelectionFrequencies aggregate_frequencies(std::span<const ising::SpinState> samples) {
  if (samples.empty()) fail(ErrorCode::NoSamples, "no samples to aggregate");
  const std::size_t n = samples.front().size();
  std::vector<std::uint64_t> counts(n, 0);
  for (const auto& s : samples) {
    if (s.size() != n) fail(ErrorCode::Dimension, "samples differ in length");
    for (std::size_t i = 0; i < n; ++i) counts[i] += s[i] ? 1 : 0;
  }
  SelectionFrequencies out;
  out.n_samples_total = samples.size();
  out.freq.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.freq[i] = static_cast<double>(counts[i]) / static_cast<double>(samples.size());
  return out;
}

}  // namespace isingtrack::sampler

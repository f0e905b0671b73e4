#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isingtrack/factors.hpp"

namespace isingtrack::ising {

using factors::Edge;

struct Neighbor {
  std::size_t node;
  double weight;
};

/// Biases and pairwise couplings of E(s) = -sum_i m_i s_i + sum_{i<j} J_ij s_i s_j
/// over s in {0,1}^n. Immutable once built.
///
/// Besides the edge list and adjacency, the model keeps a dense zero-diagonal
/// coupling matrix so that local fields reduce to one dot product per node.
class IsingModel {
 public:
  IsingModel() = default;
  /// Edges may be given in either orientation; self-edges, out-of-range
  /// endpoints and repeated pairs are rejected.
  IsingModel(std::vector<double> biases, std::vector<Edge> edges);

  std::size_t size() const { return biases_.size(); }
  std::span<const double> biases() const { return biases_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }
  std::span<const double> coupling_row(std::size_t i) const {
    return {dense_.data() + i * size(), size()};
  }

 private:
  std::vector<double> biases_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> dense_;
};

/// Binary selection vector. Spins are stored as 0.0 / 1.0 so that they feed
/// the dot-product kernels directly.
class SpinState {
 public:
  SpinState() = default;
  explicit SpinState(std::size_t n) : spins_(n, 0.0) {}
  /// Throws Domain if any entry is not 0 or 1.
  explicit SpinState(std::span<const int> bits);

  std::size_t size() const { return spins_.size(); }
  bool operator[](std::size_t i) const { return spins_[i] != 0.0; }
  void set(std::size_t i, bool on) { spins_[i] = on ? 1.0 : 0.0; }
  std::span<const double> values() const { return spins_; }
  std::size_t count() const;
  /// Bit i of the result is spin i (n <= 64).
  std::uint64_t to_bits() const;
  static SpinState from_bits(std::uint64_t bits, std::size_t n);

  bool operator==(const SpinState&) const = default;

 private:
  std::vector<double> spins_;
};

struct BlockPartition {
  std::vector<std::vector<std::size_t>> blocks;

  /// Disjoint blocks covering 0..n-1.
  bool covers(std::size_t n) const;
  /// No edge joins two nodes of the same block.
  bool is_independent(const IsingModel& model) const;
};

/// Throws Dimension if the state length differs from the model.
double energy(const IsingModel& model, const SpinState& state);

/// m_i - sum_j J_ij s_j, which equals E(s | s_i = 0) - E(s | s_i = 1).
double local_field(const IsingModel& model, const SpinState& state, std::size_t i);

/// Greedy colouring: nodes by descending degree (ties by index), each taking
/// the smallest colour unused by its coloured neighbours. One block per colour,
/// nodes ascending within a block.
BlockPartition color_blocks(const IsingModel& model);

/// Even indices then odd indices. Not an independent-set partition in general.
BlockPartition even_odd_blocks(std::size_t n);

}  // namespace isingtrack::ising

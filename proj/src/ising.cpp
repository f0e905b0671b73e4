#include "isingtrack/ising.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::ising {

IsingModel::IsingModel(std::vector<double> biases, std::vector<Edge> edges)
    : biases_(std::move(biases)), adjacency_(biases_.size()), dense_(biases_.size() * biases_.size(), 0.0) {
  const std::size_t n = size();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.i >= n || e.j >= n)
      fail(ErrorCode::Dimension, "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                     ") outside a model of " + std::to_string(n) + " nodes");
    if (e.i == e.j) fail(ErrorCode::Domain, "self-edge on node " + std::to_string(e.i));
    if (e.i > e.j) std::swap(e.i, e.j);
    if (!seen.emplace(e.i, e.j).second)
      fail(ErrorCode::Domain, "repeated edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
    edges_.push_back(e);
    adjacency_[e.i].push_back({e.j, e.weight});
    adjacency_[e.j].push_back({e.i, e.weight});
    dense_[e.i * n + e.j] = e.weight;
    dense_[e.j * n + e.i] = e.weight;
  }
  for (auto& list : adjacency_)
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
}

SpinState::SpinState(std::span<const int> bits) : spins_(bits.size()) {
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) fail(ErrorCode::Domain, "spin values must be 0 or 1");
    spins_[i] = bits[i];
  }
}

std::size_t SpinState::count() const {
  return static_cast<std::size_t>(std::count(spins_.begin(), spins_.end(), 1.0));
}

std::uint64_t SpinState::to_bits() const {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < spins_.size() && i < 64; ++i)
    if (spins_[i] != 0.0) bits |= std::uint64_t{1} << i;
  return bits;
}

SpinState SpinState::from_bits(std::uint64_t bits, std::size_t n) {
  SpinState state(n);
  for (std::size_t i = 0; i < n && i < 64; ++i) state.set(i, (bits >> i) & 1u);
  return state;
}

bool BlockPartition::covers(std::size_t n) const {
  std::vector<int> hits(n, 0);
  for (const auto& block : blocks)
    for (std::size_t node : block) {
      if (node >= n) return false;
      ++hits[node];
    }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

bool BlockPartition::is_independent(const IsingModel& model) const {
  std::vector<std::size_t> block_of(model.size(), blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t node : blocks[b]) block_of[node] = b;
  for (const auto& e : model.edges())
    if (block_of[e.i] == block_of[e.j]) return false;
  return true;
}

double energy(const IsingModel& model, const SpinState& state) {
  if (state.size() != model.size())
    fail(ErrorCode::Dimension, "state has " + std::to_string(state.size()) + " spins, model has " +
                                   std::to_string(model.size()));
  double e = -simd::dot(model.biases(), state.values());
  for (const auto& edge : model.edges())
    if (state[edge.i] && state[edge.j]) e += edge.weight;
  return e;
}

double local_field(const IsingModel& model, const SpinState& state, std::size_t i) {
  return model.biases()[i] - simd::dot(model.coupling_row(i), state.values());
}

BlockPartition color_blocks(const IsingModel& model) {
  const std::size_t n = model.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.degree(a) > model.degree(b); });

  constexpr std::size_t kUncolored = static_cast<std::size_t>(-1);
  std::vector<std::size_t> color(n, kUncolored);
  std::size_t num_colors = 0;
  std::vector<char> used;
  for (std::size_t node : order) {
    used.assign(num_colors + 1, 0);
    for (const auto& nb : model.neighbors(node))
      if (color[nb.node] != kUncolored) used[color[nb.node]] = 1;
    std::size_t c = 0;
    while (used[c]) ++c;
    color[node] = c;
    num_colors = std::max(num_colors, c + 1);
  }

  BlockPartition partition;
  partition.blocks.resize(num_colors);
  for (std::size_t node = 0; node < n; ++node) partition.blocks[color[node]].push_back(node);
  return partition;
}

BlockPartition even_odd_blocks(std::size_t n) {
  BlockPartition partition;
  for (std::size_t parity = 0; parity < 2; ++parity) {
    std::vector<std::size_t> block;
    for (std::size_t i = parity; i < n; i += 2) block.push_back(i);
    if (!block.empty()) partition.blocks.push_back(std::move(block));
  }
  return partition;
}

}  // namespace isingtrack::ising

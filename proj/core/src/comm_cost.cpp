#include "dada/comm_cost.hpp"

#include <cmath>
#include <stdexcept>

namespace dada {

unsigned index_bits(std::size_t n) {
  if (n == 0) throw std::invalid_argument("index_bits: n must be >= 1");
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

Bits model_step_cost(int float_bits, std::size_t n, std::size_t neighbor_count) {
  return static_cast<Bits>(float_bits + static_cast<int>(index_bits(n))) * neighbor_count;
}

double expected_model_phase_bits(std::size_t steps, std::size_t edges, std::size_t num_users,
                                 int float_bits, std::size_t n) {
  return 2.0 * static_cast<double>(steps) * static_cast<double>(edges) *
         static_cast<double>(float_bits + static_cast<int>(index_bits(n))) /
         static_cast<double>(num_users);
}

Bits graph_peer_cost(int float_bits, std::size_t n, std::size_t peer_nnz, bool cached) {
  const Bits z = static_cast<Bits>(float_bits);
  if (cached) return 2 * z;
  return 3 * z + model_sync_cost(float_bits, n, peer_nnz);
}

Bits graph_step_cost(int float_bits, std::size_t n, std::span<const std::size_t> peer_nnz,
                     std::span<const bool> cached) {
  if (!cached.empty() && cached.size() != peer_nnz.size()) {
    throw std::invalid_argument("graph_step_cost: one cache flag per peer expected");
  }
  Bits total = 0;
  for (std::size_t i = 0; i < peer_nnz.size(); ++i) {
    total += graph_peer_cost(float_bits, n, peer_nnz[i], !cached.empty() && cached[i]);
  }
  return total;
}

Bits model_sync_cost(int float_bits, std::size_t n, std::size_t nnz) {
  return static_cast<Bits>(float_bits + static_cast<int>(index_bits(n))) * nnz;
}

MemoryFootprint memory_footprint(std::size_t num_users, std::size_t edges, std::size_t n,
                                 int float_bits, std::span<const std::size_t> update_counts) {
  MemoryFootprint out;
  const Bits z = static_cast<Bits>(float_bits);
  out.dense_bits = z * (static_cast<Bits>(num_users) * n + 2 * static_cast<Bits>(edges) * (n + 1));
  for (std::size_t t : update_counts) out.sparse_bits += model_sync_cost(float_bits, n, t);
  return out;
}

Bits broadcast_all_weights_bits(std::size_t num_users, int float_bits) {
  const Bits k = num_users;
  return static_cast<Bits>(float_bits) * k * k * (k == 0 ? 0 : k - 1) / 2;
}

double expected_fresh_peers(std::size_t kappa, std::size_t num_users, std::size_t round) {
  if (round == 0) throw std::invalid_argument("expected_fresh_peers: rounds start at 1");
  const double pairs = static_cast<double>(num_users) * static_cast<double>(num_users - 1);
  return static_cast<double>(kappa) *
         std::pow(1.0 - static_cast<double>(kappa) / pairs, static_cast<double>(round - 1));
}

}  // namespace dada

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace dada {

using Bits = std::uint64_t;

/// ceil(log2 n): bits needed to address one of n base predictors.
unsigned index_bits(std::size_t n);

/// (Z + ceil log2 n) * |N_k|: one (index, value) message to every neighbour.
Bits model_step_cost(int float_bits, std::size_t n, std::size_t neighbor_count);

/// Expected model-phase traffic after `steps` uniform activations on a graph
/// with `edges` edges: 2 T M (Z + ceil log2 n) / K.
double expected_model_phase_bits(std::size_t steps, std::size_t edges, std::size_t num_users,
                                 int float_bits, std::size_t n);

/// Bits exchanged with one contacted peer during a graph step. A fresh peer
/// sends its loss, degree and sparse model and receives the new weight
/// (3Z + nnz (Z + ceil log2 n)); a cached peer whose model is unchanged only
/// sends its degree and receives the weight (2Z).
Bits graph_peer_cost(int float_bits, std::size_t n, std::size_t peer_nnz, bool cached);

/// Sum of graph_peer_cost over the sampled peers. `cached` may be empty
/// (no caching) or hold one flag per peer.
Bits graph_step_cost(int float_bits, std::size_t n, std::span<const std::size_t> peer_nnz,
                     std::span<const bool> cached = {});

/// nnz (Z + ceil log2 n): a full sparse model sent over a newly created edge.
Bits model_sync_cost(int float_bits, std::size_t n, std::size_t nnz);

struct MemoryFootprint {
  Bits dense_bits = 0;   ///< Z (K n + 2 M (n + 1))
  Bits sparse_bits = 0;  ///< sum_k t_k (Z + ceil log2 n)
};

MemoryFootprint memory_footprint(std::size_t num_users, std::size_t edges, std::size_t n,
                                 int float_bits, std::span<const std::size_t> update_counts = {});

/// Z K^2 (K - 1) / 2: every user receiving every weight once.
Bits broadcast_all_weights_bits(std::size_t num_users, int float_bits);

/// kappa (1 - kappa / (K (K - 1)))^(T - 1): expected fresh peers at round T
/// when peer state is cached.
double expected_fresh_peers(std::size_t kappa, std::size_t num_users, std::size_t round);

}  // namespace dada

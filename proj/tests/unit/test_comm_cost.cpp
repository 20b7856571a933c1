#include <doctest.h>

#include <array>
#include <vector>

#include "dada/comm_cost.hpp"

using namespace dada;

TEST_CASE("index bits is ceil log2") {
  CHECK(index_bits(1) == 0);
  CHECK(index_bits(2) == 1);
  CHECK(index_bits(3) == 2);
  CHECK(index_bits(200) == 8);
  CHECK(index_bits(256) == 8);
  CHECK(index_bits(257) == 9);
  CHECK_THROWS(index_bits(0));
}

TEST_CASE("per-message costs") {
  CHECK(model_step_cost(32, 200, 7) == 40 * 7);
  CHECK(model_step_cost(32, 200, 0) == 0);
  CHECK(model_sync_cost(32, 200, 5) == 200);
  CHECK(graph_peer_cost(32, 200, 5, false) == 96 + 200);
  CHECK(graph_peer_cost(32, 200, 5, true) == 64);
  const std::vector<std::size_t> nnz{1, 2, 3};
  const std::array<bool, 3> cached{false, true, false};
  CHECK(graph_step_cost(32, 200, nnz) == 3 * 96 + 6 * 40);
  CHECK(graph_step_cost(32, 200, nnz, cached) == 96 + 40 + 64 + 96 + 120);
  const std::array<bool, 1> short_flags{true};
  CHECK_THROWS(graph_step_cost(32, 200, nnz, short_flags));
}

TEST_CASE("expected model phase traffic") {
  CHECK(expected_model_phase_bits(100, 50, 10, 32, 200) == doctest::Approx(2.0 * 100 * 50 * 40 / 10.0));
}

TEST_CASE("all-weights broadcast at K=100") {
  CHECK(broadcast_all_weights_bits(100, 32) == 15840000u);
  CHECK(broadcast_all_weights_bits(2, 32) == 64u);
  CHECK(broadcast_all_weights_bits(0, 32) == 0u);
}

TEST_CASE("memory footprint") {
  const std::vector<std::size_t> updates{3, 0, 5};
  const MemoryFootprint m = memory_footprint(3, 2, 200, 32, updates);
  CHECK(m.dense_bits == 32u * (3 * 200 + 2 * 2 * 201));
  CHECK(m.sparse_bits == 8u * 40);
}

TEST_CASE("expected fresh peers decays geometrically") {
  CHECK(expected_fresh_peers(5, 100, 1) == 5.0);
  CHECK(expected_fresh_peers(5, 100, 3) == doctest::Approx(5.0 * (1 - 5.0 / 9900) * (1 - 5.0 / 9900)));
  CHECK_THROWS(expected_fresh_peers(5, 100, 0));
}

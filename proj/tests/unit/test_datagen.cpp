#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "dada/datagen.hpp"

using namespace dada;

TEST_CASE("moons preset shapes") {
  MoonsConfig cfg = MoonsConfig::standard();
  cfg.seed = 3;
  const MoonsData md = generate_moons(cfg);
  REQUIRE(md.dataset.num_users() == 100);
  CHECK(md.dataset.feature_dim == 20);
  md.dataset.validate();
  std::size_t largest = 0;
  for (const UserData& u : md.dataset.users) {
    CHECK(u.num_train() >= 3);
    CHECK(u.num_train() <= 15);
    CHECK(u.num_test() == 100);
    largest = std::max(largest, u.num_train());
  }
  for (const UserData& u : md.dataset.users) {
    CHECK(u.confidence == doctest::Approx(double(u.num_train()) / double(largest)));
  }
  // Users are laid out cluster by cluster; angles stay near their centre.
  CHECK(std::abs(md.angles_deg[0] - 45.0) < 30.0);
  CHECK(std::abs(md.angles_deg[99] - 315.0) < 30.0);
  CHECK(md.feature_ranges.size() == 20);
}

TEST_CASE("moons generation is deterministic in the seed") {
  MoonsConfig cfg;
  cfg.seed = 11;
  const MoonsData a = generate_moons(cfg);
  const MoonsData b = generate_moons(cfg);
  CHECK(a.dataset == b.dataset);
  cfg.seed = 12;
  const MoonsData c = generate_moons(cfg);
  CHECK_FALSE(a.dataset == c.dataset);
}

TEST_CASE("moons labels flip per user") {
  MoonsConfig cfg;
  cfg.num_users = 4;
  cfg.cluster_sizes = {4};
  cfg.cluster_angles_deg = {0.0};
  cfg.m_train_lo = cfg.m_train_hi = 40;
  cfg.moon_noise_std = 0.0;
  cfg.label_flip_frac = 0.0;
  const MoonsData clean = generate_moons(cfg);
  cfg.label_flip_frac = 0.1;
  const MoonsData noisy = generate_moons(cfg);
  for (std::size_t k = 0; k < 4; ++k) {
    std::size_t diff = 0;
    for (std::size_t i = 0; i < 40; ++i) {
      diff += clean.dataset.users[k].train_y[i] != noisy.dataset.users[k].train_y[i];
    }
    CHECK(diff == 4);
    CHECK(clean.dataset.users[k].test_y == noisy.dataset.users[k].test_y);
  }
}

TEST_CASE("moons100 draws individual angles") {
  MoonsConfig cfg = MoonsConfig::per_user_angles();
  cfg.seed = 5;
  const MoonsData md = generate_moons(cfg);
  CHECK(md.dataset.num_users() == 100);
  for (const UserData& u : md.dataset.users) CHECK(u.num_train() <= 20);
}

TEST_CASE("moons config validation") {
  MoonsConfig cfg;
  cfg.cluster_sizes = {10, 20};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.m_train_lo = 0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.dim = 1;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("oracle graph weights follow angle differences") {
  const std::vector<double> angles{0.0, 10.0, 180.0};
  const CollaborationGraph g = oracle_graph(angles, 0.1, 1e-4);
  const double expected = std::exp((std::cos(10.0 * M_PI / 180.0) - 1.0) / 0.1);
  CHECK(g.weight(0, 1) == doctest::Approx(expected));
  // cos(180) - 1 = -2 gives exp(-20) < 1e-4, dropped.
  CHECK(g.weight(0, 2) == 0.0);
  CHECK(g.edge_count() == 1);
  CHECK_THROWS(oracle_graph(angles, 0.0, 1e-4));
}

TEST_CASE("stumps use interior points of a uniform partition") {
  const std::vector<FeatureRange> ranges{{0.0, 1.0}, {-2.0, 2.0}};
  const StumpEnsemble s = build_stumps(ranges, 3);
  REQUIRE(s.size() == 6);
  CHECK(s.stumps[0].threshold == doctest::Approx(0.25));
  CHECK(s.stumps[2].threshold == doctest::Approx(0.75));
  CHECK(s.stumps[3].feature == 1);
  CHECK(s.stumps[4].threshold == doctest::Approx(0.0));
  for (const Stump& st : s.stumps) CHECK(st.polarity == 1);
  CHECK(build_stumps_total(ranges, 6) == s);
  CHECK_THROWS(build_stumps_total(ranges, 7));
  const std::vector<FeatureRange> flat{{1.0, 1.0}};
  CHECK_THROWS(build_stumps(flat, 2));
}

TEST_CASE("margin matrix is y times stump output") {
  UserData u;
  u.train_x.append_row(std::vector<double>{0.2, 0.9});
  u.train_x.append_row(std::vector<double>{0.8, 0.1});
  u.train_y = {1, -1};
  StumpEnsemble s;
  s.stumps = {{0, 0.5, 1}, {1, 0.5, -1}};
  const MarginMatrix a = margin_matrix(u, s);
  CHECK(a(0, 0) == -1.0);
  CHECK(a(0, 1) == -1.0);
  CHECK(a(1, 0) == -1.0);
  CHECK(a(1, 1) == -1.0);
  const Matrix h = stump_outputs(u.train_x, s);
  CHECK(h(1, 0) == 1.0);
  CHECK(h(1, 1) == 1.0);
}

TEST_CASE("training ranges widen constant features") {
  PartitionedDataset ds;
  ds.feature_dim = 2;
  UserData u;
  u.train_x.append_row(std::vector<double>{1.0, 3.0});
  u.train_x.append_row(std::vector<double>{2.0, 3.0});
  u.train_y = {1, 1};
  ds.users.push_back(u);
  const auto r = training_feature_ranges(ds);
  CHECK(r[0] == FeatureRange{1.0, 2.0});
  CHECK(r[1] == FeatureRange{2.5, 3.5});
}

TEST_CASE("csv round trip is exact") {
  MoonsConfig cfg;
  cfg.seed = 9;
  cfg.num_users = 6;
  cfg.cluster_sizes = {3, 3};
  cfg.cluster_angles_deg = {0.0, 90.0};
  cfg.m_test = 3;
  const MoonsData md = generate_moons(cfg);
  PartitionedDataset expected = md.dataset;
  for (UserData& u : expected.users) u.angle_deg.reset();
  const PartitionedDataset back = parse_csv(to_csv(md.dataset));
  CHECK(back == expected);

  const auto path = std::filesystem::temp_directory_path() / "dada_test_roundtrip.csv";
  write_csv(md.dataset, path);
  CHECK(load_csv(path) == expected);
  std::filesystem::remove(path);
}

TEST_CASE("csv keeps first-appearance user order") {
  const PartitionedDataset ds = parse_csv(
      "user_id,split,y,f0\n"
      "bob,train,1,0.5\n"
      "alice,train,-1,1.5\n"
      "bob,test,-1,2\n"
      "bob,train,1,+3\n");
  REQUIRE(ds.num_users() == 2);
  CHECK(ds.users[0].num_train() == 2);
  CHECK(ds.users[0].num_test() == 1);
  CHECK(ds.users[1].train_y[0] == -1);
  CHECK(ds.users[1].confidence == doctest::Approx(0.5));
}

TEST_CASE("csv errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_csv(text);
    } catch (const CsvError& e) {
      return e.line();
    }
    return std::size_t{999};
  };
  CHECK(line_of("user,split,y,f0\n") == 1);
  CHECK(line_of("user_id,split,y,f0\nu,train,1\n") == 2);
  CHECK(line_of("user_id,split,y,f0\nu,train,1,0\nu,valid,1,0\n") == 3);
  CHECK(line_of("user_id,split,y,f0\nu,train,2,0\n") == 2);
  CHECK(line_of("user_id,split,y,f0\nu,train,1,abc\n") == 2);
  CHECK(line_of("user_id,split,y,f0\nu,test,1,0\n") == 0);
  CHECK(line_of("user_id,split,y,f0\n") == 0);
  CHECK_THROWS(load_csv("/nonexistent/file.csv"));
}

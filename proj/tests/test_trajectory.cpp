#include <doctest.h>

#include "herdlab/trajectory.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace herdlab;

namespace {

Trajectory make_sample() {
  Trajectory t;
  t.t0 = 2.5;
  t.dt = 0.25;
  t.model_id = "jump-two-state";
  t.params_digest = "00f1e2d3c4b5a697";
  t.seed = 77;
  t.notes = "dt_halvings=2";
  t.columns = {"X", "aux"};
  t.values = {{1, 2, 3, 0.1234567891234567}, {0.5, -0.25, 1e-30, 4e17}};
  return t;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("csv round trip preserves values bit for bit") {
  Trajectory t = make_sample();
  std::string path = temp_path("herdlab_traj_test.csv");
  write_trajectory_csv_file(path, t);
  Trajectory r = read_trajectory_csv_file(path);
  CHECK(r.t0 == t.t0);
  CHECK(r.dt == t.dt);
  CHECK(r.seed == t.seed);
  CHECK(r.model_id == t.model_id);
  CHECK(r.params_digest == t.params_digest);
  CHECK(r.notes == t.notes);
  REQUIRE(r.columns == t.columns);
  REQUIRE(r.size() == t.size());
  for (std::size_t c = 0; c < t.values.size(); ++c)
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(r.values[c][i] == t.values[c][i]);
  std::remove(path.c_str());
}

TEST_CASE("csv uses lf newlines and hash metadata") {
  Trajectory t = make_sample();
  std::string path = temp_path("herdlab_traj_lf.csv");
  write_trajectory_csv_file(path, t);
  std::ifstream is(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("#model=jump-two-state\n") != std::string::npos);
  CHECK(text.find("#seed=77\n") != std::string::npos);
  CHECK(text.find("#t,X,aux\n") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("csv reader skips unknown metadata keys") {
  std::string path = temp_path("herdlab_traj_extra.csv");
  {
    std::ofstream os(path, std::ios::binary);
    os << "#model=demo\n#future_key=whatever\n#dt=0.5\n#t,X\n0,1\n0.5,2\n";
  }
  Trajectory r = read_trajectory_csv_file(path);
  CHECK(r.model_id == "demo");
  CHECK(r.dt == 0.5);
  REQUIRE(r.size() == 2);
  CHECK(r.values[0][1] == 2.0);
  std::remove(path.c_str());
}

TEST_CASE("binary round trip") {
  Trajectory t = make_sample();
  std::string path = temp_path("herdlab_traj_test.bin");
  write_trajectory_binary_file(path, t);
  Trajectory r = read_trajectory_binary_file(path);
  CHECK(r.t0 == t.t0);
  CHECK(r.model_id == t.model_id);
  CHECK(r.notes == t.notes);
  REQUIRE(r.columns == t.columns);
  for (std::size_t c = 0; c < t.values.size(); ++c)
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(r.values[c][i] == t.values[c][i]);
  std::remove(path.c_str());
}

TEST_CASE("burn-in discards the leading samples and rebases time") {
  Trajectory t;
  t.t0 = 0;
  t.dt = 1.0;
  t.columns = {"X"};
  t.values = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  Trajectory r = discard_burn_in(t, 3.0);
  CHECK(r.size() == 7);
  CHECK(r.values[0][0] == 3.0);
  CHECK(r.t0 == doctest::Approx(3.0));
  CHECK(r.time(0) == doctest::Approx(3.0));

  Trajectory none = discard_burn_in(t, 0.0);
  CHECK(none.size() == 10);
}

TEST_CASE("column lookup by name") {
  Trajectory t = make_sample();
  CHECK(t.column("aux")[0] == 0.5);
  CHECK_THROWS(t.column("missing"));
}

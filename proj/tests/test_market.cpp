#include <doctest.h>

#include "herdlab/market.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace herdlab;

TEST_CASE("mood and its inverse") {
  CHECK(mood(0.25, 0.25) == doctest::Approx(0.0));
  CHECK(mood(0.1, 0.3) == doctest::Approx(0.5));
  CHECK(mood(0.3, 0.1) == doctest::Approx(-0.5));
  CHECK_THROWS(mood(0.0, 0.0));

  auto [np, no] = populations_from_mood(0.4, 0.5);
  CHECK(np == doctest::Approx(0.6 * 0.25));
  CHECK(no == doctest::Approx(0.6 * 0.75));
  CHECK(mood(np, no) == doctest::Approx(0.5));
}

TEST_CASE("log price at hand points") {
  CHECK(log_price(1.0, 0.5, 0.5) == doctest::Approx(0.5));
  CHECK(log_price(2.0, 0.2, -0.25) == doctest::Approx(2.0 * 0.8 * -0.25 / 0.2));
  CHECK(log_price(1.0, 0.3, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS(log_price(1.0, 0.0, 0.3));
}

TEST_CASE("price series reads the transformed columns") {
  Trajectory t;
  t.dt = 0.5;
  t.columns = {"n_f", "xi"};
  t.values = {{0.5, 0.25}, {0.2, -0.4}};
  std::vector<double> p = price_series(t, 2.0);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(2.0 * 0.5 * 0.2 / 0.5));
  CHECK(p[1] == doctest::Approx(2.0 * 0.75 * -0.4 / 0.25));
}

TEST_CASE("windowed returns telescope") {
  std::vector<double> p{0.0, 1.0, 3.0, 6.0, 10.0, 15.0};
  std::vector<double> r = returns_series(p, 0.5, 1.0);  // k = 2
  REQUIRE(r.size() == 4);
  CHECK(r[0] == doctest::Approx(3.0));
  CHECK(r[1] == doctest::Approx(5.0));
  CHECK(r[3] == doctest::Approx(9.0));
  // Non-overlapping returns stack up to the end-to-end move.
  CHECK(r[0] + r[2] == doctest::Approx(p[4] - p[0]));

  CHECK_THROWS(returns_series(p, 0.5, 0.8));  // not an integer multiple
  CHECK_THROWS(returns_series(p, 0.5, 4.0));  // longer than the series
}

TEST_CASE("absolute values") {
  std::vector<double> v{-2.0, 0.5, -0.25};
  std::vector<double> a = abs_values(v);
  CHECK(a[0] == 2.0);
  CHECK(a[1] == 0.5);
  CHECK(a[2] == 0.25);
}

TEST_CASE("market series aligns returns with prices") {
  Trajectory t;
  t.t0 = 10.0;
  t.dt = 1.0;
  t.columns = {"n_f", "xi"};
  t.values = {{0.5, 0.5, 0.5, 0.5}, {0.0, 0.2, 0.4, 0.1}};
  MarketSeries s = market_series(t, 1.0, 2.0);
  CHECK(s.window == 2.0);
  REQUIRE(s.price.size() == 4);
  REQUIRE(s.ret.size() == 2);
  CHECK(s.ret[0] == doctest::Approx(s.price[2] - s.price[0]));
  CHECK(s.ret[1] == doctest::Approx(s.price[3] - s.price[1]));

  std::string path =
      (std::filesystem::temp_directory_path() / "herdlab_market_test.csv").string();
  s.write_csv_file(path);
  std::ifstream is(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  CHECK(text.find("#t,p,r,abs_r\n") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  std::remove(path.c_str());
}

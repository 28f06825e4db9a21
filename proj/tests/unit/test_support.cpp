#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bdls/csv.hpp"
#include "bdls/ensemble.hpp"
#include "bdls/geometry.hpp"

using namespace bdls;

TEST_CASE("torus wrapping") {
  const auto t = DomainGeometry::torus({-1.0}, {2.0});
  for (double x : {-3.5, -1.0, -0.2, 0.99, 1.0, 7.25}) {
    std::vector<double> p{x};
    t.project(p);
    CHECK(p[0] >= -1.0);
    CHECK(p[0] < 1.0);
    const double k = (x - p[0]) / 2.0;
    CHECK(std::abs(k - std::round(k)) < 1e-12);
  }
  CHECK(wrap_periodic(1.0, -1.0, 2.0) == -1.0);
  CHECK(t.displacement(0, 0.9, -0.9) == doctest::Approx(-0.2));
  CHECK(t.displacement(0, -0.9, 0.9) == -t.displacement(0, 0.9, -0.9));
  CHECK_THROWS(DomainGeometry::torus({0.0}, {0.0}));
}

TEST_CASE("box reflection") {
  const double inf = std::numeric_limits<double>::infinity();
  const auto b = DomainGeometry::box({0.0, 0.0}, {1.0, inf}, {true, true});
  std::vector<double> p{1.25, -3.0};
  b.project(p);
  CHECK(p[0] == doctest::Approx(0.75));
  CHECK(p[1] == doctest::Approx(3.0));
  CHECK(b.contains(p));
  CHECK(reflect_into(-0.3, 0.0, 1.0) == doctest::Approx(0.3));
  CHECK(reflect_into(2.3, 0.0, 1.0) == doctest::Approx(0.3));
  CHECK_THROWS(DomainGeometry::box({1.0}, {0.0}, {true}));
  const auto clamp = DomainGeometry::box({0.0}, {1.0}, {false});
  std::vector<double> q{1.5};
  clamp.project(q);
  CHECK(q[0] == 1.0);
}

TEST_CASE("ensemble storage") {
  const auto g = DomainGeometry::euclidean(2);
  Ensemble e(g, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(e.size() == 3);
  CHECK(e.at(1, 1) == 4);
  e.copy_particle(2, 0);
  CHECK(e.at(0, 0) == 5);
  CHECK(e.at(0, 1) == 6);
  CHECK(e.size() == 3);
  CHECK_THROWS(Ensemble(g, std::vector<double>{1, 2, 3}));
  std::ostringstream os;
  write_snapshot_csv(os, e, 7);
  CHECK(os.str().rfind("# iteration=7\nx1,x2\n", 0) == 0);
}

TEST_CASE("csv round trip keeps doubles exact") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  CsvTable t;
  t.header = {"a", "b"};
  std::vector<double> values;
  for (int i = 0; i < 100; ++i) {
    const double v = n(rng) * std::pow(10.0, i % 30 - 15);
    values.push_back(v);
    t.add_row({std::to_string(i), format_real(v)});
  }
  const auto path = std::filesystem::temp_directory_path() / "bdls_csv_roundtrip.csv";
  t.write(path);
  const auto back = CsvTable::read(path);
  CHECK(back.header == t.header);
  CHECK(back.column("b") == 1);
  CHECK(back.column("zzz") == -1);
  for (int i = 0; i < 100; ++i) CHECK(std::stod(back.rows[i][1]) == values[i]);
  std::filesystem::remove(path);
  CHECK(format_real(0.1) == "0.1");
  CHECK(trim("  x y \t") == "x y");
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
}

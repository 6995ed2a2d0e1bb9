#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "hinv/configuration.hpp"
#include "hinv/error.hpp"
#include "hinv/field.hpp"
#include "hinv/rng.hpp"
#include "support.hpp"

using namespace hinv;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const ConfigurationSpace> space_1d(int levels) {
  return std::make_shared<const ConfigurationSpace>(
      ConfigurationSpace{Box::interval(0, 100), Box::interval(10, 90), {80, 1}, levels, {-1.0, 2.0}});
}

std::shared_ptr<const ConfigurationSpace> space_2d(int levels) {
  return std::make_shared<const ConfigurationSpace>(ConfigurationSpace{
      Box::rectangle(0, 20, 0, 20), Box::rectangle(2, 18, 2, 18), {16, 16}, levels, {-1.0, 2.0}});
}

}  // namespace

TEST_CASE("l2_inner quadrature") {
  auto g = test::line(0, 100, 201);
  const Field one = Field::constant(g, 1.0);
  const NodeMask all = NodeMask::all(*g);
  CHECK(std::abs(l2_inner(one, one, all) - 100.0) <= g->cell_measure());
  CHECK(l2_inner(Field::zeros(g), one, all) == 0.0);

  const Field s = Field::from_function(g, [](auto p) { return std::sin(kPi * p[0] / 100.0); });
  CHECK(std::abs(l2_inner(s, s, all) - 50.0) / 50.0 <= 1e-3);
  CHECK(l2_inner(s, one) == doctest::Approx(l2_inner(one, s)));

  auto g2 = test::square(0, 20, 101);
  const Field one2 = Field::constant(g2, 1.0);
  CHECK(l2_inner(one2, one2) == doctest::Approx(400.0).epsilon(1e-12));

  auto other = test::line(0, 100, 101);
  CHECK_THROWS_AS(l2_inner(one, Field::constant(other, 1.0)), GridMismatch);
}

TEST_CASE("l2_inner is bilinear") {
  auto g = test::line(0, 10, 41);
  Rng rng(5);
  auto random_field = [&] {
    return Field::from_function(g, [&](auto) { return rng.normal(); });
  };
  const Field a = random_field();
  const Field b = random_field();
  const Field c = random_field();
  const Field ab(g, 2.0 * a.values() + 3.0 * b.values());
  CHECK(l2_inner(ab, c) == doctest::Approx(2.0 * l2_inner(a, c) + 3.0 * l2_inner(b, c)).epsilon(1e-12));
}

TEST_CASE("discrete laplacian") {
  auto g = test::line(-3, 5, 33);
  const Field quad = Field::from_function(g, [](auto p) { return p[0] * p[0]; });
  const Field lq = discrete_laplacian(quad);
  for (Index n : g->interior()) CHECK(lq[n] == doctest::Approx(2.0).epsilon(1e-10));
  for (Index n : g->boundary()) CHECK(lq[n] == 0.0);

  const Field flat = discrete_laplacian(Field::constant(g, 4.2));
  for (Index n : g->interior()) CHECK(std::abs(flat[n]) < 1e-12);

  // Relative error against -(pi/L)^2 f shrinks fourfold when h halves.
  auto rel_error = [](int nodes) {
    auto gr = test::line(0, 100, nodes);
    const Field f = Field::from_function(gr, [](auto p) { return std::sin(kPi * p[0] / 100.0); });
    const Field lf = discrete_laplacian(f);
    double err = 0.0;
    for (Index n : gr->interior()) {
      const double exact = -(kPi / 100.0) * (kPi / 100.0) * f[n];
      err = std::max(err, std::abs(lf[n] - exact) / std::abs(exact));
    }
    return err;
  };
  const double e1 = rel_error(51);
  const double e2 = rel_error(101);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("laplacian is self-adjoint for fields vanishing on the boundary") {
  auto g = test::square(0, 20, 31);
  Rng rng(11);
  auto random_field = [&] {
    return Field::from_function(g, [&](auto p) {
      const bool edge = p[0] == 0.0 || p[0] == 20.0 || p[1] == 0.0 || p[1] == 20.0;
      return edge ? 0.0 : rng.normal();
    });
  };
  const Field f = random_field();
  const Field h = random_field();
  const double lhs = l2_inner(discrete_laplacian(f), h);
  const double rhs = l2_inner(f, discrete_laplacian(h));
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("habitat embedding") {
  auto g = test::line(0, 100, 201);
  auto sp = space_1d(2);
  const Field top = habitat_to_field(HabitatConfiguration::uniform(sp, 1), g);
  for (Index n = 0; n < g->node_count(); ++n) {
    const double x = g->coordinate(n, 0);
    CHECK(top[n] == ((x >= 10.0 && x < 90.0) ? 2.0 : -1.0));
  }
  const Field low = habitat_to_field(HabitatConfiguration::uniform(sp, 0), g);
  CHECK((low.values().array() == -1.0).all());
}

TEST_CASE("checkerboard embedding matches a point-in-cell lookup") {
  auto g = test::square(0, 20, 81);
  auto sp = space_2d(2);
  std::vector<std::uint8_t> levels(256);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) levels[j * 16 + i] = static_cast<std::uint8_t>((i + j) % 2);
  const HabitatConfiguration board(sp, levels);
  const Field f = habitat_to_field(board, g);
  for (Index n = 0; n < g->node_count(); ++n) {
    const auto p = g->point(n);
    double expected = -1.0;
    if (p[0] >= 2.0 && p[0] < 18.0 && p[1] >= 2.0 && p[1] < 18.0) {
      const int i = static_cast<int>(std::floor(p[0] + 1e-9)) - 2;
      const int j = static_cast<int>(std::floor(p[1] + 1e-9)) - 2;
      expected = (i + j) % 2 ? 2.0 : -1.0;
    }
    CHECK(f[n] == expected);
  }
}

TEST_CASE("embedding is injective and needs a node per cell") {
  auto g = test::line(0, 100, 201);
  auto sp = space_1d(21);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> a(80);
    for (auto& l : a) l = static_cast<std::uint8_t>(rng.below(21));
    auto b = a;
    const int cell = static_cast<int>(rng.below(80));
    b[cell] = static_cast<std::uint8_t>((b[cell] + 1 + rng.below(20)) % 21);
    const Field fa = habitat_to_field(HabitatConfiguration(sp, a), g);
    const Field fb = habitat_to_field(HabitatConfiguration(sp, b), g);
    CHECK((fa.values() - fb.values()).cwiseAbs().maxCoeff() > 0.0);
  }
  CHECK_THROWS_AS(node_cells(*sp, *test::line(0, 100, 41)), GridMismatch);
  CHECK_THROWS_AS(node_cells(*sp, *test::line(0, 50, 201)), GridMismatch);
}

TEST_CASE("mean absolute error") {
  auto sp = space_1d(2);
  const auto a = HabitatConfiguration::uniform(sp, 0);
  CHECK(mean_abs_error(a, a) == 0.0);
  auto b = a;
  b.set_level(37, 1);
  CHECK(mean_abs_error(a, b) == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(l2_distance_squared(a, b) == doctest::Approx(9.0));

  auto other = std::make_shared<const ConfigurationSpace>(
      ConfigurationSpace{Box::interval(0, 100), Box::interval(10, 90), {40, 1}, 2, {-1.0, 2.0}});
  CHECK_THROWS_AS(mean_abs_error(a, HabitatConfiguration::uniform(other, 0)), InvalidArgument);
}

TEST_CASE("mean absolute error agrees with node quadrature") {
  for (int dim = 1; dim <= 2; ++dim) {
    auto sp = dim == 1 ? space_1d(21) : space_2d(21);
    auto g = dim == 1 ? test::line(0, 100, 201) : test::square(0, 20, 81);
    Rng rng(17 + dim);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::uint8_t> a(sp->cell_count());
      std::vector<std::uint8_t> b(sp->cell_count());
      for (auto& l : a) l = static_cast<std::uint8_t>(rng.below(21));
      for (auto& l : b) l = static_cast<std::uint8_t>(rng.below(21));
      const HabitatConfiguration ca(sp, a);
      const HabitatConfiguration cb(sp, b);
      const Field fa = habitat_to_field(ca, g);
      const Field fb = habitat_to_field(cb, g);
      const Field diff(g, (fa.values() - fb.values()).cwiseAbs());
      const double quadrature = l2_inner(diff, Field::constant(g, 1.0)) / sp->domain.measure();
      CHECK(std::abs(quadrature - mean_abs_error(ca, cb)) <= 1e-10);
    }
  }
}

TEST_CASE("field files round trip") {
  test::TempDir dir("fields");
  auto g = test::square(0, 20, 11);
  const Field f = Field::from_function(g, [](auto p) { return std::sin(p[0]) * std::exp(p[1] / 7.0); });
  write_field_binary(dir / "f.bin", f);
  const Field r = read_field_binary(dir / "f.bin");
  CHECK(r.grid().same_layout(*g));
  CHECK(r.values() == f.values());

  write_field_csv(dir / "f.csv", f);
  std::ifstream in(dir / "f.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,x,y,value");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<std::size_t>(g->node_count()));
}

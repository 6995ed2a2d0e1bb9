#include "hinv/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hinv/error.hpp"

namespace hinv {

namespace {

constexpr double kM = 2.0;
constexpr double kLowerAnchor = -1.0;

std::uint8_t clamp_level(double v, int levels) {
  return static_cast<std::uint8_t>(std::clamp(static_cast<int>(std::lround(v)), 0, levels - 1));
}

// Binary 1D truth: favourable patches of widths 12, 3, 13, 1 and 12 cells.
std::vector<std::uint8_t> truth_example1() {
  std::vector<std::uint8_t> t(80, 0);
  const int patches[][2] = {{8, 20}, {28, 31}, {37, 50}, {56, 57}, {62, 74}};
  for (const auto& p : patches)
    for (int c = p[0]; c < p[1]; ++c) t[c] = 1;
  return t;
}

// 21-level 1D truth: a smooth oscillation with a low plateau on cells 50..59.
std::vector<std::uint8_t> truth_example2() {
  std::vector<std::uint8_t> t(80);
  for (int c = 0; c < 80; ++c) t[c] = clamp_level(10.0 + 10.0 * std::sin(2.0 * std::numbers::pi * (c + 0.5) / 53.0), 21);
  for (int c = 50; c < 60; ++c) t[c] = 3;
  return t;
}

// Binary 2D truth: a disc of radius 4 centred at (10.5, 9.5) and a bar over
// [4, 7) x [12, 17), in domain coordinates.
std::vector<std::uint8_t> truth_example3() {
  std::vector<std::uint8_t> t(256, 0);
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) {
      const double x = 2.0 + i + 0.5;
      const double y = 2.0 + j + 0.5;
      const bool disc = (x - 10.5) * (x - 10.5) + (y - 9.5) * (y - 9.5) <= 16.0;
      const bool bar = x >= 4.0 && x < 7.0 && y >= 12.0 && y < 17.0;
      t[j * 16 + i] = (disc || bar) ? 1 : 0;
    }
  }
  return t;
}

// 21-level 2D truth: a smooth product of sine and cosine bumps.
std::vector<std::uint8_t> truth_example4() {
  std::vector<std::uint8_t> t(256);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      t[j * 16 + i] = clamp_level(10.0 + 10.0 * std::sin(std::numbers::pi * (i + 0.5) / 8.0) *
                                             std::cos(std::numbers::pi * (j + 0.5) / 10.0),
                                  21);
  return t;
}

DomainSpec domain_1d() {
  DomainSpec d;
  d.extent = Box::interval(0.0, 100.0);
  d.omega1 = Box::interval(10.0, 90.0);
  d.observation = Box::interval(55.0, 58.0);
  d.ball_eps = Ball{1, {56.5, 0.0}, 1.0};
  return d;
}

DomainSpec domain_2d() {
  DomainSpec d;
  d.extent = Box::rectangle(0.0, 20.0, 0.0, 20.0);
  d.omega1 = Box::rectangle(2.0, 18.0, 2.0, 18.0);
  d.observation = Ball{2, {7.0, 7.0}, 3.0};
  d.ball_eps = Ball{2, {7.0, 7.0}, 1.0};
  return d;
}

}  // namespace

ConfigurationSpace example_space_1d(int levels) {
  const auto d = domain_1d();
  return ConfigurationSpace{d.extent, d.omega1, {80, 1}, levels, {kLowerAnchor, kM}};
}

ConfigurationSpace example_space_2d(int levels) {
  const auto d = domain_2d();
  return ConfigurationSpace{d.extent, d.omega1, {16, 16}, levels, {kLowerAnchor, kM}};
}

ConfigurationSpace reduced_space_2d(int levels) {
  const auto d = domain_2d();
  return ConfigurationSpace{d.extent, Box::rectangle(5.0, 9.0, 5.0, 9.0), {4, 4}, levels, {kLowerAnchor, kM}};
}

std::vector<std::string> preset_names() {
  return {"example1", "example2", "example3", "example4", "example3-reduced", "example4-reduced", "mini1d"};
}

ExperimentPreset make_preset(const std::string& name) {
  ExperimentPreset p;
  p.name = name;
  if (name == "example1" || name == "example2") {
    const int levels = name == "example1" ? 2 : 21;
    p.domain = domain_1d();
    p.space = example_space_1d(levels);
    p.nodes = {201, 1};
    p.dt = 5e-4;
    p.profile = InitialProfile::Standard1D;
    p.truth = levels == 2 ? truth_example1() : truth_example2();
  } else if (name == "example3" || name == "example4") {
    const int levels = name == "example3" ? 2 : 21;
    p.domain = domain_2d();
    p.space = example_space_2d(levels);
    p.nodes = {101, 101};
    p.dt = 1e-3;
    p.profile = InitialProfile::Standard2D;
    p.truth = levels == 2 ? truth_example3() : truth_example4();
  } else if (name == "example3-reduced" || name == "example4-reduced") {
    const int levels = name == "example3-reduced" ? 2 : 21;
    p.domain = domain_2d();
    p.space = reduced_space_2d(levels);
    p.nodes = {81, 81};
    p.dt = 1e-3;
    p.profile = InitialProfile::Standard2D;
    if (levels == 2) {
      p.truth = {1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1, 1, 0};
    } else {
      p.truth = {20, 17, 12, 6, 15, 20, 9, 3, 4, 11, 18, 14, 0, 7, 13, 19};
    }
  } else if (name == "mini1d") {
    p.domain.extent = Box::interval(0.0, 25.0);
    p.domain.omega1 = Box::interval(10.0, 14.0);
    p.domain.observation = Box::interval(11.0, 12.0);
    p.space = ConfigurationSpace{p.domain.extent, p.domain.omega1, {4, 1}, 2, {kLowerAnchor, kM}};
    p.nodes = {51, 1};
    p.dt = 1e-3;
    p.profile = InitialProfile::Standard1D;
    p.truth = {1, 0, 1, 1};
  } else {
    throw InvalidArgument("unknown preset '" + name + "'");
  }
  p.domain.validate();
  p.space.validate();
  return p;
}

}  // namespace hinv

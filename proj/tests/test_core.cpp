#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mfgdc/core/error.hpp"
#include "mfgdc/core/field.hpp"
#include "mfgdc/core/io.hpp"
#include "mfgdc/core/spectral.hpp"
#include "mfgdc/core/trajectory.hpp"

using namespace mfgdc;
using std::numbers::pi;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Trajectory small_trajectory(bool with_u, bool with_w) {
  TorusGrid g(2, 8);
  Trajectory t{g, 0.5, {}, std::nullopt, std::nullopt};
  for (int k = 0; k <= 3; ++k)
    t.m.push_back(ScalarField::sample(g, [k](double x, double y) { return 1.0 + 0.1 * k * std::sin(2 * pi * (x + y)); }));
  if (with_u) {
    std::vector<ScalarField> u;
    for (int k = 0; k <= 3; ++k) u.push_back(ScalarField::sample(g, [k](double x, double) { return k * std::cos(2 * pi * x); }));
    t.u = u;
  }
  if (with_w) {
    std::vector<VectorField> w;
    for (int k = 0; k <= 3; ++k) {
      auto c = ScalarField(g, 0.25 * k);
      w.emplace_back(g, std::vector<ScalarField>{c, -1.0 * c});
    }
    t.w = w;
  }
  return t;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("grid rejects non power of two sizes") {
  CHECK_THROWS_AS(TorusGrid(1, 10), InvalidArgument);
  CHECK_THROWS_AS(TorusGrid(1, 4), InvalidArgument);
  CHECK_THROWS_AS(TorusGrid(3, 8), InvalidArgument);
  CHECK_NOTHROW(TorusGrid(2, 16));
  CHECK(TorusGrid(2, 16).size() == 256);
  CHECK(is_power_of_two(64));
  CHECK_FALSE(is_power_of_two(96));
}

TEST_CASE("field constructor rejects bad input") {
  TorusGrid g(1, 8);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(7, 1.0)), InvalidArgument);
  std::vector<double> v(8, 1.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(g, v), InvalidArgument);
}

TEST_CASE("lq norms") {
  TorusGrid g(1, 16);
  auto f = ScalarField::sample(g, [](double x, double) { return x < 0.5 ? 2.0 : 0.0; });
  CHECK(integrate(f) == doctest::Approx(1.0));
  CHECK(lq_norm(f, 1.0) == doctest::Approx(1.0));
  CHECK(lq_norm(f, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(lq_norm(f, std::numeric_limits<double>::infinity()) == 2.0);
}

TEST_CASE("spectral derivatives of trigonometric polynomials are exact") {
  for (int dim : {1, 2}) {
    TorusGrid g(dim, 32);
    auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(2 * pi * 3 * x) + std::cos(2 * pi * 2 * y); });
    auto fx = ScalarField::sample(g, [](double x, double) { return 6 * pi * std::cos(2 * pi * 3 * x); });
    CHECK(max_abs_diff(partial(f, 0), fx) < 1e-11);
    auto lap = ScalarField::sample(g, [dim](double x, double y) {
      return -36 * pi * pi * std::sin(2 * pi * 3 * x) - (dim == 2 ? 16 * pi * pi * std::cos(2 * pi * 2 * y) : 0.0);
    });
    CHECK(max_abs_diff(laplacian(f), lap) < 1e-9);
    CHECK(max_abs_diff(divergence(gradient(f)), laplacian(f)) < 1e-9);
  }
}

TEST_CASE("fourier round trip") {
  TorusGrid g(2, 16);
  auto f = ScalarField::sample(g, [](double x, double y) { return std::exp(std::sin(2 * pi * x) * std::cos(2 * pi * y)); });
  FourierTransform ft(g);
  auto back = ft.inverse(ft.forward(f.values()));
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(back[i] - f[i]));
  CHECK(d < 1e-14);
}

TEST_CASE("frozen modes are the divergence kernel") {
  TorusGrid g(1, 16);
  auto f = ScalarField::sample(g, [](double x, double) { return 1.0 + std::cos(2 * pi * 8 * x) + std::sin(2 * pi * x); });
  const double removed = remove_frozen_modes(f);
  CHECK(removed == doctest::Approx(1.0));
  auto expect = ScalarField::sample(g, [](double x, double) { return 1.0 + std::sin(2 * pi * x); });
  CHECK(max_abs_diff(f, expect) < 1e-13);
}

TEST_CASE("field file round trip is bitwise") {
  TorusGrid g(2, 8);
  auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(x * 7.1) + y / 3.0; });
  std::stringstream s;
  write_field(s, f);
  auto r = read_field(s);
  CHECK(r.grid() == g);
  CHECK(r.data() == f.data());
}

TEST_CASE("trajectory file round trip is bitwise") {
  for (bool u : {false, true})
    for (bool w : {false, true}) {
      auto t = small_trajectory(u, w);
      std::stringstream s;
      write_trajectory(s, t);
      auto r = read_trajectory(s);
      CHECK(r.horizon == t.horizon);
      REQUIRE(r.m.size() == t.m.size());
      for (std::size_t k = 0; k < t.m.size(); ++k) CHECK(r.m[k].data() == t.m[k].data());
      CHECK(r.u.has_value() == u);
      CHECK(r.w.has_value() == w);
      if (u)
        for (std::size_t k = 0; k < t.m.size(); ++k) CHECK((*r.u)[k].data() == (*t.u)[k].data());
      if (w)
        for (std::size_t k = 0; k < t.m.size(); ++k) CHECK((*r.w)[k][1].data() == (*t.w)[k][1].data());
    }
}

TEST_CASE("readers report distinct format errors") {
  auto kind_of = [](const std::string& bytes, bool trajectory) {
    std::stringstream s(bytes);
    try {
      if (trajectory) read_trajectory(s);
      else read_field(s);
    } catch (const FormatError& e) {
      return e.kind();
    }
    FAIL("no error");
    return FormatError::Kind::io;
  };
  TorusGrid g(1, 8);
  std::stringstream s;
  write_field(s, ScalarField(g, 1.0));
  const std::string good = s.str();

  CHECK(kind_of("XXXX" + good.substr(4), false) == FormatError::Kind::bad_magic);
  std::string bad_version = good;
  bad_version[4] = 2;
  CHECK(kind_of(bad_version, false) == FormatError::Kind::version_mismatch);
  CHECK(kind_of(good.substr(0, good.size() - 3), false) == FormatError::Kind::truncated);
  std::string huge = good;
  for (int i = 0; i < 8; ++i) huge[9 + i] = static_cast<char>(0xFF);
  CHECK(kind_of(huge, false) == FormatError::Kind::shape_overflow);
  std::string odd = good;
  odd[9] = 10;
  CHECK(kind_of(odd, false) == FormatError::Kind::invalid_shape);
  CHECK(kind_of(good, true) == FormatError::Kind::bad_magic);
}

TEST_CASE("trajectory validation and mass drift") {
  auto t = small_trajectory(false, false);
  CHECK_NOTHROW(t.validate());
  CHECK(t.mass_drift() < 1e-14);
  CHECK(t.dt() == doctest::Approx(0.5 / 3));
  t.m[1][0] = -1.0;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

}  // TEST_SUITE

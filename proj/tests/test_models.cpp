#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mfgdc/core/error.hpp"
#include "mfgdc/models/admissibility.hpp"
#include "mfgdc/models/coupling.hpp"
#include "mfgdc/models/energy.hpp"
#include "mfgdc/models/hamiltonian.hpp"

using namespace mfgdc;

TEST_SUITE("models") {

TEST_CASE("hamiltonian derivatives match finite differences") {
  for (double beta : {1.5, 2.0, 3.0, 4.5}) {
    PowerHamiltonian h(beta);
    const Vec2 p{0.7, -1.3};
    const double e = 1e-6;
    auto grad = h.gradient(p);
    auto hess = h.hessian(p);
    auto third = h.third(p);
    for (int a = 0; a < 2; ++a) {
      Vec2 pp = p, pm = p;
      pp[a] += e;
      pm[a] -= e;
      CHECK(grad[a] == doctest::Approx((h.value(pp) - h.value(pm)) / (2 * e)).epsilon(1e-7));
      auto gp = h.gradient(pp), gm = h.gradient(pm);
      auto hp = h.hessian(pp), hm = h.hessian(pm);
      for (int b = 0; b < 2; ++b) {
        CHECK(hess[a][b] == doctest::Approx((gp[b] - gm[b]) / (2 * e)).epsilon(1e-6));
        for (int c = 0; c < 2; ++c)
          CHECK(third[a][b][c] == doctest::Approx((hp[b][c] - hm[b][c]) / (2 * e)).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("legendre pair") {
  for (double beta : {1.5, 2.0, 3.0}) {
    auto r = legendre_pair_check(PowerHamiltonian(beta), 2000, 11);
    CHECK(r.max_equality_gap < 1e-9);
    CHECK(r.max_fenchel_excess <= 1e-12);
  }
  CHECK_THROWS_AS(PowerHamiltonian(1.0), InvalidArgument);
}

TEST_CASE("power coupling") {
  auto c = Coupling::power(2.0, 1.5);
  CHECK(c.g(4.0) == doctest::Approx(16.0));
  CHECK(c.G(4.0) == doctest::Approx(2.0 * std::pow(4.0, 2.5) / 2.5));
  CHECK(c.dg(4.0) == doctest::Approx(6.0));
  CHECK(c.monotonicity_margin(0.0, 5.0) >= 0.0);
  CHECK(Coupling::zero().g(3.0) == 0.0);
  CHECK_THROWS_AS(Coupling::power(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("table coupling interpolates and extends linearly") {
  std::vector<double> z{0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<double> g;
  for (double x : z) g.push_back(std::log(x));
  auto c = Coupling::table(z, g);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(c.g(z[i]) == doctest::Approx(g[i]));
  CHECK(c.monotonicity_margin(0.5, 3.0) >= 0.0);
  const double e = 1e-6;
  for (double x : {0.7, 1.2, 2.6}) {
    CHECK(c.dg(x) == doctest::Approx((c.g(x + e) - c.g(x - e)) / (2 * e)).epsilon(1e-6));
    CHECK(c.g(x) == doctest::Approx((c.G(x + e) - c.G(x - e)) / (2 * e)).epsilon(1e-6));
  }
  const double s = c.dg(3.0);
  CHECK(c.g(4.0) == doctest::Approx(c.g(3.0) + s));
  CHECK_THROWS_AS(Coupling::table({1.0, 2.0, 3.0}, {0.0, 1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(Coupling::table({1.0, 3.0, 2.0, 4.0}, {0.0, 1.0, 2.0, 3.0}), InvalidArgument);
}

TEST_CASE("coupling csv round trip") {
  auto path = std::filesystem::temp_directory_path() / "mfgdc_test_coupling.csv";
  auto c = Coupling::table({0.5, 1.0, 1.5, 2.0}, {0.0, 0.25, 0.5, 1.0});
  write_coupling_csv(c, path);
  auto r = read_coupling_csv(path);
  CHECK(r.table_z() == c.table_z());
  CHECK(r.table_g() == c.table_g());
  std::filesystem::remove(path);
}

TEST_CASE("energy pressures") {
  auto p = InternalEnergy::power(3.0);
  CHECK(p.pressure(2.0) == doctest::Approx(16.0));
  CHECK(p.dpressure(2.0) == doctest::Approx(24.0));
  auto e = InternalEnergy::entropy();
  CHECK(e.pressure(5.0) == doctest::Approx(5.0));
  CHECK(e.U(0.0) == 0.0);
  auto s = InternalEnergy::scaled_power(-1.0, 0.5);
  CHECK(s.pressure(4.0) == doctest::Approx(1.0));
  auto custom = InternalEnergy::custom([](double z) { return z * z; }, [](double z) { return 2 * z; });
  CHECK(custom.pressure(3.0) == doctest::Approx(9.0));
  CHECK(custom.dpressure(3.0) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(custom.sampled_certificate_only());
}

TEST_CASE("energy parsing") {
  CHECK(InternalEnergy::parse("power:2").exponent() == 2.0);
  CHECK(InternalEnergy::parse("entropy").kind() == InternalEnergy::Kind::entropy);
  CHECK(InternalEnergy::parse("scaled_power:-1:0.5").kind() == InternalEnergy::Kind::scaled_power);
  CHECK(InternalEnergy::parse("shifted_inverse:1:0.1").kind() == InternalEnergy::Kind::shifted_inverse);
  CHECK_THROWS_AS(InternalEnergy::parse("power"), InvalidArgument);
  CHECK_THROWS_AS(InternalEnergy::parse("cubic:3"), InvalidArgument);
  CHECK(InternalEnergy::parse(InternalEnergy::power(1.5).describe()).exponent() == 1.5);
}

TEST_CASE("displacement admissibility") {
  CHECK(displacement_admissible(InternalEnergy::power(2.0), 3).admissible);
  CHECK(displacement_admissible(InternalEnergy::entropy(), 2).admissible);
  CHECK(displacement_admissible(InternalEnergy::scaled_power(-1.0, 0.5), 2).admissible);
  CHECK_FALSE(displacement_admissible(InternalEnergy::scaled_power(-1.0, 0.5), 3).admissible);
  CHECK(pressure_growth_check(InternalEnergy::power(2.0), 3) <= 1e-8);
  auto custom = InternalEnergy::custom([](double z) { return z * z; }, [](double z) { return 2 * z; });
  CHECK(displacement_admissible(custom, 2).certificate == "sampled certificate only");
}

TEST_CASE("congestion condition") {
  auto c = congestion_convexity_condition(2.0, 0.0, 2.0, 1);
  CHECK(c.holds);
  CHECK(c.inequality_lhs == doctest::Approx(1.0));
  auto big = congestion_convexity_condition(1000.0, 2.5, 2.0, 2);
  CHECK_FALSE(big.holds);
  CHECK(congestion_convexity_condition(1.5, 0.5, 1.5, 2).branch == "1<beta<2");
  CHECK(congestion_alpha_sup(3.0).value == doctest::Approx(1.0));
  CHECK(congestion_alpha_sup(2.0).value == doctest::Approx(2.0));
  CHECK(congestion_alpha_sup(1.5).value == doctest::Approx(2.0));
}

}  // TEST_SUITE

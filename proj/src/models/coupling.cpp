#include "mfgdc/models/coupling.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74 pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

struct Coupling::Table {
  std::vector<double> z;
  std::vector<double> g;
  boost::math::interpolators::pchip<std::vector<double>> spline;
  double slope_lo;
  double slope_hi;
  // cumulative[i] = int_{z_0}^{z_i} g
  std::vector<double> cumulative;

  Table(std::vector<double> zs, std::vector<double> gs)
      : z(zs), g(gs), spline(std::move(zs), std::move(gs)) {
    slope_lo = spline.prime(z.front());
    slope_hi = spline.prime(z.back());
    cumulative.assign(z.size(), 0.0);
    for (std::size_t i = 1; i < z.size(); ++i)
      cumulative[i] = cumulative[i - 1] + segment_integral(z[i - 1], z[i]);
  }

  // The interpolant is cubic on each segment, so 2-point Gauss is exact.
  double segment_integral(double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double off = half / std::sqrt(3.0);
    return half * (spline(mid - off) + spline(mid + off));
  }

  double value(double x) const {
    if (x <= z.front()) return g.front() + slope_lo * (x - z.front());
    if (x >= z.back()) return g.back() + slope_hi * (x - z.back());
    return spline(x);
  }

  double prime(double x) const {
    if (x <= z.front()) return slope_lo;
    if (x >= z.back()) return slope_hi;
    return spline.prime(x);
  }

  // int_{z_0}^{x} g
  double from_start(double x) const {
    if (x <= z.front()) {
      const double dx = x - z.front();
      return g.front() * dx + 0.5 * slope_lo * dx * dx;
    }
    if (x >= z.back()) {
      const double dx = x - z.back();
      return cumulative.back() + g.back() * dx + 0.5 * slope_hi * dx * dx;
    }
    const auto it = std::upper_bound(z.begin(), z.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - z.begin()) - 1;
    return cumulative[i] + segment_integral(z[i], x);
  }
};

Coupling Coupling::zero() { return Coupling(); }

Coupling Coupling::power(double c, double theta) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("power coupling needs c >= 0");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidArgument("power coupling needs theta >= 0");
  Coupling out;
  out.kind_ = Kind::power;
  out.c_ = c;
  out.theta_ = theta;
  return out;
}

Coupling Coupling::table(std::vector<double> z, std::vector<double> g) {
  if (z.size() != g.size()) throw InvalidArgument("coupling table columns differ in length");
  if (z.size() < 4) throw InvalidArgument("coupling table needs at least 4 rows");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i]) || !std::isfinite(g[i])) throw InvalidArgument("coupling table has non-finite entries");
    if (i > 0 && !(z[i] > z[i - 1])) throw InvalidArgument("coupling table z must be strictly increasing");
  }
  Coupling out;
  out.kind_ = Kind::table;
  out.table_ = std::make_shared<const Table>(std::move(z), std::move(g));
  return out;
}

const std::vector<double>& Coupling::table_z() const {
  if (!table_) throw InvalidArgument("not a table coupling");
  return table_->z;
}

const std::vector<double>& Coupling::table_g() const {
  if (!table_) throw InvalidArgument("not a table coupling");
  return table_->g;
}

double Coupling::g(double z) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::power:
      return theta_ == 0.0 ? c_ : c_ * std::pow(std::max(z, 0.0), theta_);
    case Kind::table:
      return table_->value(z);
  }
  return 0.0;
}

double Coupling::G(double z) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::power:
      if (z <= 0.0) return c_ * z * (theta_ == 0.0 ? 1.0 : 0.0);
      return c_ * std::pow(z, theta_ + 1.0) / (theta_ + 1.0);
    case Kind::table:
      return table_->from_start(z) - table_->from_start(0.0);
  }
  return 0.0;
}

double Coupling::dg(double z) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::power:
      if (theta_ == 0.0) return 0.0;
      if (z <= 0.0) return theta_ == 1.0 ? c_ : (theta_ > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
      return c_ * theta_ * std::pow(z, theta_ - 1.0);
    case Kind::table:
      return table_->prime(z);
  }
  return 0.0;
}

double Coupling::monotonicity_margin(double lo, double hi, std::size_t samples,
                                     std::uint64_t seed) const {
  if (!(hi > lo)) throw InvalidArgument("monotonicity range must satisfy hi > lo");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    double a = dist(rng);
    double b = dist(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    margin = std::min(margin, g(b) - g(a));
  }
  return margin;
}

std::string Coupling::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::zero:
      os << "zero";
      break;
    case Kind::power:
      os << "power(c=" << c_ << ", theta=" << theta_ << ")";
      break;
    case Kind::table:
      os << "table(" << table_->z.size() << " rows on [" << table_->z.front() << ", "
         << table_->z.back() << "])";
      break;
  }
  return os.str();
}

Coupling read_coupling_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open coupling table " + path.string());
  std::vector<double> z, g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      if (lineno == 1 && z.empty()) continue;  // header
      throw InvalidArgument("malformed coupling table row " + std::to_string(lineno));
    }
    z.push_back(a);
    g.push_back(b);
  }
  return Coupling::table(std::move(z), std::move(g));
}

void write_coupling_csv(const Coupling& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write coupling table " + path.string());
  out << "z,g\n" << std::setprecision(17);
  const auto& z = table.table_z();
  const auto& g = table.table_g();
  for (std::size_t i = 0; i < z.size(); ++i) out << z[i] << ',' << g[i] << '\n';
}

}  // namespace mfgdc

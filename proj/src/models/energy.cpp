#include "mfgdc/models/energy.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

double to_number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("bad number '" + s + "' in energy spec");
  }
  if (pos != s.size()) throw InvalidArgument("bad number '" + s + "' in energy spec");
  return v;
}

}  // namespace

InternalEnergy InternalEnergy::power(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidArgument("power energy needs q >= 1");
  InternalEnergy e;
  e.kind_ = Kind::power;
  e.q_ = q;
  return e;
}

InternalEnergy InternalEnergy::scaled_power(double coef, double exponent) {
  if (!std::isfinite(coef) || !std::isfinite(exponent) || !(exponent >= 0.0)) {
    throw InvalidArgument("scaled_power energy needs finite coefficient and exponent >= 0");
  }
  InternalEnergy e;
  e.kind_ = Kind::scaled_power;
  e.a_ = coef;
  e.q_ = exponent;
  return e;
}

InternalEnergy InternalEnergy::entropy() {
  InternalEnergy e;
  e.kind_ = Kind::entropy;
  return e;
}

InternalEnergy InternalEnergy::shifted_inverse(double q, double eps) {
  if (!(q > 0.0) || !(eps > 0.0)) throw InvalidArgument("shifted_inverse energy needs q > 0 and eps > 0");
  InternalEnergy e;
  e.kind_ = Kind::shifted_inverse;
  e.q_ = q;
  e.eps_ = eps;
  return e;
}

InternalEnergy InternalEnergy::custom(Fn u, Fn du, std::string name) {
  if (!u || !du) throw InvalidArgument("custom energy needs U and U'");
  InternalEnergy e;
  e.kind_ = Kind::custom;
  e.u_ = std::move(u);
  e.du_ = std::move(du);
  e.name_ = std::move(name);
  return e;
}

InternalEnergy InternalEnergy::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw InvalidArgument("empty energy spec");
  const std::string& kind = parts[0];
  if (kind == "power" && parts.size() == 2) return power(to_number(parts[1]));
  if (kind == "scaled_power" && parts.size() == 3) return scaled_power(to_number(parts[1]), to_number(parts[2]));
  if (kind == "entropy" && parts.size() == 1) return entropy();
  if (kind == "shifted_inverse" && parts.size() == 3)
    return shifted_inverse(to_number(parts[1]), to_number(parts[2]));
  throw InvalidArgument("unknown energy spec '" + text +
                        "' (expected power:Q, scaled_power:A:E, entropy, shifted_inverse:Q:EPS)");
}

std::string InternalEnergy::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::power:
      os << "power:" << q_;
      break;
    case Kind::scaled_power:
      os << "scaled_power:" << a_ << ':' << q_;
      break;
    case Kind::entropy:
      os << "entropy";
      break;
    case Kind::shifted_inverse:
      os << "shifted_inverse:" << q_ << ':' << eps_;
      break;
    case Kind::custom:
      os << name_;
      break;
  }
  return os.str();
}

bool InternalEnergy::defined_at(double z) const noexcept {
  switch (kind_) {
    case Kind::shifted_inverse:
      return z + eps_ > 0.0;
    case Kind::custom:
      return std::isfinite(u_(z));
    default:
      return z >= 0.0;
  }
}

double InternalEnergy::U(double z) const {
  if (!defined_at(z)) throw InvalidArgument("internal energy undefined at z = " + std::to_string(z));
  switch (kind_) {
    case Kind::power:
      return std::pow(z, q_);
    case Kind::scaled_power:
      return a_ * std::pow(z, q_);
    case Kind::entropy:
      return z > 0.0 ? z * std::log(z) : 0.0;
    case Kind::shifted_inverse:
      return std::pow(z + eps_, -q_);
    case Kind::custom:
      return u_(z);
  }
  return 0.0;
}

double InternalEnergy::dU(double z) const {
  switch (kind_) {
    case Kind::power:
      return q_ * std::pow(z, q_ - 1.0);
    case Kind::scaled_power:
      return a_ * q_ * std::pow(z, q_ - 1.0);
    case Kind::entropy:
      return std::log(z) + 1.0;
    case Kind::shifted_inverse:
      return -q_ * std::pow(z + eps_, -q_ - 1.0);
    case Kind::custom:
      return du_(z);
  }
  return 0.0;
}

double InternalEnergy::pressure(double z) const {
  if (!(z > 0.0)) throw InvalidArgument("pressure needs z > 0");
  switch (kind_) {
    case Kind::power:
      return (q_ - 1.0) * std::pow(z, q_);
    case Kind::scaled_power:
      return a_ * (q_ - 1.0) * std::pow(z, q_);
    case Kind::entropy:
      return z;
    default:
      return dU(z) * z - U(z);
  }
}

double InternalEnergy::dpressure(double z) const {
  if (!(z > 0.0)) throw InvalidArgument("pressure needs z > 0");
  switch (kind_) {
    case Kind::power:
      return q_ * (q_ - 1.0) * std::pow(z, q_ - 1.0);
    case Kind::scaled_power:
      return a_ * q_ * (q_ - 1.0) * std::pow(z, q_ - 1.0);
    case Kind::entropy:
      return 1.0;
    case Kind::shifted_inverse:
      return q_ * (q_ + 1.0) * std::pow(z + eps_, -q_ - 2.0) * z;
    case Kind::custom: {
      const double step = 1e-6 * z;
      return (pressure(z + step) - pressure(z - step)) / (2.0 * step);
    }
  }
  return 0.0;
}

}  // namespace mfgdc

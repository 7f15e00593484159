#include "mfgdc/core/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

constexpr std::array<char, 4> kFieldMagic{'M', 'F', 'G', '1'};
constexpr std::array<char, 4> kTrajectoryMagic{'M', 'F', 'G', 'T'};
// Largest payload accepted by the reader (2^32 samples).
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 32;

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

void get_bytes(std::istream& in, char* dst, std::size_t count, const char* what) {
  in.read(dst, static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw FormatError(FormatError::Kind::truncated, std::string("truncated payload while reading ") + what);
  }
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes;
  get_bytes(in, reinterpret_cast<char*>(bytes.data()), bytes.size(), what);
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

double get_f64(std::istream& in, const char* what) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, what));
}

void check_magic(std::istream& in, const std::array<char, 4>& expected) {
  std::array<char, 4> magic;
  get_bytes(in, magic.data(), magic.size(), "magic");
  if (magic != expected) throw FormatError(FormatError::Kind::bad_magic, "bad magic");
}

void check_version(std::istream& in) {
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kFormatVersion) {
    throw FormatError(FormatError::Kind::version_mismatch,
                      "version mismatch: file has " + std::to_string(version) + ", expected " +
                          std::to_string(kFormatVersion));
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::io, "cannot open " + path.string());
  return in;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& f) {
  out.write(kFieldMagic.data(), kFieldMagic.size());
  put_le<std::uint32_t>(out, kFormatVersion);
  const auto& g = f.grid();
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put_le<std::uint64_t>(out, g.n());
  for (double v : f.values()) put_f64(out, v);
  if (!out) throw FormatError(FormatError::Kind::io, "write failed");
}

ScalarField read_field(std::istream& in) {
  check_magic(in, kFieldMagic);
  check_version(in);
  const auto ndim = get_le<std::uint8_t>(in, "ndim");
  if (ndim != 1 && ndim != 2) {
    throw FormatError(FormatError::Kind::invalid_shape, "unsupported ndim " + std::to_string(ndim));
  }
  std::array<std::uint64_t, 2> shape{0, 0};
  std::uint64_t total = 1;
  for (std::size_t a = 0; a < ndim; ++a) {
    shape[a] = get_le<std::uint64_t>(in, "shape");
    if (shape[a] != 0 && total > kMaxSamples / shape[a]) {
      throw FormatError(FormatError::Kind::shape_overflow, "shape overflow");
    }
    total *= shape[a];
  }
  if (total > kMaxSamples) throw FormatError(FormatError::Kind::shape_overflow, "shape overflow");
  if (ndim == 2 && shape[0] != shape[1]) {
    throw FormatError(FormatError::Kind::invalid_shape, "non-square 2D field");
  }
  std::optional<TorusGrid> grid;
  try {
    grid.emplace(static_cast<int>(ndim), static_cast<std::size_t>(shape[0]));
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatError::Kind::invalid_shape, e.what());
  }
  std::vector<double> values(static_cast<std::size_t>(total));
  for (auto& v : values) v = get_f64(in, "field values");
  try {
    return ScalarField(*grid, std::move(values));
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatError::Kind::invalid_shape, e.what());
  }
}

void write_field(const ScalarField& f, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_field(out, f);
}

ScalarField read_field(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_field(in);
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out.write(kTrajectoryMagic.data(), kTrajectoryMagic.size());
  put_le<std::uint32_t>(out, kFormatVersion);
  put_f64(out, traj.horizon);
  put_le<std::uint64_t>(out, traj.m.size());
  std::uint8_t flags = 0;
  if (traj.u) flags |= 1u;
  if (traj.w) flags |= 2u;
  put_le<std::uint8_t>(out, flags);
  for (const auto& s : traj.m) write_field(out, s);
  if (traj.u)
    for (const auto& s : *traj.u) write_field(out, s);
  if (traj.w)
    for (const auto& v : *traj.w)
      for (const auto& c : v.components()) write_field(out, c);
}

Trajectory read_trajectory(std::istream& in) {
  check_magic(in, kTrajectoryMagic);
  check_version(in);
  const double horizon = get_f64(in, "horizon");
  const auto slices = get_le<std::uint64_t>(in, "slice count");
  if (slices > kMaxSamples) throw FormatError(FormatError::Kind::shape_overflow, "shape overflow");
  if (slices < 3) throw FormatError(FormatError::Kind::invalid_shape, "trajectory needs K >= 2");
  const auto flags = get_le<std::uint8_t>(in, "flags");
  if (flags > 3u) throw FormatError(FormatError::Kind::invalid_shape, "unknown trajectory flags");

  std::vector<ScalarField> m;
  m.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(slices, 4096)));
  for (std::uint64_t k = 0; k < slices; ++k) m.push_back(read_field(in));
  const TorusGrid grid = m.front().grid();
  auto same_grid = [&](const ScalarField& f) {
    if (!(f.grid() == grid)) throw FormatError(FormatError::Kind::invalid_shape, "slices on different grids");
  };
  for (const auto& s : m) same_grid(s);

  Trajectory traj{grid, horizon, std::move(m), std::nullopt, std::nullopt};
  if (flags & 1u) {
    std::vector<ScalarField> u;
    for (std::uint64_t k = 0; k < slices; ++k) {
      u.push_back(read_field(in));
      same_grid(u.back());
    }
    traj.u = std::move(u);
  }
  if (flags & 2u) {
    std::vector<VectorField> w;
    for (std::uint64_t k = 0; k < slices; ++k) {
      std::vector<ScalarField> comps;
      for (int a = 0; a < grid.dim(); ++a) {
        comps.push_back(read_field(in));
        same_grid(comps.back());
      }
      w.emplace_back(grid, std::move(comps));
    }
    traj.w = std::move(w);
  }
  return traj;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_trajectory(out, traj);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trajectory(in);
}

}  // namespace mfgdc

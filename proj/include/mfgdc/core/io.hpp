#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "mfgdc/core/field.hpp"
#include "mfgdc/core/trajectory.hpp"

namespace mfgdc {

// Binary formats, little-endian throughout.
//
// Field record:      "MFG1" | u32 version=1 | u8 ndim | u64 shape[ndim] | f64 values (row-major)
// Trajectory record: "MFGT" | u32 version=1 | f64 T | u64 K+1 | u8 flags
//                    | K+1 field records for m
//                    | K+1 field records for u            (flags bit 0)
//                    | (K+1)*dim field records for w      (flags bit 1, slice-major,
//                                                          components in axis order)
//
// Readers throw FormatError with a distinct Kind for each failure.

inline constexpr std::uint32_t kFormatVersion = 1;

void write_field(std::ostream& out, const ScalarField& f);
ScalarField read_field(std::istream& in);
void write_field(const ScalarField& f, const std::filesystem::path& path);
ScalarField read_field(const std::filesystem::path& path);

void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace mfgdc

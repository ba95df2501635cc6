#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qgrom/fom.hpp"
#include "qgrom/lstm.hpp"
#include "qgrom/pod.hpp"
#include "qgrom/rom_gp.hpp"

// Binary container shared by every persisted artifact:
//
//   "QGRM" | u32 version | u32 kind | payload | u64 checksum
//
// All integers are little-endian u32/u64, all reals little-endian IEEE-754
// binary64. The checksum is the sum of the payload bytes modulo 2^64.
namespace qgrom::io {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class PayloadKind : std::uint32_t {
  snapshots = 1,
  basis = 2,
  model = 3,
  trajectory = 4,
  tensors = 5,
};

void write_snapshots(const std::filesystem::path& path, const SnapshotSet& set);
SnapshotSet read_snapshots(const std::filesystem::path& path);

void write_basis(const std::filesystem::path& path, const PodBasis& basis);
PodBasis read_basis(const std::filesystem::path& path);

void write_model(const std::filesystem::path& path, const lstm::LstmModel& model);
lstm::LstmModel read_model(const std::filesystem::path& path);

void write_trajectory(const std::filesystem::path& path, const RomTrajectory& traj);
RomTrajectory read_trajectory(const std::filesystem::path& path);

void write_tensors(const std::filesystem::path& path, const GalerkinTensors& tensors);
GalerkinTensors read_tensors(const std::filesystem::path& path);

/// Kind stored in a file header (validates magic and version only).
PayloadKind peek_kind(const std::filesystem::path& path);

}  // namespace qgrom::io

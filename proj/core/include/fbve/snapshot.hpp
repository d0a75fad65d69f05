/// @file snapshot.hpp
/// @brief Binary snapshot files.
///
/// Layout:
///   8 bytes   magic "FBVESNP1"
///   8 bytes   header length H, unsigned little-endian
///   H bytes   UTF-8 JSON header
///   payload   little-endian IEEE-754 float64, fields in header order, each
///             stored (component, i, j) with j fastest
///
/// Fields are `displacement` (eta - x, 2 components), `velocity` (2) and
/// `rho0` (1). The header carries grid dims, t, field names, endianness,
/// the config hash and the FNV-1a 64 checksum of the payload bytes.
#pragma once

#include <cstdint>
#include <string>

#include "fbve/state.hpp"

namespace fbve::io {

struct Snapshot {
  FlowState state;
  ScalarField rho0;
  /// Resolved config JSON; empty if the writer had none.
  std::string config_json;
  std::uint64_t config_hash = 0;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
/// Throws CorruptFileError on a bad magic, header, length or checksum.
Snapshot read_snapshot(const std::string& path);

std::string encode_snapshot(const Snapshot& snap);
Snapshot decode_snapshot(const std::string& bytes);

}  // namespace fbve::io

#pragma once

#include <string>

#include "plankit/control.hpp"

namespace plankit {

// Control tensor file ("WVRC"):
//   bytes 0..3   magic "WVRC"
//   u32 LE       format_version = 1
//   u32 LE       channel count D
//   u32 LE       frame count T
//   D*T f32 LE   values, channel-major (channel 0 frames 0..T-1, then channel 1, ...)
// Writes are bit-exact: encoding the same plan twice produces identical files.
void write_control_file(const ControlTensor& ctrl, const std::string& path);
ControlTensor read_control_file(const std::string& path);

// Tiled tensor file ("WVRT"): same header plus a u32 bin count F between D
// and T, then D*F*T values in plane-major order.
void write_tiled_file(const TiledTensor& tiled, const std::string& path);
TiledTensor read_tiled_file(const std::string& path);

inline constexpr std::uint32_t kControlFormatVersion = 1;

} // namespace plankit

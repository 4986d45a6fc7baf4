// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "qilab/camera.hpp"
#include "qilab/grid.hpp"

namespace qilab {

// 16-bit binary PGM (P5, maxval 65535, big-endian samples).
void write_pgm16(const std::string& path, int width, int height,
                 std::span<const std::uint16_t> data);
Frame read_pgm16(const std::string& path);

// Frame + JSON sidecar {seed, config_hash, exposure}.
void write_frame(const std::string& path_pgm, const Frame& frame,
                 std::uint64_t config_hash);

// Scalar field scaled to full 16-bit range.
void write_scalar_pgm(const std::string& path, const ScalarField& f);

// Complex field as raw little-endian float64 planar (re then im) with a
// JSON sidecar {nx, ny, extent, waist}.
void write_complex_field(const std::string& path_raw, const ComplexField& f,
                         double waist);
ComplexField read_complex_field(const std::string& path_raw);

}  // namespace qilab

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "phaseprior/grid.hpp"

namespace phaseprior {

/// Reads an 8- or 16-bit grayscale PGM (P2/P5) or a PNG (colour is converted
/// to gray) into [0,1].
RealPlane load_grayscale(const std::filesystem::path& path);

/// Writes [0,1] values as an 8-bit binary PGM (values are clipped and rounded).
void save_pgm(const std::filesystem::path& path, const RealPlane& p);

/// Central height x width window. A zero size keeps that dimension whole.
RealPlane center_crop(const RealPlane& p, std::size_t height, std::size_t width);

/// FNV-1a over the bit patterns of the plane values and its shape.
std::uint64_t plane_hash(const RealPlane& p);
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace phaseprior

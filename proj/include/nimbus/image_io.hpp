#pragma once

#include <filesystem>

#include "nimbus/luminance.hpp"

namespace nimbus {

/// Decodes a PNG or JPEG file into an RGB frame stamped with `timestamp`.
/// Throws InputError if the file cannot be decoded.
SkyImage read_image(const std::filesystem::path& path, Timestamp timestamp);

/// Writes `image` losslessly as PNG.
void write_png(const std::filesystem::path& path, const SkyImage& image);

}  // namespace nimbus

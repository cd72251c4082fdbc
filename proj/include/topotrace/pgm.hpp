#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "topotrace/grid.hpp"

namespace topotrace {

// Binary PGM (P5), 8-bit, maxval 255. A probability is byte / 255; a mask
// pixel is true when its byte is >= 128 and is written as 0 or 255.

using ByteImage = Grid<std::uint8_t>;

ByteImage read_pgm(std::istream& in);
ByteImage read_pgm(const std::filesystem::path& path);
void write_pgm(std::ostream& out, const ByteImage& image);

ProbabilityMap bytes_to_probability(const ByteImage& image);
BinaryMask bytes_to_mask(const ByteImage& image);
ByteImage probability_to_bytes(const ProbabilityMap& map);
ByteImage mask_to_bytes(const BinaryMask& mask);

ProbabilityMap read_probability_pgm(const std::filesystem::path& path);
BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_probability_pgm(const std::filesystem::path& path, const ProbabilityMap& map);
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);

/// RGB image, three bytes per pixel, written as binary PPM (P6).
struct RgbImage {
    Grid<std::uint8_t> r, g, b;
};
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

/// Writes `contents` to a temporary sibling of `path` and renames it into
/// place. The parent directory must exist.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace topotrace

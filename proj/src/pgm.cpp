#include "topotrace/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "topotrace/error.hpp"

namespace topotrace {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
    std::string token;
    for (;;) {
        const int ch = in.get();
        if (ch == EOF) break;
        if (ch == '#') {
            std::string ignored;
            std::getline(in, ignored);
            if (!token.empty()) break;
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    return token;
}

int header_int(std::istream& in, const char* what) {
    const auto token = header_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("PGM: bad ") + what + " '" + token + "'");
    }
}

}  // namespace

ByteImage read_pgm(std::istream& in) {
    if (header_token(in) != "P5") throw FormatError("PGM: expected binary P5 magic");
    const int width = header_int(in, "width");
    const int height = header_int(in, "height");
    const int maxval = header_int(in, "maxval");
    if (width <= 0 || height <= 0) throw FormatError("PGM: dimensions must be positive");
    if (maxval != 255) throw FormatError("PGM: only maxval 255 is supported");
    ByteImage image(width, height);
    auto data = image.values();
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size())) throw FormatError("PGM: truncated pixel data");
    return image;
}

ByteImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return read_pgm(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_pgm(std::ostream& out, const ByteImage& image) {
    out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
    const auto data = image.values();
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

ProbabilityMap bytes_to_probability(const ByteImage& image) {
    ProbabilityMap out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) out.values()[i] = image.values()[i] / 255.0;
    return out;
}

BinaryMask bytes_to_mask(const ByteImage& image) {
    BinaryMask out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) out.values()[i] = image.values()[i] >= 128;
    return out;
}

ByteImage probability_to_bytes(const ProbabilityMap& map) {
    ByteImage out(map.width(), map.height());
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double v = std::clamp(map.values()[i], 0.0, 1.0);
        out.values()[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return out;
}

ByteImage mask_to_bytes(const BinaryMask& mask) {
    ByteImage out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) out.values()[i] = mask.values()[i] ? 255 : 0;
    return out;
}

ProbabilityMap read_probability_pgm(const std::filesystem::path& path) {
    return bytes_to_probability(read_pgm(path));
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) { return bytes_to_mask(read_pgm(path)); }

void write_probability_pgm(const std::filesystem::path& path, const ProbabilityMap& map) {
    std::ostringstream out;
    write_pgm(out, probability_to_bytes(map));
    write_file_atomic(path, out.str());
}

void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
    std::ostringstream out;
    write_pgm(out, mask_to_bytes(mask));
    write_file_atomic(path, out.str());
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
    std::ostringstream out;
    out << "P6\n" << image.r.width() << " " << image.r.height() << "\n255\n";
    for (std::size_t i = 0; i < image.r.size(); ++i) {
        out.put(static_cast<char>(image.r.values()[i]));
        out.put(static_cast<char>(image.g.values()[i]));
        out.put(static_cast<char>(image.b.values()[i]));
    }
    write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw InvalidArgument("output directory does not exist: " + parent.string());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace topotrace

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <string>
#include <vector>

namespace topotrace {

/// Integer pixel location. Ordering is row-major (row, then col), which is
/// the tie-break order used throughout the library.
struct PixelCoord {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

using Polyline = std::vector<PixelCoord>;

inline int chebyshev(PixelCoord a, PixelCoord b) {
    return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

inline long squared_distance(PixelCoord a, PixelCoord b) {
    const long dr = a.row - b.row;
    const long dc = a.col - b.col;
    return dr * dr + dc * dc;
}

inline double euclidean(PixelCoord a, PixelCoord b) {
    return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

/// Sum of Euclidean step lengths along a polyline.
inline double polyline_length(const Polyline& line) {
    double total = 0.0;
    for (std::size_t i = 1; i < line.size(); ++i) total += euclidean(line[i - 1], line[i]);
    return total;
}

inline std::string to_string(PixelCoord p) {
    return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

/// Inclusive axis-aligned pixel rectangle.
struct Window {
    int row0 = 0;
    int col0 = 0;
    int row1 = -1;
    int col1 = -1;

    bool empty() const { return row1 < row0 || col1 < col0; }
    int height() const { return empty() ? 0 : row1 - row0 + 1; }
    int width() const { return empty() ? 0 : col1 - col0 + 1; }

    bool contains(PixelCoord p) const {
        return p.row >= row0 && p.row <= row1 && p.col >= col0 && p.col <= col1;
    }

    bool on_perimeter(PixelCoord p) const {
        return contains(p) && (p.row == row0 || p.row == row1 || p.col == col0 || p.col == col1);
    }

    /// Square of Chebyshev radius `half` around `center`, clipped to a
    /// width x height image.
    static Window around(PixelCoord center, int half, int width, int height) {
        return Window{std::max(0, center.row - half), std::max(0, center.col - half),
                      std::min(height - 1, center.row + half), std::min(width - 1, center.col + half)};
    }

    /// Bounding box of two points dilated by `margin`, clipped to the image.
    static Window spanning(PixelCoord a, PixelCoord b, int margin, int width, int height) {
        return Window{std::max(0, std::min(a.row, b.row) - margin),
                      std::max(0, std::min(a.col, b.col) - margin),
                      std::min(height - 1, std::max(a.row, b.row) + margin),
                      std::min(width - 1, std::max(a.col, b.col) + margin)};
    }

    friend bool operator==(const Window&, const Window&) = default;
};

}  // namespace topotrace

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "topotrace/error.hpp"
#include "topotrace/geometry.hpp"

namespace topotrace {

/// Dense row-major 2-D grid.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width < 0 || height < 0) throw InvalidArgument("grid dimensions must be non-negative");
        values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    bool contains(PixelCoord p) const {
        return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
    }
    bool contains(int row, int col) const { return contains(PixelCoord{row, col}); }

    template <typename U>
    bool same_shape(const Grid<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    Window bounds() const { return Window{0, 0, height_ - 1, width_ - 1}; }

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }
    PixelCoord coord(std::size_t index) const {
        return PixelCoord{static_cast<int>(index / static_cast<std::size_t>(width_)),
                          static_cast<int>(index % static_cast<std::size_t>(width_))};
    }

    T& operator()(int row, int col) { return values_[index(row, col)]; }
    const T& operator()(int row, int col) const { return values_[index(row, col)]; }
    T& operator[](PixelCoord p) { return values_[index(p.row, p.col)]; }
    const T& operator[](PixelCoord p) const { return values_[index(p.row, p.col)]; }

    /// Value at (row, col), or `outside` when the location is out of bounds.
    T get_or(int row, int col, T outside) const {
        return contains(row, col) ? (*this)(row, col) : outside;
    }

    std::span<T> values() { return values_; }
    std::span<const T> values() const { return values_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> values_;
};

/// Foreground probabilities, each in [0, 1].
using ProbabilityMap = Grid<double>;

/// Boolean raster stored one byte per pixel (0 or 1).
using BinaryMask = Grid<std::uint8_t>;

inline std::size_t count_true(const BinaryMask& mask) {
    std::size_t n = 0;
    for (auto v : mask.values()) n += v != 0;
    return n;
}

/// All true pixels in row-major order.
inline std::vector<PixelCoord> true_pixels(const BinaryMask& mask) {
    std::vector<PixelCoord> out;
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            if (mask(r, c)) out.push_back({r, c});
    return out;
}

}  // namespace topotrace

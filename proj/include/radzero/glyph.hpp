#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radzero/dictionary.hpp"

namespace radzero {

/// Row-major dense image; rows index y (downward), columns index x (rightward).
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Raster = Image<std::uint8_t>;

inline constexpr std::uint8_t kBackground = 255;
inline constexpr std::uint8_t kInk = 0;
inline constexpr int kDefaultThreshold = 128;

/// Grayscale glyph, ink is dark. Never empty.
class Glyph {
public:
    Glyph(int width, int height, std::uint8_t fill = kBackground);
    explicit Glyph(Raster pixels);

    int width() const noexcept { return static_cast<int>(pixels_.cols()); }
    int height() const noexcept { return static_cast<int>(pixels_.rows()); }

    std::uint8_t at(int x, int y) const { return pixels_(y, x); }
    std::uint8_t& at(int x, int y) { return pixels_(y, x); }

    const Raster& pixels() const noexcept { return pixels_; }
    Raster& pixels() noexcept { return pixels_; }

    friend bool operator==(const Glyph& a, const Glyph& b) {
        return a.pixels_.rows() == b.pixels_.rows() && a.pixels_.cols() == b.pixels_.cols() &&
               (a.pixels_ == b.pixels_).all();
    }

private:
    Raster pixels_;
};

/// Half-open pixel rectangle [x1,x2) x [y1,y2).
struct Box {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    int width() const noexcept { return x2 - x1; }
    int height() const noexcept { return y2 - y1; }
    long long area() const noexcept {
        return valid() ? static_cast<long long>(width()) * height() : 0;
    }
    bool valid() const noexcept { return x1 < x2 && y1 < y2; }
    bool within(int w, int h) const noexcept {
        return valid() && x1 >= 0 && y1 >= 0 && x2 <= w && y2 <= h;
    }
    Box translated(int dx, int dy) const noexcept { return {x1 + dx, y1 + dy, x2 + dx, y2 + dy}; }

    friend bool operator==(const Box&, const Box&) = default;
};

double iou(const Box& a, const Box& b);

inline bool is_ink(std::uint8_t v, int threshold = kDefaultThreshold) { return v < threshold; }

std::optional<Box> find_ink_box(const Glyph& g, int threshold = kDefaultThreshold);
std::optional<Box> find_ink_box(const Glyph& g, const Box& region, int threshold = kDefaultThreshold);

/// Tightest box around all pixels darker than `threshold`. Throws EmptyGlyph.
Box ink_bounding_box(const Glyph& g, int threshold = kDefaultThreshold);

bool has_ink(const Glyph& g, int threshold = kDefaultThreshold);

Glyph crop(const Glyph& g, const Box& box);

/// Composites `g` onto `canvas` with its top-left at (x, y), keeping the darker
/// pixel. `g` must lie inside the canvas.
Glyph paste(const Glyph& canvas, const Glyph& g, int x, int y);

template <typename Scalar>
Image<Scalar> resize_nearest(const Image<Scalar>& src, Eigen::Index rows, Eigen::Index cols) {
    Image<Scalar> out(rows, cols);
    const Eigen::Index sr = src.rows(), sc = src.cols();
    for (Eigen::Index y = 0; y < rows; ++y) {
        const Eigen::Index yy = std::min<Eigen::Index>(((2 * y + 1) * sr) / (2 * rows), sr - 1);
        for (Eigen::Index x = 0; x < cols; ++x) {
            const Eigen::Index xx = std::min<Eigen::Index>(((2 * x + 1) * sc) / (2 * cols), sc - 1);
            out(y, x) = src(yy, xx);
        }
    }
    return out;
}

Glyph resize(const Glyph& g, int width, int height);

/// Nearest-neighbour zoom; output is round(w*factor) x round(h*factor).
Glyph scale(const Glyph& g, double factor);

/// Rotation about the glyph centre, same output size; uncovered pixels get `background`.
Glyph rotate(const Glyph& g, double degrees, std::uint8_t background = kBackground);

/// Horizontal shear x' = x + factor * (y - cy) about the centre, same output size.
Glyph shear(const Glyph& g, double factor, std::uint8_t background = kBackground);

Glyph pad(const Glyph& g, int left, int top, int right, int bottom,
          std::uint8_t background = kBackground);
inline Glyph pad(const Glyph& g, int margin, std::uint8_t background = kBackground) {
    return pad(g, margin, margin, margin, margin, background);
}

struct RadicalAnnotation {
    RadicalId label;
    Box box;

    friend bool operator==(const RadicalAnnotation&, const RadicalAnnotation&) = default;
};

/// A glyph with character-level (C_L) and radical-level (R_L, R_C, S_L) labels.
struct AnnotatedImage {
    Glyph glyph{1, 1};
    CharacterLabel character_label;
    StructureKind structure_label;
    std::vector<RadicalAnnotation> radicals;

    friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

/// Empty when the record is consistent; otherwise one message per problem.
std::vector<std::string> check_annotation(const AnnotatedImage& image);

}  // namespace radzero

#include "radzero/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radzero/error.hpp"

namespace radzero {

Glyph::Glyph(int width, int height, std::uint8_t fill) {
    if (width < 1 || height < 1)
        throw InvalidParams("glyph", "glyph size must be at least 1x1, got " + std::to_string(width) +
                                         "x" + std::to_string(height));
    pixels_ = Raster::Constant(height, width, fill);
}

Glyph::Glyph(Raster pixels) : pixels_(std::move(pixels)) {
    if (pixels_.rows() < 1 || pixels_.cols() < 1)
        throw InvalidParams("glyph", "glyph raster must be non-empty");
}

double iou(const Box& a, const Box& b) {
    const Box inter{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
                    std::min(a.y2, b.y2)};
    const long long i = inter.area();
    const long long u = a.area() + b.area() - i;
    return u > 0 ? static_cast<double>(i) / static_cast<double>(u) : 0.0;
}

std::optional<Box> find_ink_box(const Glyph& g, const Box& region, int threshold) {
    const Box r{std::max(region.x1, 0), std::max(region.y1, 0), std::min(region.x2, g.width()),
                std::min(region.y2, g.height())};
    if (!r.valid()) return std::nullopt;
    Box box{r.x2, r.y2, r.x1, r.y1};
    bool any = false;
    for (int y = r.y1; y < r.y2; ++y) {
        for (int x = r.x1; x < r.x2; ++x) {
            if (!is_ink(g.at(x, y), threshold)) continue;
            any = true;
            box.x1 = std::min(box.x1, x);
            box.y1 = std::min(box.y1, y);
            box.x2 = std::max(box.x2, x + 1);
            box.y2 = std::max(box.y2, y + 1);
        }
    }
    return any ? std::optional<Box>(box) : std::nullopt;
}

std::optional<Box> find_ink_box(const Glyph& g, int threshold) {
    return find_ink_box(g, Box{0, 0, g.width(), g.height()}, threshold);
}

Box ink_bounding_box(const Glyph& g, int threshold) {
    if (auto box = find_ink_box(g, threshold)) return *box;
    throw EmptyGlyph("glyph", "glyph contains no ink below threshold " + std::to_string(threshold));
}

bool has_ink(const Glyph& g, int threshold) {
    return (g.pixels().cast<int>() < threshold).any();
}

Glyph crop(const Glyph& g, const Box& box) {
    if (!box.within(g.width(), g.height()))
        throw InvalidParams("glyph", "crop box outside glyph bounds");
    return Glyph(Raster(g.pixels().block(box.y1, box.x1, box.height(), box.width())));
}

Glyph paste(const Glyph& canvas, const Glyph& g, int x, int y) {
    if (x < 0 || y < 0 || x + g.width() > canvas.width() || y + g.height() > canvas.height())
        throw InvalidParams("glyph", "pasted glyph does not fit inside the canvas");
    Glyph out = canvas;
    auto region = out.pixels().block(y, x, g.height(), g.width());
    region = region.min(g.pixels());
    return out;
}

Glyph resize(const Glyph& g, int width, int height) {
    if (width < 1 || height < 1) throw InvalidParams("glyph", "resize target must be at least 1x1");
    return Glyph(resize_nearest(g.pixels(), height, width));
}

Glyph scale(const Glyph& g, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw InvalidParams("glyph", "scale factor must be positive");
    const int w = static_cast<int>(std::lround(g.width() * factor));
    const int h = static_cast<int>(std::lround(g.height() * factor));
    if (w < 1 || h < 1) throw InvalidParams("glyph", "scale factor collapses the glyph");
    if (w == g.width() && h == g.height()) return g;
    return resize(g, w, h);
}

namespace {

// Inverse-maps every output pixel centre through `to_source` and samples nearest.
template <typename Map>
Glyph remap(const Glyph& g, std::uint8_t background, Map to_source) {
    Glyph out(g.width(), g.height(), background);
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            const auto [sx, sy] = to_source(x + 0.5, y + 0.5);
            const long fx = static_cast<long>(std::floor(sx));
            const long fy = static_cast<long>(std::floor(sy));
            if (fx >= 0 && fy >= 0 && fx < g.width() && fy < g.height())
                out.at(x, y) = g.at(static_cast<int>(fx), static_cast<int>(fy));
        }
    }
    return out;
}

}  // namespace

Glyph rotate(const Glyph& g, double degrees, std::uint8_t background) {
    if (!std::isfinite(degrees)) throw InvalidParams("glyph", "rotation angle must be finite");
    const double d = std::fmod(degrees, 360.0);
    if (d == 0.0) return g;
    const double rad = d * std::numbers::pi / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    const double cx = g.width() / 2.0, cy = g.height() / 2.0;
    return remap(g, background, [&](double x, double y) {
        const double dx = x - cx, dy = y - cy;
        return std::pair{cx + c * dx + s * dy, cy - s * dx + c * dy};
    });
}

Glyph shear(const Glyph& g, double factor, std::uint8_t background) {
    if (!std::isfinite(factor)) throw InvalidParams("glyph", "shear factor must be finite");
    if (factor == 0.0) return g;
    const double cy = g.height() / 2.0;
    return remap(g, background, [&](double x, double y) { return std::pair{x - factor * (y - cy), y}; });
}

Glyph pad(const Glyph& g, int left, int top, int right, int bottom, std::uint8_t background) {
    if (left < 0 || top < 0 || right < 0 || bottom < 0)
        throw InvalidParams("glyph", "padding must be non-negative");
    Glyph out(g.width() + left + right, g.height() + top + bottom, background);
    out.pixels().block(top, left, g.height(), g.width()) = g.pixels();
    return out;
}

std::vector<std::string> check_annotation(const AnnotatedImage& image) {
    std::vector<std::string> problems;
    const bool single = image.structure_label == kSingle;
    if (image.radicals.empty()) problems.push_back("no radicals annotated");
    if (single != (image.radicals.size() == 1))
        problems.push_back("structure Single must carry exactly one radical");
    for (std::size_t i = 0; i < image.radicals.size(); ++i) {
        const auto& b = image.radicals[i].box;
        if (!b.within(image.glyph.width(), image.glyph.height()))
            problems.push_back("radical " + std::to_string(i) + " box outside image bounds");
        if (image.radicals[i].label.empty())
            problems.push_back("radical " + std::to_string(i) + " has an empty label");
    }
    return problems;
}

}  // namespace radzero

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "radzero/dictionary.hpp"
#include "radzero/glyph.hpp"

namespace radzero {

/// Slot rectangle as fractions of the canvas: (x1, y1, x2, y2).
using SlotRect = Eigen::Array4d;

struct StructureLayout {
    StructureKind kind;
    std::vector<SlotRect> slots;
    /// Surrounding kinds place an inner slot inside an outer one, so slots may overlap.
    bool surrounding = false;

    std::size_t slot_count() const noexcept { return slots.size(); }
};

/// Pixel rectangle covered by a normalized slot on a `width` x `height` canvas.
Box slot_box(const SlotRect& slot, int width, int height);

/// Slot indices sorted into reading order (top-to-bottom, then left-to-right).
std::vector<std::size_t> reading_order(const StructureLayout& layout);

/// Registry of layouts keyed by structure kind, plus the canvas size used for synthesis.
class LayoutSet {
public:
    LayoutSet() = default;
    LayoutSet(std::vector<StructureLayout> layouts, int canvas_width = 256, int canvas_height = 256);

    const StructureLayout& at(std::string_view kind) const;  // throws UnknownStructure
    const StructureLayout* find(std::string_view kind) const;
    const std::vector<StructureLayout>& layouts() const noexcept { return layouts_; }
    std::vector<StructureKind> kinds() const;

    /// Subset restricted to `kinds`, preserving this set's order.
    LayoutSet subset(const std::vector<StructureKind>& kinds) const;

    int canvas_width() const noexcept { return canvas_width_; }
    int canvas_height() const noexcept { return canvas_height_; }

private:
    std::vector<StructureLayout> layouts_;
    int canvas_width_ = 256;
    int canvas_height_ = 256;
};

/// Problems with one layout; empty when valid.
std::vector<std::string> validate_layout(const StructureLayout& layout);

/// Layouts referenced by `dict` that are missing or disagree on slot count.
std::vector<std::string> check_against(const LayoutSet& layouts, const Dictionary& dict);

LayoutSet layouts_from_json(const nlohmann::json& j);
nlohmann::json layouts_to_json(const LayoutSet& layouts);
LayoutSet load_layouts(const std::filesystem::path& path);

/// The built-in set of 14 structure layouts.
LayoutSet default_layouts();

struct StructureInfo {
    std::size_t num_radicals;
    std::vector<SlotRect> locations;
};

/// Number of radicals and their relative slot rectangles for `kind`.
StructureInfo get_structure(std::string_view kind, const LayoutSet& layouts);

}  // namespace radzero

#include "radzero/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radzero/error.hpp"
#include "radzero/image_io.hpp"

namespace radzero {

using nlohmann::json;

Box slot_box(const SlotRect& slot, int width, int height) {
    Box b{static_cast<int>(std::lround(slot[0] * width)), static_cast<int>(std::lround(slot[1] * height)),
          static_cast<int>(std::lround(slot[2] * width)), static_cast<int>(std::lround(slot[3] * height))};
    b.x2 = std::max(b.x2, b.x1 + 1);
    b.y2 = std::max(b.y2, b.y1 + 1);
    return b;
}

std::vector<std::size_t> reading_order(const StructureLayout& layout) {
    std::vector<std::size_t> order(layout.slots.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = layout.slots[a];
        const auto& rb = layout.slots[b];
        if (ra[1] != rb[1]) return ra[1] < rb[1];
        return ra[0] < rb[0];
    });
    return order;
}

LayoutSet::LayoutSet(std::vector<StructureLayout> layouts, int canvas_width, int canvas_height)
    : layouts_(std::move(layouts)), canvas_width_(canvas_width), canvas_height_(canvas_height) {
    if (canvas_width_ < 1 || canvas_height_ < 1)
        throw ValidationError("layout", "canvas size must be positive");
    if (layouts_.size() > kMaxStructureKinds)
        throw ValidationError("layout", std::to_string(layouts_.size()) + " layouts given, at most " +
                                            std::to_string(kMaxStructureKinds) + " structure kinds allowed");
    for (std::size_t i = 0; i < layouts_.size(); ++i) {
        const auto problems = validate_layout(layouts_[i]);
        if (!problems.empty())
            throw ValidationError("layout", "layout '" + layouts_[i].kind + "': " + problems.front());
        for (std::size_t j = 0; j < i; ++j) {
            if (layouts_[j].kind == layouts_[i].kind)
                throw ValidationError("layout", "layout '" + layouts_[i].kind + "' defined twice");
        }
    }
}

const StructureLayout* LayoutSet::find(std::string_view kind) const {
    const auto it = std::find_if(layouts_.begin(), layouts_.end(),
                                 [&](const StructureLayout& l) { return l.kind == kind; });
    return it == layouts_.end() ? nullptr : &*it;
}

const StructureLayout& LayoutSet::at(std::string_view kind) const {
    if (const auto* l = find(kind)) return *l;
    throw UnknownStructure("layout", "no layout registered for structure '" + std::string(kind) + "'");
}

std::vector<StructureKind> LayoutSet::kinds() const {
    std::vector<StructureKind> out;
    for (const auto& l : layouts_) out.push_back(l.kind);
    return out;
}

LayoutSet LayoutSet::subset(const std::vector<StructureKind>& kinds) const {
    std::vector<StructureLayout> out;
    for (const auto& l : layouts_) {
        if (std::find(kinds.begin(), kinds.end(), l.kind) != kinds.end()) out.push_back(l);
    }
    return LayoutSet(std::move(out), canvas_width_, canvas_height_);
}

std::vector<std::string> validate_layout(const StructureLayout& layout) {
    std::vector<std::string> out;
    if (layout.kind.empty()) out.push_back("empty structure kind");
    const bool single = layout.kind == kSingle;
    if (single && layout.slots.size() != 1) out.push_back("Single must have exactly one slot");
    if (!single && layout.slots.size() < 2) out.push_back("non-Single layouts need at least two slots");
    for (std::size_t i = 0; i < layout.slots.size(); ++i) {
        const auto& s = layout.slots[i];
        if ((s < 0.0).any() || (s > 1.0).any()) out.push_back("slot " + std::to_string(i) + " leaves [0,1]^2");
        if (!(s[0] < s[2] && s[1] < s[3])) out.push_back("slot " + std::to_string(i) + " is degenerate");
    }
    if (!layout.surrounding) {
        for (std::size_t i = 0; i < layout.slots.size(); ++i) {
            for (std::size_t j = i + 1; j < layout.slots.size(); ++j) {
                const auto& a = layout.slots[i];
                const auto& b = layout.slots[j];
                const double w = std::min(a[2], b[2]) - std::max(a[0], b[0]);
                const double h = std::min(a[3], b[3]) - std::max(a[1], b[1]);
                if (w > 1e-12 && h > 1e-12)
                    out.push_back("slots " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
            }
        }
    }
    return out;
}

std::vector<std::string> check_against(const LayoutSet& layouts, const Dictionary& dict) {
    std::vector<std::string> out;
    for (const auto& s : dict.structures()) {
        const auto* l = layouts.find(s.kind);
        if (!l) {
            out.push_back("structure '" + s.kind + "' has no layout");
        } else if (l->slot_count() != s.slot_count) {
            out.push_back("structure '" + s.kind + "' declares " + std::to_string(s.slot_count) +
                          " slots but its layout has " + std::to_string(l->slot_count()));
        }
    }
    return out;
}

LayoutSet layouts_from_json(const json& j) {
    try {
        int w = 256, h = 256;
        if (j.contains("canvas")) {
            w = j["canvas"].at(0).get<int>();
            h = j["canvas"].at(1).get<int>();
        }
        std::vector<StructureLayout> layouts;
        for (const auto& s : j.at("structures")) {
            StructureLayout l;
            l.kind = s.at("kind").get<std::string>();
            l.surrounding = s.value("surrounding", false);
            for (const auto& r : s.at("slots")) {
                if (!r.is_array() || r.size() != 4)
                    throw ParseError("layout", "slot of '" + l.kind + "' must be [x1,y1,x2,y2]");
                l.slots.emplace_back(r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                                     r[3].get<double>());
            }
            layouts.push_back(std::move(l));
        }
        return LayoutSet(std::move(layouts), w, h);
    } catch (const json::exception& e) {
        throw ParseError("layout", std::string("malformed layout file: ") + e.what());
    }
}

json layouts_to_json(const LayoutSet& layouts) {
    json structures = json::array();
    for (const auto& l : layouts.layouts()) {
        json slots = json::array();
        for (const auto& s : l.slots) slots.push_back({s[0], s[1], s[2], s[3]});
        json entry{{"kind", l.kind}, {"slots", std::move(slots)}};
        if (l.surrounding) entry["surrounding"] = true;
        structures.push_back(std::move(entry));
    }
    return {{"canvas", {layouts.canvas_width(), layouts.canvas_height()}}, {"structures", structures}};
}

LayoutSet load_layouts(const std::filesystem::path& path) { return layouts_from_json(read_json_file(path)); }

LayoutSet default_layouts() {
    auto rect = [](double x1, double y1, double x2, double y2) { return SlotRect(x1, y1, x2, y2); };
    auto plain = [](std::string kind, std::vector<SlotRect> slots) {
        return StructureLayout{std::move(kind), std::move(slots), false};
    };
    auto surround = [](std::string kind, std::vector<SlotRect> slots) {
        return StructureLayout{std::move(kind), std::move(slots), true};
    };
    const double third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
    return LayoutSet({
        plain("Single", {rect(0, 0, 1, 1)}),
        plain("UD", {rect(0, 0, 1, 0.5), rect(0, 0.5, 1, 1)}),
        plain("LR", {rect(0, 0, 0.5, 1), rect(0.5, 0, 1, 1)}),
        plain("UMD", {rect(0, 0, 1, third), rect(0, third, 1, two_thirds), rect(0, two_thirds, 1, 1)}),
        plain("LMR", {rect(0, 0, third, 1), rect(third, 0, two_thirds, 1), rect(two_thirds, 0, 1, 1)}),
        plain("Quad", {rect(0, 0, 0.5, 0.5), rect(0.5, 0, 1, 0.5), rect(0, 0.5, 0.5, 1), rect(0.5, 0.5, 1, 1)}),
        surround("SLR", {rect(0, 0, 1, 1), rect(0.3, 0.15, 0.7, 0.85)}),
        surround("SF", {rect(0, 0, 1, 1), rect(0.25, 0.25, 0.75, 0.75)}),
        surround("SU", {rect(0, 0, 1, 1), rect(0.25, 0.35, 0.75, 1)}),
        surround("SD", {rect(0, 0, 1, 1), rect(0.25, 0, 0.75, 0.65)}),
        surround("SL", {rect(0, 0, 1, 1), rect(0.35, 0.25, 1, 0.75)}),
        surround("SUL", {rect(0, 0, 1, 1), rect(0.35, 0.35, 1, 1)}),
        surround("SUR", {rect(0, 0, 1, 1), rect(0, 0.35, 0.65, 1)}),
        surround("SLL", {rect(0, 0, 1, 1), rect(0.35, 0, 1, 0.65)}),
    });
}

StructureInfo get_structure(std::string_view kind, const LayoutSet& layouts) {
    const auto& l = layouts.at(kind);
    return {l.slot_count(), l.slots};
}

}  // namespace radzero

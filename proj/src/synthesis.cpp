#include "radzero/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radzero/error.hpp"
#include "radzero/image_io.hpp"
#include "radzero/parallel.hpp"

namespace radzero {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw InvalidParams("synthesis", "Rng::index needs n > 0");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

std::uint64_t stream_seed(std::uint64_t master, std::string_view structure, std::uint64_t j) {
    return splitmix64(splitmix64(splitmix64(master) ^ fnv1a(structure)) ^ j);
}

const std::vector<Glyph>& RadicalImageSet::exemplars(std::string_view id) const {
    const auto it = exemplars_.find(std::string(id));
    if (it == exemplars_.end())
        throw EmptySet("synthesis", "no exemplar images for radical '" + std::string(id) + "'");
    return it->second;
}

std::vector<RadicalId> RadicalImageSet::ids() const {
    std::vector<RadicalId> out;
    for (const auto& [id, _] : exemplars_) out.push_back(id);
    return out;
}

RadicalImageSet load_radical_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("synthesis", "radical directory not found: " + dir.string());
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) subdirs.push_back(e.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    RadicalImageSet set;
    for (const auto& sub : subdirs) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(sub)) {
            if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) set.add(sub.filename().string(), read_png(f));
    }
    if (set.empty()) throw EmptySet("synthesis", "no radical exemplars under " + dir.string());
    return set;
}

void save_radical_dir(const RadicalImageSet& set, const fs::path& dir) {
    for (const auto& id : set.ids()) {
        fs::create_directories(dir / id);
        const auto& ex = set.exemplars(id);
        for (std::size_t i = 0; i < ex.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%03zu.png", i);
            write_png(dir / id / name, ex[i]);
        }
    }
}

RadicalImageSet collect_radicals(const std::vector<AnnotatedImage>& images) {
    RadicalImageSet set;
    for (const auto& img : images) {
        for (const auto& r : img.radicals) set.add(r.label, crop(img.glyph, r.box));
    }
    return set;
}

void check_bounds(const AugmentBounds& b) {
    if (!(b.zoom_min > 0.0 && b.zoom_min <= 1.0))
        throw InvalidParams("synthesis", "zoom_min must lie in (0, 1]");
    if (!(b.zoom_max >= 1.0 && std::isfinite(b.zoom_max)))
        throw InvalidParams("synthesis", "zoom_max must be >= 1");
    if (!(b.rotation_deg >= 0.0 && b.rotation_deg <= 180.0))
        throw InvalidParams("synthesis", "rotation bound must lie in [0, 180] degrees");
    if (!(b.shear >= 0.0 && b.shear <= 2.0)) throw InvalidParams("synthesis", "shear bound must lie in [0, 2]");
    if (b.pad_max < 0) throw InvalidParams("synthesis", "pad_max must be non-negative");
}

std::vector<std::pair<RadicalId, Glyph>> get_radicals(const RadicalImageSet& set, std::size_t num, Rng& rng) {
    if (set.empty()) throw EmptySet("synthesis", "radical image set is empty");
    if (num == 0) throw InvalidParams("synthesis", "get_radicals needs num >= 1");
    const auto ids = set.ids();
    std::vector<std::pair<RadicalId, Glyph>> out;
    out.reserve(num);
    for (std::size_t i = 0; i < num; ++i) {
        const auto& id = ids[rng.index(ids.size())];
        const auto& ex = set.exemplars(id);
        out.emplace_back(id, ex[rng.index(ex.size())]);
    }
    return out;
}

Glyph augment_glyph(const Glyph& g, const AugmentBounds& bounds, Rng& rng, AugmentRecord* record) {
    check_bounds(bounds);
    AugmentRecord rec;
    Glyph out = g;

    const bool can_zoom_in = bounds.zoom_max > 1.0;
    const bool can_zoom_out = bounds.zoom_min < 1.0;
    if (can_zoom_in || can_zoom_out) {
        // zoom-in and zoom-out are separate pool entries; at most one applies
        const bool in = can_zoom_in && (!can_zoom_out || rng.coin());
        if (rng.coin()) {
            const double f = in ? rng.uniform(1.0, bounds.zoom_max) : rng.uniform(bounds.zoom_min, 1.0);
            const int w = std::max(1, static_cast<int>(std::lround(out.width() * f)));
            const int h = std::max(1, static_cast<int>(std::lround(out.height() * f)));
            out = resize(out, w, h);
            rec.zoom = f;
        }
    }
    if (bounds.rotation_deg > 0.0 && rng.coin()) {
        const double deg = rng.uniform(-bounds.rotation_deg, bounds.rotation_deg);
        const double rad = deg * std::numbers::pi / 180.0;
        const double c = std::abs(std::cos(rad)), s = std::abs(std::sin(rad));
        // grow the frame so rotated ink is never clipped
        const int w = static_cast<int>(std::ceil(out.width() * c + out.height() * s));
        const int h = static_cast<int>(std::ceil(out.width() * s + out.height() * c));
        const int ex = std::max(0, w - out.width()), ey = std::max(0, h - out.height());
        out = rotate(pad(out, ex / 2 + 1, ey / 2 + 1, ex - ex / 2 + 1, ey - ey / 2 + 1), deg);
        rec.rotation_deg = deg;
    }
    if (bounds.shear > 0.0 && rng.coin()) {
        const double k = rng.uniform(-bounds.shear, bounds.shear);
        const int ex = static_cast<int>(std::ceil(std::abs(k) * out.height() / 2.0)) + 1;
        out = shear(pad(out, ex, 0, ex, 0), k);
        rec.shear = k;
    }
    if (bounds.pad_max > 0 && rng.coin()) {
        const int p = rng.integer(0, bounds.pad_max);
        out = pad(out, p);
        rec.pad = p;
    }
    if (record) *record = rec;
    return out;
}

std::vector<Glyph> augment_img(const std::vector<Glyph>& radicals, const AugmentBounds& bounds, Rng& rng) {
    std::vector<Glyph> out;
    out.reserve(radicals.size());
    for (const auto& g : radicals) out.push_back(augment_glyph(g, bounds, rng));
    return out;
}

SplicedImage splice(const std::vector<std::pair<RadicalId, Glyph>>& radicals, const StructureLayout& layout,
                    int canvas_width, int canvas_height, double margin) {
    if (radicals.size() != layout.slot_count())
        throw SlotMismatch("synthesis", std::to_string(radicals.size()) + " radicals for layout '" + layout.kind +
                                            "' with " + std::to_string(layout.slot_count()) + " slots");
    if (!(margin >= 0.0 && margin < 0.5)) throw InvalidParams("synthesis", "slot margin must lie in [0, 0.5)");

    SplicedImage out;
    Glyph canvas(canvas_width, canvas_height);
    for (std::size_t i = 0; i < radicals.size(); ++i) {
        const Glyph& g = radicals[i].second;
        const Box slot = slot_box(layout.slots[i], canvas_width, canvas_height);
        const int mx = static_cast<int>(std::lround(margin * slot.width()));
        const int my = static_cast<int>(std::lround(margin * slot.height()));
        const int aw = std::max(1, slot.width() - 2 * mx);
        const int ah = std::max(1, slot.height() - 2 * my);
        const double s = std::min(static_cast<double>(aw) / g.width(), static_cast<double>(ah) / g.height());
        const int fw = std::clamp(static_cast<int>(std::floor(g.width() * s)), 1, aw);
        const int fh = std::clamp(static_cast<int>(std::floor(g.height() * s)), 1, ah);
        Glyph fitted = resize(g, fw, fh);
        const auto ink = find_ink_box(fitted);
        if (!ink)
            throw EmptyGlyph("synthesis", "radical '" + radicals[i].first + "' has no ink after fitting");
        const int x = slot.x1 + mx + (aw - fw) / 2;
        const int y = slot.y1 + my + (ah - fh) / 2;
        canvas = paste(canvas, fitted, x, y);
        out.image.radicals.push_back({radicals[i].first, ink->translated(x, y)});
        out.fitted.push_back(std::move(fitted));
        out.offsets.emplace_back(x, y);
    }
    out.image.glyph = std::move(canvas);
    out.image.structure_label = layout.kind;
    return out;
}

AnnotatedImage generate_img(const std::vector<std::pair<RadicalId, Glyph>>& radicals,
                            const StructureLayout& layout, int canvas_width, int canvas_height, double margin) {
    auto img = splice(radicals, layout, canvas_width, canvas_height, margin).image;
    std::vector<RadicalId> ids;
    for (const auto& [id, g] : radicals) ids.push_back(id);
    // a lone radical is its own character category
    img.character_label = layout.kind == kSingle && ids.size() == 1 ? ids.front() : synthetic_label(layout.kind, ids);
    return img;
}

std::string synthetic_label(std::string_view structure, const std::vector<RadicalId>& radicals) {
    std::string label = "SYN:" + std::string(structure) + ":";
    for (std::size_t i = 0; i < radicals.size(); ++i) label += (i ? "," : "") + radicals[i];
    return label;
}

SplicedImage synthesize_character(const CharacterEntry& entry, const RadicalImageSet& set_r,
                                  const LayoutSet& layouts, const AugmentBounds& bounds, Rng& rng,
                                  double margin) {
    const auto& layout = layouts.at(entry.structure);
    std::vector<std::pair<RadicalId, Glyph>> parts;
    for (const auto& id : entry.radicals) {
        const auto& ex = set_r.exemplars(id);
        parts.emplace_back(id, ex[rng.index(ex.size())]);
    }
    for (auto& [id, g] : parts) g = augment_glyph(g, bounds, rng);
    auto out = splice(parts, layout, layouts.canvas_width(), layouts.canvas_height(), margin);
    out.image.character_label = entry.character;
    return out;
}

SplicedImage generate_one(const RadicalImageSet& set_r, std::string_view structure, std::size_t j,
                          const LayoutSet& layouts, const SynthesisConfig& config, const Dictionary* dict) {
    Rng rng(stream_seed(config.seed, structure, j));
    if (config.dictionary_valid) {
        if (!dict) throw InvalidParams("synthesis", "dictionary-valid synthesis needs a dictionary");
        std::vector<const CharacterEntry*> candidates;
        for (const auto& e : dict->entries()) {
            if (e.structure == structure) candidates.push_back(&e);
        }
        if (candidates.empty())
            throw EmptySet("synthesis", "dictionary has no characters with structure '" + std::string(structure) + "'");
        const auto& entry = *candidates[rng.index(candidates.size())];
        return synthesize_character(entry, set_r, layouts, config.augment, rng, config.slot_margin);
    }

    const auto info = get_structure(structure, layouts);
    auto parts = get_radicals(set_r, info.num_radicals, rng);
    for (auto& [id, g] : parts) g = augment_glyph(g, config.augment, rng);
    auto out = splice(parts, layouts.at(structure), layouts.canvas_width(), layouts.canvas_height(),
                      config.slot_margin);
    std::vector<RadicalId> ids;
    for (const auto& [id, g] : parts) ids.push_back(id);
    out.image.character_label = synthetic_label(structure, ids);
    return out;
}

std::vector<AnnotatedImage> gen_img_set(const RadicalImageSet& set_r, const std::vector<StructureKind>& set_s,
                                        const LayoutSet& layouts, const SynthesisConfig& config,
                                        const Dictionary* dict, std::size_t workers) {
    for (const auto& s : set_s) {
        if (s == kSingle) throw InvalidParams("synthesis", "Single is not a splicing structure");
        layouts.at(s);
    }
    check_bounds(config.augment);
    std::vector<AnnotatedImage> out(config.n * set_s.size());
    parallel_for(out.size(), workers, [&](std::size_t idx) {
        const auto& s = set_s[idx / config.n];
        out[idx] = generate_one(set_r, s, idx % config.n, layouts, config, dict).image;
    });
    return out;
}

std::vector<std::string> verify_label_soundness(const SplicedImage& spliced) {
    std::vector<std::string> problems;
    const auto& img = spliced.image;
    const int W = img.glyph.width(), H = img.glyph.height();
    const Glyph blank(W, H);
    std::vector<Glyph> layers;
    for (std::size_t i = 0; i < spliced.fitted.size(); ++i)
        layers.push_back(paste(blank, spliced.fitted[i], spliced.offsets[i].first, spliced.offsets[i].second));

    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Box& box = img.radicals[i].box;
        const auto expected = find_ink_box(layers[i]);
        if (!expected || !(*expected == box)) {
            problems.push_back("radical " + std::to_string(i) + ": box is not the pasted ink extent");
            continue;
        }
        for (int y = box.y1; y < box.y2; ++y) {
            for (int x = box.x1; x < box.x2; ++x) {
                bool covered = false;
                for (std::size_t k = 0; k < layers.size(); ++k)
                    covered = covered || (k != i && is_ink(layers[k].at(x, y)));
                const auto v = img.glyph.at(x, y), own = layers[i].at(x, y);
                const bool ok = covered ? (!is_ink(own) || v <= own) : v == own;
                if (!ok) {
                    problems.push_back("radical " + std::to_string(i) + ": pixel (" + std::to_string(x) + "," +
                                       std::to_string(y) + ") differs from the pasted glyph");
                    y = box.y2;
                    break;
                }
            }
        }
    }
    return problems;
}

}  // namespace radzero

#include "radzero/toy.hpp"

#include <algorithm>
#include <cmath>

#include "radzero/detection.hpp"
#include "radzero/error.hpp"
#include "radzero/image_io.hpp"

namespace radzero {

namespace {

void draw_segment(Glyph& g, double x0, double y0, double x1, double y1, double radius) {
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            const double px = x + 0.5, py = y + 0.5;
            double t = len2 > 0 ? ((px - x0) * dx + (py - y0) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double ex = px - (x0 + t * dx), ey = py - (y0 + t * dy);
            if (ex * ex + ey * ey <= radius * radius) g.at(x, y) = kInk;
        }
    }
}

}  // namespace

Glyph draw_stroke_radical(Rng& rng, int size) {
    Glyph g(size, size);
    const int strokes = rng.integer(3, 5);
    const double lo = size * 0.12, hi = size * 0.88;
    for (int s = 0; s < strokes; ++s) {
        draw_segment(g, rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi),
                     size / 20.0);
    }
    return g;
}

RadicalImageSet make_toy_radicals(const std::vector<RadicalId>& ids, std::uint64_t seed, std::size_t exemplars) {
    Rng rng(seed);
    std::vector<Glyph> chosen;
    std::vector<Image<float>> patches;
    for (std::size_t attempt = 0; chosen.size() < ids.size(); ++attempt) {
        if (attempt > 100000) throw InvalidParams("toy", "could not draw enough distinct radicals");
        Glyph g = draw_stroke_radical(rng);
        const Box ink = ink_bounding_box(g);
        if (ink.width() < 24 || ink.height() < 24) continue;
        const double fill = static_cast<double>((crop(g, ink).pixels() == kInk).count()) / static_cast<double>(ink.area());
        if (fill < 0.12 || fill > 0.5) continue;
        auto patch = to_patch(g, ink, 32);
        const bool distinct = std::all_of(patches.begin(), patches.end(),
                                          [&](const Image<float>& p) { return ncc(p, patch) < 0.45; });
        if (!distinct) continue;
        chosen.push_back(crop(g, ink));
        patches.push_back(std::move(patch));
    }
    RadicalImageSet set;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        set.add(ids[i], chosen[i]);
        for (std::size_t e = 1; e < exemplars; ++e) {
            const Glyph turned = rotate(pad(chosen[i], 6), rng.uniform(-8.0, 8.0));
            set.add(ids[i], crop(turned, ink_bounding_box(turned)));
        }
    }
    return set;
}

Dictionary toy_dictionary() {
    const std::vector<std::pair<std::string, std::string>> names = {
        {"swine", "swine"}, {"toe", "toe"},   {"house", "house"}, {"field", "field"}, {"hand", "hand"},
        {"eye", "eye"},     {"tree", "tree"}, {"water", "water"}, {"fire", "fire"},   {"mouth", "mouth"},
        {"sun", "sun"},     {"moon", "moon"},
    };
    std::vector<Radical> radicals;
    std::vector<CharacterEntry> entries;
    for (const auto& [id, name] : names) {
        radicals.push_back({id, name});
        entries.push_back({id, std::string(kSingle), {id}});
    }
    const std::vector<CharacterEntry> compounds = {
        {"chase", "UD", {"swine", "toe"}},       {"dawn", "UD", {"sun", "tree"}},
        {"paddy", "UD", {"water", "field"}},     {"watch", "UD", {"eye", "hand"}},
        {"cook", "UD", {"fire", "mouth"}},       {"night", "UD", {"moon", "house"}},
        {"grove", "LR", {"tree", "water"}},      {"point", "LR", {"hand", "eye"}},
        {"speak", "LR", {"mouth", "sun"}},       {"hearth", "LR", {"house", "fire"}},
        {"tide", "LR", {"field", "moon"}},       {"hoof", "LR", {"toe", "swine"}},
        {"harvest", "UMD", {"sun", "field", "toe"}},   {"herd", "UMD", {"house", "swine", "hand"}},
        {"spring", "UMD", {"tree", "mouth", "water"}}, {"beacon", "UMD", {"fire", "moon", "eye"}},
        {"gaze", "UMD", {"eye", "sun", "tree"}},       {"ford", "UMD", {"water", "toe", "house"}},
    };
    entries.insert(entries.end(), compounds.begin(), compounds.end());
    return Dictionary(std::move(radicals), {{"Single", 1}, {"UD", 2}, {"LR", 2}, {"UMD", 3}}, std::move(entries));
}

void write_toy_workspace(const std::filesystem::path& dir, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const Dictionary dict = toy_dictionary();
    save_dictionary(dict, dir / "dict.txt");
    write_text_file(dir / "layouts.json", layouts_to_json(default_layouts()).dump(2) + "\n");
    std::vector<RadicalId> ids;
    for (const auto& r : dict.radicals()) ids.push_back(r.id);
    save_radical_dir(make_toy_radicals(ids, seed), dir / "radicals");
    write_text_file(dir / "run.ini",
                    "# end-to-end toy experiment; paths are relative to the working directory\n"
                    "[run]\n"
                    "dict = " + (dir / "dict.txt").string() + "\n"
                    "layouts = " + (dir / "layouts.json").string() + "\n"
                    "radicals = " + (dir / "radicals").string() + "\n"
                    "out = " + (dir / "run").string() + "\n"
                    "seed = " + std::to_string(seed) + "\n"
                    "n-seen = 20\n"
                    "m-unseen = 8\n"
                    "samples = 4\n"
                    "train-fraction = 0.5\n"
                    "rotation = 10\n"
                    "zoom-min = 0.9\n"
                    "zoom-max = 1.1\n"
                    "t = 5\n"
                    "theta = 0.7\n");
}

}  // namespace radzero

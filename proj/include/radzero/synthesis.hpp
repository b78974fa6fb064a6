#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "radzero/dictionary.hpp"
#include "radzero/glyph.hpp"
#include "radzero/layout.hpp"

namespace radzero {

/// Seeded generator. Distributions are computed here rather than through
/// <random> distributions so outputs are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n);  // uniform in [0, n), n > 0
    int integer(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo) + 1)); }
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

/// Independent stream seed for image `j` of `structure`.
std::uint64_t stream_seed(std::uint64_t master, std::string_view structure, std::uint64_t j);

/// Exemplar glyphs per radical (Set_R). Every radical has at least one exemplar.
class RadicalImageSet {
public:
    void add(const RadicalId& id, Glyph exemplar) { exemplars_[id].push_back(std::move(exemplar)); }

    bool empty() const noexcept { return exemplars_.empty(); }
    std::size_t size() const noexcept { return exemplars_.size(); }
    bool contains(std::string_view id) const { return exemplars_.find(std::string(id)) != exemplars_.end(); }
    const std::vector<Glyph>& exemplars(std::string_view id) const;
    std::vector<RadicalId> ids() const;

private:
    std::map<RadicalId, std::vector<Glyph>> exemplars_;
};

/// Reads `<dir>/<radical_id>/*.png`, exemplars in filename order.
RadicalImageSet load_radical_dir(const std::filesystem::path& dir);
void save_radical_dir(const RadicalImageSet& set, const std::filesystem::path& dir);

/// Collects radical crops from annotated images (cropping R_C from each glyph).
RadicalImageSet collect_radicals(const std::vector<AnnotatedImage>& images);

struct AugmentBounds {
    double zoom_min = 1.0;  // zoom-out draws from [zoom_min, 1]
    double zoom_max = 1.0;  // zoom-in draws from [1, zoom_max]
    double rotation_deg = 0.0;
    double shear = 0.0;
    int pad_max = 0;

    bool is_identity() const noexcept {
        return zoom_min == 1.0 && zoom_max == 1.0 && rotation_deg == 0.0 && shear == 0.0 && pad_max == 0;
    }
};

/// Throws InvalidParams for inverted or out-of-range bounds.
void check_bounds(const AugmentBounds& bounds);

struct SynthesisConfig {
    std::size_t n = 0;  // images per structure
    AugmentBounds augment;
    std::uint64_t seed = 0;
    double slot_margin = 0.04;
    /// Restrict draws to decompositions of real dictionary characters.
    bool dictionary_valid = false;
};

/// Parameters actually applied to one glyph by augmentation.
struct AugmentRecord {
    std::optional<double> zoom;
    std::optional<double> rotation_deg;
    std::optional<double> shear;
    std::optional<int> pad;
};

/// `num` draws, uniform over radical ids then uniform over that radical's exemplars.
std::vector<std::pair<RadicalId, Glyph>> get_radicals(const RadicalImageSet& set, std::size_t num, Rng& rng);

/// Applies a random subset of {zoom-in, zoom-out, rotate, distort, pad} within `bounds`.
Glyph augment_glyph(const Glyph& g, const AugmentBounds& bounds, Rng& rng, AugmentRecord* record = nullptr);
std::vector<Glyph> augment_img(const std::vector<Glyph>& radicals, const AugmentBounds& bounds, Rng& rng);

/// A spliced character together with the per-slot glyphs exactly as pasted.
struct SplicedImage {
    AnnotatedImage image;
    std::vector<Glyph> fitted;
    std::vector<std::pair<int, int>> offsets;  // top-left paste position of each fitted glyph
};

/// Scales each glyph into its slot (aspect kept, centred, `margin` fraction of background per
/// side) and pastes onto a blank canvas. Boxes are the pasted ink extents.
SplicedImage splice(const std::vector<std::pair<RadicalId, Glyph>>& radicals, const StructureLayout& layout,
                    int canvas_width, int canvas_height, double margin = 0.04);

AnnotatedImage generate_img(const std::vector<std::pair<RadicalId, Glyph>>& radicals,
                            const StructureLayout& layout, int canvas_width = 256, int canvas_height = 256,
                            double margin = 0.04);

/// Pseudo-character label for synthetic images: `SYN:<structure>:<id,id,...>`.
std::string synthetic_label(std::string_view structure, const std::vector<RadicalId>& radicals);

/// Image `j` of `structure`; a pure function of its arguments.
SplicedImage generate_one(const RadicalImageSet& set_r, std::string_view structure, std::size_t j,
                          const LayoutSet& layouts, const SynthesisConfig& config,
                          const Dictionary* dict = nullptr);

/// n images per structure in (structure, j) order. `set_s` must not contain Single.
std::vector<AnnotatedImage> gen_img_set(const RadicalImageSet& set_r, const std::vector<StructureKind>& set_s,
                                        const LayoutSet& layouts, const SynthesisConfig& config,
                                        const Dictionary* dict = nullptr, std::size_t workers = 1);

/// Renders a real dictionary character from radical exemplars.
SplicedImage synthesize_character(const CharacterEntry& entry, const RadicalImageSet& set_r,
                                  const LayoutSet& layouts, const AugmentBounds& bounds, Rng& rng,
                                  double margin = 0.04);

/// Checks that every annotated box covers exactly the ink of its pasted glyph.
std::vector<std::string> verify_label_soundness(const SplicedImage& spliced);

}  // namespace radzero

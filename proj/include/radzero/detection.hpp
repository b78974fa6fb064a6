#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radzero/dictionary.hpp"
#include "radzero/glyph.hpp"
#include "radzero/layout.hpp"

namespace radzero {

struct RadicalCandidate {
    RadicalId label;
    double conf = 0.0;
    Box box;

    friend bool operator==(const RadicalCandidate&, const RadicalCandidate&) = default;
};

/// Candidates for one radical location, sorted by confidence, highest first.
struct LocationSlot {
    std::vector<RadicalCandidate> candidates;

    friend bool operator==(const LocationSlot&, const LocationSlot&) = default;
};

struct StructureCandidate {
    StructureKind label;
    double conf = 0.0;

    friend bool operator==(const StructureCandidate&, const StructureCandidate&) = default;
};

struct DetectionResult {
    std::string image_id;
    std::vector<LocationSlot> slots;
    std::vector<StructureCandidate> structures;  // highest confidence first
    std::optional<std::pair<int, int>> image_size;

    friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

/// Per-radical centroid templates of a fixed square patch size.
class TemplateBank {
public:
    explicit TemplateBank(int patch = 32) : patch_(patch) {}

    int patch() const noexcept { return patch_; }
    bool empty() const noexcept { return templates_.empty(); }
    std::size_t size() const noexcept { return templates_.size(); }
    const std::map<RadicalId, Image<float>>& templates() const noexcept { return templates_; }
    const Image<float>& at(std::string_view id) const;

    void set(const RadicalId& id, Image<float> t) { templates_[id] = std::move(t); }

private:
    int patch_;
    std::map<RadicalId, Image<float>> templates_;
};

/// `box` of `g` resampled (nearest) to a patch x patch float image.
Image<float> to_patch(const Glyph& g, const Box& box, int patch);

/// Zero-mean normalized cross-correlation; 0 when either side is constant.
double ncc(const Image<float>& a, const Image<float>& b);

/// Maps a correlation in [-1, 1] to a confidence in [0, 1].
inline double ncc_to_conf(double r) { return std::clamp((r + 1.0) / 2.0, 0.0, 1.0); }

/// Averages the patch of every annotated radical crop into one template per category.
TemplateBank build_templates(const std::vector<AnnotatedImage>& training, int patch = 32);

nlohmann::json templates_to_json(const TemplateBank& bank);
TemplateBank templates_from_json(const nlohmann::json& j);

struct DetectorConfig {
    std::size_t top_j = 5;       // candidates kept per location
    double temperature = 0.05;   // softmax temperature over layout scores
    int threshold = kDefaultThreshold;
};

/// Template-matching baseline: scores every layout hypothesis by the mean of
/// its slots' best template confidence, turns the scores into structure
/// confidences with a softmax, and reports the slots of the best layout.
DetectionResult detect(const Glyph& image, const TemplateBank& bank, const LayoutSet& layouts,
                       const DetectorConfig& config = {}, std::string image_id = {});

struct ScoredBox {
    Box box;
    double score = 0.0;
    int label = 0;
};

/// Greedy per-label non-maximum suppression: a box is dropped when a kept box of
/// the same label with a higher score overlaps it with IoU > iou_threshold.
/// Returns kept indices, highest score first; ties are broken by box
/// coordinates so the result does not depend on input order.
std::vector<std::size_t> nms(const std::vector<ScoredBox>& boxes, double iou_threshold = 0.5);

struct GridDecodeOptions {
    double objectness_threshold = 0.5;
    double nms_iou = 0.5;
    std::size_t top_j = 5;
};

/// Decodes a K x K x M x (n_r + 5) output grid (row-major; per anchor: n_r
/// class scores, then x, y, w, h in cell units, then objectness).
DetectionResult decode_grid(const nlohmann::json& j, const GridDecodeOptions& options = {});

DetectionResult detection_from_json(const nlohmann::json& j, const GridDecodeOptions& options = {});
nlohmann::json detection_to_json(const DetectionResult& r);

/// Reads a JSON-lines prediction file; lines with a `grid` field are decoded.
std::vector<DetectionResult> ingest_predictions(const std::filesystem::path& path,
                                                const GridDecodeOptions& options = {});

/// Empty when `r` satisfies the DetectionResult invariants.
std::vector<std::string> check_detection(const DetectionResult& r);

}  // namespace radzero

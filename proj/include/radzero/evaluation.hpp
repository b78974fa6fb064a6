#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "radzero/detection.hpp"
#include "radzero/dictionary.hpp"
#include "radzero/glyph.hpp"

namespace radzero {

struct LabeledPrediction {
    std::string image_id;
    CharacterLabel true_character;
    std::vector<CharacterLabel> predicted;  // ranked, best first
};

/// Fraction of samples whose true label is among the first k predictions.
double top_k_accuracy(const std::vector<LabeledPrediction>& preds, std::size_t k);

/// Top-1 accuracy per true category, averaged over categories.
double cat_avg(const std::vector<LabeledPrediction>& preds);

/// Top-1 accuracy of each true category.
std::map<CharacterLabel, double> per_category_accuracy(const std::vector<LabeledPrediction>& preds);

struct PredictedRadical {
    RadicalId label;
    double conf = 0.0;
    Box box;
};

struct DetectionEvalRecord {
    std::string image_id;
    std::vector<RadicalAnnotation> truth;
    std::vector<PredictedRadical> predicted;
};

/// All-point interpolated average precision of a ranked list of hit flags
/// against `positives` ground-truth objects.
double average_precision(const std::vector<bool>& hits, std::size_t positives);

/// Per-category AP at the given IoU threshold, for categories with ground truth.
std::map<RadicalId, double> per_category_ap(const std::vector<DetectionEvalRecord>& records, double iou_threshold = 0.5);

/// Mean of per-category AP at IoU 0.5.
double ap50(const std::vector<DetectionEvalRecord>& records);

/// Every candidate of every slot becomes a scored prediction.
std::vector<PredictedRadical> detection_predictions(const DetectionResult& r);

struct SplitSpec {
    std::vector<CharacterLabel> seen;
    std::vector<CharacterLabel> unseen;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

/// First `n_seen` categories are seen, last `m_unseen` unseen. Throws Overlap
/// when the two would intersect.
SplitSpec make_zero_shot_split(const std::vector<CharacterLabel>& categories, std::size_t n_seen,
                               std::size_t m_unseen, std::uint64_t seed = 0, double train_fraction = 0.8);

/// Whether a seen-category sample goes to training; deterministic in (seed, sample_id).
bool is_train_sample(const SplitSpec& split, std::string_view sample_id);

nlohmann::json split_to_json(const SplitSpec& s);

}  // namespace radzero

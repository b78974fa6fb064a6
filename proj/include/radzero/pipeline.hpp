#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "radzero/detection.hpp"
#include "radzero/reasoner.hpp"
#include "radzero/synthesis.hpp"

namespace radzero {

struct PipelineConfig {
    std::filesystem::path dictionary;
    std::filesystem::path layouts;  // empty: built-in layouts
    std::filesystem::path radicals;
    std::filesystem::path output;
    std::optional<std::uint64_t> seed;

    std::size_t samples_per_category = 4;
    std::size_t n_seen = 0;
    std::size_t m_unseen = 0;
    double train_fraction = 0.5;
    AugmentBounds augment;
    double slot_margin = 0.04;

    DetectorConfig detector;
    ReasonerConfig reasoner;
    std::size_t top_k = 5;
    std::size_t workers = 1;
};

/// Throws ValidationError describing the first problem (missing path, no seed, ...).
void check_config(const PipelineConfig& config);

/// Synthesizes images for seen and unseen categories, builds templates from
/// the seen training images only, detects and reasons over the test images,
/// and scores them. Writes manifest.json, split.json, templates.json,
/// truth.jsonl, detections.jsonl, predictions.jsonl and metrics.json under
/// `config.output`; returns the metrics object.
nlohmann::json run_end_to_end(const PipelineConfig& config);

}  // namespace radzero

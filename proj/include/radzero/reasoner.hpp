#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "radzero/detection.hpp"
#include "radzero/dictionary.hpp"
#include "radzero/layout.hpp"

namespace radzero {

struct ReasonerConfig {
    std::size_t t = 5;    // radical sets and structures combined
    double theta = 0.7;   // weight of the radical-set confidence
};

void check_config(const ReasonerConfig& config);

struct ScoredCharacter {
    CharacterLabel character;
    double p_c = 0.0;
    double p_r = 0.0;  // radical-set confidence of the best supporting pair
    double p_s = 0.0;  // structure confidence of the best supporting pair

    friend bool operator==(const ScoredCharacter&, const ScoredCharacter&) = default;
};

/// Ranked character predictions, p_c non-increasing, one entry per character.
struct CharacterPrediction {
    std::vector<ScoredCharacter> predictions;
};

/// A choice of candidate index per slot.
using Assignment = std::vector<std::size_t>;

/// Mean confidence of the chosen candidate in each slot. Throws IndexOutOfRange.
double radical_set_confidence(const std::vector<LocationSlot>& slots, const Assignment& assignment);

struct RankedAssignment {
    Assignment choice;
    double p_r = 0.0;
};

/// The `t` assignments with the highest mean confidence (ties: lexicographically
/// smaller index vector first), or all of them when fewer exist.
std::vector<RankedAssignment> top_assignments(const std::vector<LocationSlot>& slots, std::size_t t);

struct CandidatePair {
    RankedAssignment radicals;
    std::size_t structure = 0;  // index into the structure candidates
};

/// Top-t radical sets crossed with the top-t structures.
std::vector<CandidatePair> top_conf_enumerate(const std::vector<LocationSlot>& slots,
                                              const std::vector<StructureCandidate>& structures, std::size_t t);

/// Permutation that maps detection slots onto the slot order of `layout`:
/// result[k] is the detection slot placed in layout slot k. Boxes are
/// compared in a frame normalised by the image size (or, when unknown, by the
/// union of the detection boxes).
std::vector<std::size_t> align_slots(const DetectionResult& result, const StructureLayout& layout);

/// Confidence-based radical character matching. With `layouts`, detection slots
/// are aligned to each candidate structure's slot order before lookup;
/// without, detection order is used as is.
CharacterPrediction crcm(const Dictionary& dict, const DetectionResult& result, const ReasonerConfig& config = {},
                         const LayoutSet* layouts = nullptr);

nlohmann::json prediction_to_json(const std::string& image_id, const CharacterPrediction& p, std::size_t top_k);

}  // namespace radzero

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radzero/dictionary.hpp"
#include "radzero/glyph.hpp"

namespace radzero {

/// One annotator's labels for one image.
struct AnnotationRecord {
    std::string annotator_id;
    std::string image_id;
    std::string group;  // annotator group; agreement is averaged across groups
    CharacterLabel character_label;
    std::vector<RadicalAnnotation> radicals;
    StructureKind structure_label;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

enum class Source { AgreedE1, ArbitratedSE };

struct MergeResult {
    AnnotationRecord final;
    std::vector<Source> radical_provenance;  // one per slot of `final`
    Source structure_provenance = Source::AgreedE1;
    bool slot_count_mismatch = false;
};

/// Labels a single-radical character automatically: its own category as the
/// radical, the ink box as its location, structure Single.
AnnotatedImage auto_annotate_single(const Glyph& image, std::string_view character, const Dictionary& dict,
                                    int threshold = kDefaultThreshold);

/// Greedy maximal-IoU slot correspondence: result[i] is the index in `b`
/// matched to a[i], or nullopt. Pairs with zero overlap are never matched.
std::vector<std::optional<std::size_t>> match_slots(const std::vector<RadicalAnnotation>& a,
                                                    const std::vector<RadicalAnnotation>& b);

/// Two-annotator merge with senior arbitration. A slot agrees when the labels
/// are equal and the boxes overlap with IoU >= iou_match; agreed slots keep e1's
/// value, others take the senior's. When e1 and e2 disagree on the number of
/// radicals the whole record comes from `se`.
MergeResult merge_annotations(const AnnotationRecord& e1, const AnnotationRecord& e2, const AnnotationRecord& se,
                              double iou_match = 0.9);

/// Nominal Krippendorff's alpha. Each unit lists the values assigned to it;
/// units with fewer than two values are not pairable and are ignored.
double krippendorff_alpha_nominal(const std::vector<std::vector<std::string>>& units);

struct AgreementReport {
    double alpha_character = 1.0;
    double alpha_radical_label = 1.0;
    double alpha_radical_box = 1.0;
    double alpha_structure = 1.0;
    std::size_t groups = 0;
    std::size_t images = 0;
    std::size_t records = 0;
};

/// Per-field alpha within each annotator group, averaged across groups.
/// Boxes count as agreeing with the reference annotator's box at IoU >= 0.5.
AgreementReport agreement_report(const std::vector<AnnotationRecord>& records, double box_iou = 0.5);

nlohmann::json record_to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const AgreementReport& r);

}  // namespace radzero

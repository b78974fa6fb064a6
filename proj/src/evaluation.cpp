#include "radzero/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "radzero/error.hpp"
#include "radzero/image_io.hpp"
#include "radzero/synthesis.hpp"

namespace radzero {

double top_k_accuracy(const std::vector<LabeledPrediction>& preds, std::size_t k) {
    if (k < 1) throw InvalidParams("evaluation", "k must be at least 1");
    if (preds.empty()) throw EmptyInput("evaluation", "no predictions to score");
    std::size_t hits = 0;
    for (const auto& p : preds) {
        const auto end = p.predicted.begin() + static_cast<std::ptrdiff_t>(std::min(k, p.predicted.size()));
        if (std::find(p.predicted.begin(), end, p.true_character) != end) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

std::map<CharacterLabel, double> per_category_accuracy(const std::vector<LabeledPrediction>& preds) {
    std::map<CharacterLabel, std::pair<std::size_t, std::size_t>> counts;  // hits, total
    for (const auto& p : preds) {
        auto& c = counts[p.true_character];
        ++c.second;
        if (!p.predicted.empty() && p.predicted.front() == p.true_character) ++c.first;
    }
    std::map<CharacterLabel, double> out;
    for (const auto& [label, c] : counts) out[label] = static_cast<double>(c.first) / static_cast<double>(c.second);
    return out;
}

double cat_avg(const std::vector<LabeledPrediction>& preds) {
    if (preds.empty()) throw EmptyInput("evaluation", "no predictions to score");
    const auto per = per_category_accuracy(preds);
    double sum = 0.0;
    for (const auto& [_, acc] : per) sum += acc;
    return sum / static_cast<double>(per.size());
}

double average_precision(const std::vector<bool>& hits, std::size_t positives) {
    if (positives == 0) return 0.0;
    std::vector<double> precision(hits.size());
    std::size_t tp = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        tp += hits[i] ? 1 : 0;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    // precision envelope: best precision at this rank or any later one
    for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
    double ap = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i]) ap += precision[i];
    }
    return ap / static_cast<double>(positives);
}

std::map<RadicalId, double> per_category_ap(const std::vector<DetectionEvalRecord>& records, double iou_threshold) {
    std::map<RadicalId, std::size_t> positives;
    for (const auto& r : records) {
        for (const auto& t : r.truth) {
            if (!t.box.valid()) throw ValidationError("evaluation", r.image_id + ": invalid ground-truth box");
            ++positives[t.label];
        }
        for (const auto& p : r.predicted) {
            if (!p.box.valid()) throw ValidationError("evaluation", r.image_id + ": invalid predicted box");
        }
    }
    if (positives.empty()) throw EmptyGroundTruth("evaluation", "no ground-truth radicals");

    std::map<RadicalId, double> out;
    for (const auto& [label, count] : positives) {
        struct Ref {
            double conf;
            std::size_t record, index;
        };
        std::vector<Ref> ranked;
        for (std::size_t r = 0; r < records.size(); ++r) {
            for (std::size_t i = 0; i < records[r].predicted.size(); ++i) {
                if (records[r].predicted[i].label == label) ranked.push_back({records[r].predicted[i].conf, r, i});
            }
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const Ref& a, const Ref& b) { return a.conf > b.conf; });

        std::vector<std::vector<bool>> taken(records.size());
        for (std::size_t r = 0; r < records.size(); ++r) taken[r].assign(records[r].truth.size(), false);
        std::vector<bool> hits;
        for (const auto& ref : ranked) {
            const auto& rec = records[ref.record];
            const Box& box = rec.predicted[ref.index].box;
            double best = -1.0;
            std::size_t pick = 0;
            for (std::size_t g = 0; g < rec.truth.size(); ++g) {
                if (taken[ref.record][g] || rec.truth[g].label != label) continue;
                const double o = iou(box, rec.truth[g].box);
                if (o >= iou_threshold && o > best) {
                    best = o;
                    pick = g;
                }
            }
            if (best >= 0.0) taken[ref.record][pick] = true;
            hits.push_back(best >= 0.0);
        }
        out[label] = average_precision(hits, count);
    }
    return out;
}

double ap50(const std::vector<DetectionEvalRecord>& records) {
    const auto per = per_category_ap(records, 0.5);
    double sum = 0.0;
    for (const auto& [_, ap] : per) sum += ap;
    return sum / static_cast<double>(per.size());
}

std::vector<PredictedRadical> detection_predictions(const DetectionResult& r) {
    std::vector<PredictedRadical> out;
    for (const auto& s : r.slots) {
        for (const auto& c : s.candidates) out.push_back({c.label, c.conf, c.box});
    }
    return out;
}

SplitSpec make_zero_shot_split(const std::vector<CharacterLabel>& categories, std::size_t n_seen,
                               std::size_t m_unseen, std::uint64_t seed, double train_fraction) {
    if (n_seen + m_unseen > categories.size())
        throw Overlap("evaluation", std::to_string(n_seen) + " seen + " + std::to_string(m_unseen) +
                                        " unseen categories exceed the " + std::to_string(categories.size()) + " available");
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        throw InvalidParams("evaluation", "train fraction must lie in [0, 1]");
    std::set<std::string_view> distinct(categories.begin(), categories.end());
    if (distinct.size() != categories.size()) throw ValidationError("evaluation", "category list has duplicates");
    SplitSpec s;
    s.seen.assign(categories.begin(), categories.begin() + static_cast<std::ptrdiff_t>(n_seen));
    s.unseen.assign(categories.end() - static_cast<std::ptrdiff_t>(m_unseen), categories.end());
    s.train_fraction = train_fraction;
    s.seed = seed;
    return s;
}

bool is_train_sample(const SplitSpec& split, std::string_view sample_id) {
    Rng rng(stream_seed(split.seed, sample_id, 0x5eed));
    return rng.uniform() < split.train_fraction;
}

nlohmann::json split_to_json(const SplitSpec& s) {
    return {{"schema_version", kSchemaVersion},
            {"seen", s.seen},
            {"unseen", s.unseen},
            {"train_fraction", s.train_fraction},
            {"seed", s.seed}};
}

}  // namespace radzero

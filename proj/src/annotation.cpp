#include "radzero/annotation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <Eigen/Core>

#include "radzero/error.hpp"
#include "radzero/image_io.hpp"

namespace radzero {

using nlohmann::json;

namespace {

constexpr const char* kMissing = "∅";

}  // namespace

AnnotatedImage auto_annotate_single(const Glyph& image, std::string_view character, const Dictionary& dict,
                                    int threshold) {
    const auto k = get_num(dict, character);
    if (k != 1)
        throw NotSingleRadical("annotation", "character '" + std::string(character) + "' has " +
                                                 std::to_string(k) + " radicals");
    const auto box = find_ink_box(image, threshold);
    if (!box) throw EmptyGlyph("annotation", "image of '" + std::string(character) + "' has no ink");
    AnnotatedImage out;
    out.glyph = image;
    out.character_label = std::string(character);
    out.structure_label = std::string(kSingle);
    out.radicals.push_back({dict.find(character)->radicals.front(), *box});
    return out;
}

std::vector<std::optional<std::size_t>> match_slots(const std::vector<RadicalAnnotation>& a,
                                                    const std::vector<RadicalAnnotation>& b) {
    struct Pair {
        double overlap;
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double o = iou(a[i].box, b[j].box);
            if (o > 0.0) pairs.push_back({o, i, j});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.overlap != y.overlap) return x.overlap > y.overlap;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<std::optional<std::size_t>> out(a.size());
    std::vector<bool> used(b.size(), false);
    for (const auto& p : pairs) {
        if (out[p.i] || used[p.j]) continue;
        out[p.i] = p.j;
        used[p.j] = true;
    }
    return out;
}

MergeResult merge_annotations(const AnnotationRecord& e1, const AnnotationRecord& e2, const AnnotationRecord& se,
                              double iou_match) {
    if (e1.image_id != e2.image_id || (e1.image_id != se.image_id && e1 != e2))
        throw ValidationError("annotation", "merge needs three records of the same image");
    MergeResult out;
    out.final = e1;

    if (e1.radicals.size() != e2.radicals.size()) {
        out.final = se;
        out.radical_provenance.assign(se.radicals.size(), Source::ArbitratedSE);
        out.structure_provenance = Source::ArbitratedSE;
        out.slot_count_mismatch = true;
        return out;
    }

    const auto to_e2 = match_slots(e1.radicals, e2.radicals);
    std::optional<std::vector<std::optional<std::size_t>>> to_se;
    for (std::size_t i = 0; i < e1.radicals.size(); ++i) {
        const auto& a = e1.radicals[i];
        const bool agreed = to_e2[i] && e2.radicals[*to_e2[i]].label == a.label &&
                            iou(a.box, e2.radicals[*to_e2[i]].box) >= iou_match;
        if (agreed) {
            out.radical_provenance.push_back(Source::AgreedE1);
            continue;
        }
        if (!to_se) to_se = match_slots(e1.radicals, se.radicals);
        std::optional<std::size_t> k = (*to_se)[i];
        if (!k && i < se.radicals.size()) k = i;
        if (!k)
            throw ValidationError("annotation", "senior record for '" + e1.image_id + "' has no radical for slot " +
                                                    std::to_string(i));
        out.final.radicals[i] = se.radicals[*k];
        out.radical_provenance.push_back(Source::ArbitratedSE);
    }
    if (e1.structure_label != e2.structure_label) {
        out.final.structure_label = se.structure_label;
        out.structure_provenance = Source::ArbitratedSE;
    }
    return out;
}

double krippendorff_alpha_nominal(const std::vector<std::vector<std::string>>& units) {
    std::map<std::string, Eigen::Index> index;
    for (const auto& u : units) {
        if (u.size() < 2) continue;
        for (const auto& v : u) index.emplace(v, 0);
    }
    if (index.empty()) throw InsufficientData("annotation", "alpha needs at least one unit with two values");
    Eigen::Index next = 0;
    for (auto& [_, i] : index) i = next++;

    // coincidence matrix: o(c,k) = sum over units of ordered c-k pairs / (m_u - 1)
    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(next, next);
    for (const auto& u : units) {
        if (u.size() < 2) continue;
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(next);
        for (const auto& v : u) counts[index[v]] += 1.0;
        Eigen::MatrixXd pairs = counts * counts.transpose();
        pairs.diagonal() -= counts;
        o += pairs / static_cast<double>(u.size() - 1);
    }
    const Eigen::VectorXd marginals = o.rowwise().sum();
    const double n = marginals.sum();
    const double observed = o.sum() - o.trace();
    const double expected = marginals.sum() * marginals.sum() - marginals.squaredNorm();
    if (expected == 0.0) return 1.0;
    return 1.0 - (n - 1.0) * observed / expected;
}

AgreementReport agreement_report(const std::vector<AnnotationRecord>& records, double box_iou) {
    // group -> image -> records, in first-seen order
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::string>> image_order;
    std::map<std::string, std::map<std::string, std::vector<const AnnotationRecord*>>> grouped;
    for (const auto& r : records) {
        if (!grouped.count(r.group)) group_order.push_back(r.group);
        auto& images = grouped[r.group];
        if (!images.count(r.image_id)) image_order[r.group].push_back(r.image_id);
        images[r.image_id].push_back(&r);
    }

    struct Sums {
        double total = 0.0;
        std::size_t count = 0;
        void add(const std::vector<std::vector<std::string>>& units) {
            try {
                total += krippendorff_alpha_nominal(units);
                ++count;
            } catch (const InsufficientData&) {
            }
        }
        double mean(const char* field) const {
            if (count == 0) throw InsufficientData("annotation", std::string("no pairable data for ") + field);
            return total / static_cast<double>(count);
        }
    } character, radical_label, radical_box, structure;

    AgreementReport report;
    report.records = records.size();
    for (const auto& g : group_order) {
        std::vector<std::vector<std::string>> c_units, rl_units, rc_units, s_units;
        for (const auto& image : image_order[g]) {
            const auto& recs = grouped[g][image];
            ++report.images;
            std::vector<std::string> cu, su;
            for (const auto* r : recs) {
                if (!r->character_label.empty()) cu.push_back(r->character_label);
                su.push_back(r->structure_label);
            }
            c_units.push_back(std::move(cu));
            s_units.push_back(std::move(su));

            const auto& ref = recs.front()->radicals;
            std::vector<std::vector<std::string>> labels(ref.size()), boxes(ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i) {
                labels[i].push_back(ref[i].label);
                boxes[i].push_back("1");
            }
            for (std::size_t k = 1; k < recs.size(); ++k) {
                const auto& other = recs[k]->radicals;
                const auto m = match_slots(ref, other);
                std::vector<bool> used(other.size(), false);
                for (std::size_t i = 0; i < ref.size(); ++i) {
                    if (m[i]) {
                        used[*m[i]] = true;
                        labels[i].push_back(other[*m[i]].label);
                        boxes[i].push_back(iou(ref[i].box, other[*m[i]].box) >= box_iou ? "1" : "0");
                    } else {
                        labels[i].push_back(kMissing);
                        boxes[i].push_back("0");
                    }
                }
                for (std::size_t j = 0; j < other.size(); ++j) {
                    if (used[j]) continue;
                    rl_units.push_back({kMissing, other[j].label});
                    rc_units.push_back({"0", "1"});
                }
            }
            for (auto& u : labels) rl_units.push_back(std::move(u));
            for (auto& u : boxes) rc_units.push_back(std::move(u));
        }
        character.add(c_units);
        radical_label.add(rl_units);
        radical_box.add(rc_units);
        structure.add(s_units);
    }
    report.groups = group_order.size();
    report.alpha_character = character.mean("character labels");
    report.alpha_radical_label = radical_label.mean("radical labels");
    report.alpha_radical_box = radical_box.mean("radical boxes");
    report.alpha_structure = structure.mean("structure labels");
    return report;
}

json record_to_json(const AnnotationRecord& r) {
    json radicals = json::array();
    for (const auto& x : r.radicals) radicals.push_back({{"label", x.label}, {"box", box_to_json(x.box)}});
    json j{{"annotator_id", r.annotator_id},
           {"image_id", r.image_id},
           {"character_label", r.character_label},
           {"structure_label", r.structure_label},
           {"radicals", std::move(radicals)}};
    if (!r.group.empty()) j["group"] = r.group;
    return j;
}

AnnotationRecord record_from_json(const json& j) {
    try {
        AnnotationRecord r;
        r.annotator_id = j.value("annotator_id", "");
        r.image_id = j.contains("image_id") ? j["image_id"].get<std::string>() : j.at("image").get<std::string>();
        r.group = j.value("group", "");
        r.character_label = j.value("character_label", "");
        r.structure_label = j.at("structure_label").get<std::string>();
        for (const auto& x : j.at("radicals"))
            r.radicals.push_back({x.at("label").get<std::string>(), box_from_json(x.at("box"))});
        return r;
    } catch (const json::exception& e) {
        throw ParseError("annotation", std::string("malformed annotation record: ") + e.what());
    }
}

json report_to_json(const AgreementReport& r) {
    return {{"schema_version", kSchemaVersion},
            {"alpha",
             {{"C_L", r.alpha_character},
              {"R_L", r.alpha_radical_label},
              {"R_C", r.alpha_radical_box},
              {"S_L", r.alpha_structure}}},
            {"groups", r.groups},
            {"images", r.images},
            {"records", r.records}};
}

}  // namespace radzero

#include "radzero/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "radzero/error.hpp"
#include "radzero/image_io.hpp"

namespace radzero {

using nlohmann::json;

const Image<float>& TemplateBank::at(std::string_view id) const {
    const auto it = templates_.find(std::string(id));
    if (it == templates_.end()) throw EmptyTraining("detection", "no template for radical '" + std::string(id) + "'");
    return it->second;
}

Image<float> to_patch(const Glyph& g, const Box& box, int patch) {
    const Raster region = g.pixels().block(box.y1, box.x1, box.height(), box.width());
    return resize_nearest(region, patch, patch).cast<float>();
}

double ncc(const Image<float>& a, const Image<float>& b) {
    const Eigen::ArrayXXd x = a.cast<double>() - a.cast<double>().mean();
    const Eigen::ArrayXXd y = b.cast<double>() - b.cast<double>().mean();
    const double denom = std::sqrt((x * x).sum() * (y * y).sum());
    if (denom <= 1e-12) return 0.0;
    return std::clamp((x * y).sum() / denom, -1.0, 1.0);
}

TemplateBank build_templates(const std::vector<AnnotatedImage>& training, int patch) {
    if (patch < 1) throw InvalidParams("detection", "template patch size must be positive");
    std::map<RadicalId, std::pair<Image<double>, std::size_t>> sums;
    for (const auto& img : training) {
        for (const auto& r : img.radicals) {
            if (!r.box.within(img.glyph.width(), img.glyph.height()))
                throw ValidationError("detection", "training box for '" + r.label + "' outside its image");
            auto [it, fresh] = sums.try_emplace(r.label, Image<double>::Zero(patch, patch), 0);
            it->second.first += to_patch(img.glyph, r.box, patch).cast<double>();
            ++it->second.second;
        }
    }
    if (sums.empty()) throw EmptyTraining("detection", "no radical crops to build templates from");
    TemplateBank bank(patch);
    for (auto& [id, acc] : sums) bank.set(id, (acc.first / static_cast<double>(acc.second)).cast<float>());
    return bank;
}

json templates_to_json(const TemplateBank& bank) {
    json templates = json::object();
    for (const auto& [id, t] : bank.templates())
        templates[id] = std::vector<float>(t.data(), t.data() + t.size());
    return {{"schema_version", kSchemaVersion}, {"patch", bank.patch()}, {"templates", std::move(templates)}};
}

TemplateBank templates_from_json(const json& j) {
    try {
        const int patch = j.at("patch").get<int>();
        TemplateBank bank(patch);
        for (const auto& [id, values] : j.at("templates").items()) {
            const auto v = values.get<std::vector<float>>();
            if (v.size() != static_cast<std::size_t>(patch) * patch)
                throw ParseError("detection", "template '" + id + "' has the wrong number of values");
            bank.set(id, Eigen::Map<const Image<float>>(v.data(), patch, patch));
        }
        if (bank.empty()) throw EmptyTraining("detection", "template file contains no templates");
        return bank;
    } catch (const json::exception& e) {
        throw ParseError("detection", std::string("malformed template file: ") + e.what());
    }
}

DetectionResult detect(const Glyph& image, const TemplateBank& bank, const LayoutSet& layouts,
                       const DetectorConfig& config, std::string image_id) {
    if (bank.empty()) throw EmptyTraining("detection", "template bank is empty");
    if (layouts.layouts().empty()) throw InvalidParams("detection", "no layouts to hypothesize");

    struct Hypothesis {
        double score = 0.0;
        std::vector<LocationSlot> slots;
    };
    std::vector<Hypothesis> hyps;
    for (const auto& layout : layouts.layouts()) {
        Hypothesis h;
        for (const auto& rect : layout.slots) {
            const Box region = slot_box(rect, image.width(), image.height());
            LocationSlot slot;
            const auto ink = find_ink_box(image, region, config.threshold);
            if (ink) {
                const auto patch = to_patch(image, *ink, bank.patch());
                for (const auto& [id, t] : bank.templates())
                    slot.candidates.push_back({id, ncc_to_conf(ncc(patch, t)), *ink});
            } else {
                // an empty slot carries no evidence for any radical
                const Box clipped{std::max(region.x1, 0), std::max(region.y1, 0),
                                  std::min(region.x2, image.width()), std::min(region.y2, image.height())};
                for (const auto& [id, t] : bank.templates()) slot.candidates.push_back({id, 0.0, clipped});
            }
            std::stable_sort(slot.candidates.begin(), slot.candidates.end(),
                             [](const RadicalCandidate& a, const RadicalCandidate& b) { return a.conf > b.conf; });
            if (slot.candidates.size() > config.top_j) slot.candidates.resize(std::max<std::size_t>(config.top_j, 1));
            h.score += slot.candidates.front().conf;
            h.slots.push_back(std::move(slot));
        }
        h.score /= static_cast<double>(layout.slot_count());
        hyps.push_back(std::move(h));
    }

    const double top = std::max_element(hyps.begin(), hyps.end(), [](const auto& a, const auto& b) {
                           return a.score < b.score;
                       })->score;
    std::vector<double> weights;
    for (const auto& h : hyps) weights.push_back(std::exp((h.score - top) / config.temperature));
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

    DetectionResult out;
    out.image_id = std::move(image_id);
    out.image_size = std::pair{image.width(), image.height()};
    std::vector<std::size_t> order(hyps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return hyps[a].score > hyps[b].score; });
    for (auto i : order) out.structures.push_back({layouts.layouts()[i].kind, weights[i] / total});
    out.slots = std::move(hyps[order.front()].slots);
    return out;
}

std::vector<std::size_t> nms(const std::vector<ScoredBox>& boxes, double iou_threshold) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = boxes[a];
        const auto& y = boxes[b];
        return std::tuple(-x.score, x.label, x.box.y1, x.box.x1, x.box.y2, x.box.x2, a) <
               std::tuple(-y.score, y.label, y.box.y1, y.box.x1, y.box.y2, y.box.x2, b);
    });
    std::vector<std::size_t> kept;
    for (auto i : order) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return boxes[k].label == boxes[i].label && iou(boxes[k].box, boxes[i].box) > iou_threshold;
        });
        if (!suppressed) kept.push_back(i);
    }
    return kept;
}

namespace {

double checked_conf(const json& v, const std::string& what) {
    if (!v.is_number()) throw ParseError("detection", what + " must be a number");
    const double c = v.get<double>();
    if (!(c >= 0.0 && c <= 1.0)) throw RangeError("detection", what + " " + v.dump() + " outside [0, 1]");
    return c;
}

std::optional<std::pair<int, int>> read_size(const json& j) {
    if (!j.contains("image_size")) return std::nullopt;
    const auto& s = j["image_size"];
    if (!s.is_array() || s.size() != 2) throw ParseError("detection", "image_size must be [width, height]");
    const int w = s[0].get<int>(), h = s[1].get<int>();
    if (w < 1 || h < 1) throw ParseError("detection", "image_size must be positive");
    return std::pair{w, h};
}

std::vector<StructureCandidate> read_structures(const json& j) {
    std::vector<StructureCandidate> out;
    for (const auto& s : j.at("structures"))
        out.push_back({s.at("label").get<std::string>(), checked_conf(s.at("conf"), "structure confidence")});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.conf > b.conf; });
    return out;
}

}  // namespace

DetectionResult decode_grid(const json& j, const GridDecodeOptions& options) {
    try {
        DetectionResult out;
        out.image_id = j.value("image_id", "");
        const int K = j.at("K").get<int>();
        const int M = j.at("M").get<int>();
        const int nr = j.at("n_r").get<int>();
        if (K < 1 || M < 1 || nr < 1) throw ParseError("detection", "K, M and n_r must be positive");
        const auto& grid = j.at("grid");
        const std::size_t stride = static_cast<std::size_t>(nr) + 5;
        if (!grid.is_array() || grid.size() != static_cast<std::size_t>(K) * K * M * stride)
            throw ParseError("detection", "grid must hold K*K*M*(n_r+5) = " +
                                              std::to_string(static_cast<std::size_t>(K) * K * M * stride) + " values");
        std::vector<std::string> labels;
        if (j.contains("labels")) {
            labels = j["labels"].get<std::vector<std::string>>();
            if (labels.size() != static_cast<std::size_t>(nr))
                throw ParseError("detection", "labels must list n_r radical ids");
        } else {
            for (int c = 0; c < nr; ++c) labels.push_back("r" + std::to_string(c));
        }
        out.image_size = read_size(j);
        const auto [W, H] = out.image_size.value_or(std::pair{256, 256});
        const double cw = static_cast<double>(W) / K, ch = static_cast<double>(H) / K;

        struct Raw {
            std::vector<double> classes;
            double objectness;
        };
        std::vector<Raw> raws;
        std::vector<ScoredBox> boxes;
        for (int gy = 0; gy < K; ++gy) {
            for (int gx = 0; gx < K; ++gx) {
                for (int m = 0; m < M; ++m) {
                    const std::size_t base = ((static_cast<std::size_t>(gy) * K + gx) * M + m) * stride;
                    Raw raw;
                    for (int c = 0; c < nr; ++c)
                        raw.classes.push_back(checked_conf(grid[base + c], "class score"));
                    double coord[4];
                    for (int c = 0; c < 4; ++c) {
                        if (!grid[base + nr + c].is_number()) throw ParseError("detection", "coordinate must be a number");
                        coord[c] = grid[base + nr + c].get<double>();
                        if (!std::isfinite(coord[c])) throw ParseError("detection", "coordinate must be finite");
                    }
                    raw.objectness = checked_conf(grid[base + nr + 4], "objectness");
                    if (raw.objectness < options.objectness_threshold) continue;
                    if (coord[2] <= 0.0 || coord[3] <= 0.0) continue;
                    const double cx = (gx + coord[0]) * cw, cy = (gy + coord[1]) * ch;
                    const double bw = coord[2] * cw, bh = coord[3] * ch;
                    Box b{static_cast<int>(std::floor(cx - bw / 2)), static_cast<int>(std::floor(cy - bh / 2)),
                          static_cast<int>(std::ceil(cx + bw / 2)), static_cast<int>(std::ceil(cy + bh / 2))};
                    b.x1 = std::clamp(b.x1, 0, W - 1);
                    b.y1 = std::clamp(b.y1, 0, H - 1);
                    b.x2 = std::clamp(b.x2, b.x1 + 1, W);
                    b.y2 = std::clamp(b.y2, b.y1 + 1, H);
                    const int label = static_cast<int>(
                        std::max_element(raw.classes.begin(), raw.classes.end()) - raw.classes.begin());
                    boxes.push_back({b, raw.objectness, label});
                    raws.push_back(std::move(raw));
                }
            }
        }

        for (auto k : nms(boxes, options.nms_iou)) {
            const auto& raw = raws[k];
            std::vector<std::size_t> cls(raw.classes.size());
            std::iota(cls.begin(), cls.end(), 0);
            std::stable_sort(cls.begin(), cls.end(),
                             [&](std::size_t a, std::size_t b) { return raw.classes[a] > raw.classes[b]; });
            LocationSlot slot;
            for (std::size_t c = 0; c < cls.size() && c < std::max<std::size_t>(options.top_j, 1); ++c)
                slot.candidates.push_back({labels[cls[c]], raw.classes[cls[c]], boxes[k].box});
            out.slots.push_back(std::move(slot));
        }
        out.structures = read_structures(j);
        const auto problems = check_detection(out);
        if (!problems.empty()) throw ParseError("detection", out.image_id + ": " + problems.front());
        return out;
    } catch (const json::exception& e) {
        throw ParseError("detection", std::string("malformed grid record: ") + e.what());
    }
}

DetectionResult detection_from_json(const json& j, const GridDecodeOptions& options) {
    if (j.contains("grid")) return decode_grid(j, options);
    try {
        DetectionResult out;
        out.image_id = j.at("image_id").get<std::string>();
        out.image_size = read_size(j);
        for (const auto& s : j.at("slots")) {
            LocationSlot slot;
            for (const auto& c : s) {
                slot.candidates.push_back({c.at("label").get<std::string>(), checked_conf(c.at("conf"), "radical confidence"),
                                           box_from_json(c.at("box"))});
            }
            std::stable_sort(slot.candidates.begin(), slot.candidates.end(),
                             [](const auto& a, const auto& b) { return a.conf > b.conf; });
            out.slots.push_back(std::move(slot));
        }
        out.structures = read_structures(j);
        const auto problems = check_detection(out);
        if (!problems.empty()) throw ParseError("detection", out.image_id + ": " + problems.front());
        return out;
    } catch (const json::exception& e) {
        throw ParseError("detection", std::string("malformed prediction record: ") + e.what());
    }
}

json detection_to_json(const DetectionResult& r) {
    json slots = json::array();
    for (const auto& s : r.slots) {
        json cands = json::array();
        for (const auto& c : s.candidates)
            cands.push_back({{"label", c.label}, {"conf", c.conf}, {"box", box_to_json(c.box)}});
        slots.push_back(std::move(cands));
    }
    json structures = json::array();
    for (const auto& s : r.structures) structures.push_back({{"label", s.label}, {"conf", s.conf}});
    json j{{"image_id", r.image_id}, {"slots", std::move(slots)}, {"structures", std::move(structures)}};
    if (r.image_size) j["image_size"] = {r.image_size->first, r.image_size->second};
    return j;
}

std::vector<DetectionResult> ingest_predictions(const std::filesystem::path& path, const GridDecodeOptions& options) {
    std::vector<DetectionResult> out;
    for (const auto& j : read_json_lines(path)) out.push_back(detection_from_json(j, options));
    return out;
}

std::vector<std::string> check_detection(const DetectionResult& r) {
    std::vector<std::string> problems;
    if (r.structures.empty()) problems.push_back("no structure candidates");
    for (std::size_t i = 0; i + 1 < r.structures.size(); ++i) {
        if (r.structures[i].conf < r.structures[i + 1].conf) problems.push_back("structures not sorted");
    }
    for (std::size_t s = 0; s < r.slots.size(); ++s) {
        const auto& c = r.slots[s].candidates;
        if (c.empty()) problems.push_back("slot " + std::to_string(s) + " has no candidates");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!(c[i].conf >= 0.0 && c[i].conf <= 1.0)) problems.push_back("confidence outside [0, 1]");
            if (i + 1 < c.size() && c[i].conf < c[i + 1].conf)
                problems.push_back("slot " + std::to_string(s) + " candidates not sorted");
            if (!c[i].box.valid()) problems.push_back("invalid candidate box");
            if (r.image_size && !c[i].box.within(r.image_size->first, r.image_size->second))
                problems.push_back("candidate box outside the image");
        }
    }
    return problems;
}

}  // namespace radzero

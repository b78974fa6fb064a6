#include "radzero/pipeline.hpp"

#include <set>
#include <sstream>

#include "radzero/annotation.hpp"
#include "radzero/error.hpp"
#include "radzero/evaluation.hpp"
#include "radzero/image_io.hpp"
#include "radzero/parallel.hpp"

namespace radzero {

namespace fs = std::filesystem;
using nlohmann::json;

void check_config(const PipelineConfig& c) {
    auto need = [](const fs::path& p, const char* what) {
        if (p.empty()) throw ValidationError("config", std::string("missing ") + what + " path");
        if (!fs::exists(p)) throw ValidationError("config", std::string(what) + " not found: " + p.string());
    };
    need(c.dictionary, "dictionary");
    need(c.radicals, "radicals");
    if (!c.layouts.empty()) need(c.layouts, "layouts");
    if (c.output.empty()) throw ValidationError("config", "missing output path");
    if (!c.seed) throw ValidationError("config", "a seed is required");
    if (c.samples_per_category == 0) throw ValidationError("config", "samples per category must be positive");
    check_bounds(c.augment);
    check_config(c.reasoner);
}

namespace {

struct Sample {
    std::string image_id;
    std::string split;  // train, test-seen, test-unseen
    SplicedImage spliced;
};

json accuracy_block(const std::vector<LabeledPrediction>& preds) {
    if (preds.empty()) return {{"samples", 0}};
    return {{"samples", preds.size()},
            {"top1", top_k_accuracy(preds, 1)},
            {"top3", top_k_accuracy(preds, 3)},
            {"top5", top_k_accuracy(preds, 5)},
            {"cat_avg", cat_avg(preds)}};
}

std::string join_lines(const std::vector<json>& rows) {
    std::ostringstream out;
    for (const auto& r : rows) out << r.dump() << '\n';
    return out.str();
}

}  // namespace

json run_end_to_end(const PipelineConfig& config) {
    check_config(config);
    const Dictionary dict = load_dictionary(config.dictionary);
    const LayoutSet all_layouts = config.layouts.empty() ? default_layouts() : load_layouts(config.layouts);
    std::vector<StructureKind> kinds;
    for (const auto& s : dict.structures()) kinds.push_back(s.kind);
    const LayoutSet layouts = all_layouts.subset(kinds);
    if (const auto problems = check_against(layouts, dict); !problems.empty())
        throw ValidationError("pipeline", problems.front());
    const RadicalImageSet radicals = load_radical_dir(config.radicals);

    const SplitSpec split = make_zero_shot_split(dict.categories(), config.n_seen, config.m_unseen, *config.seed,
                                                 config.train_fraction);

    std::vector<std::pair<const CharacterEntry*, bool>> plan;  // entry, seen
    for (const auto& c : split.seen) plan.emplace_back(dict.find(c), true);
    for (const auto& c : split.unseen) plan.emplace_back(dict.find(c), false);

    std::vector<Sample> samples(plan.size() * config.samples_per_category);
    parallel_for(samples.size(), config.workers, [&](std::size_t idx) {
        const auto& [entry, seen] = plan[idx / config.samples_per_category];
        const std::size_t s = idx % config.samples_per_category;
        Sample& out = samples[idx];
        out.image_id = entry->character + "_" + std::to_string(s);
        Rng rng(stream_seed(*config.seed, entry->character, s));
        out.spliced = synthesize_character(*entry, radicals, layouts, config.augment, rng, config.slot_margin);
        out.split = !seen ? "test-unseen" : is_train_sample(split, out.image_id) ? "train" : "test-seen";
    });

    std::vector<AnnotatedImage> training;
    std::vector<const Sample*> tests;
    for (const auto& s : samples) {
        if (s.split == "train")
            training.push_back(s.spliced.image);
        else
            tests.push_back(&s);
    }
    if (tests.empty()) throw EmptyInput("pipeline", "split leaves no test images");
    const TemplateBank bank = build_templates(training);

    std::vector<DetectionResult> detections(tests.size());
    std::vector<CharacterPrediction> predictions(tests.size());
    parallel_for(tests.size(), config.workers, [&](std::size_t i) {
        detections[i] = detect(tests[i]->spliced.image.glyph, bank, layouts, config.detector, tests[i]->image_id);
        predictions[i] = crcm(dict, detections[i], config.reasoner, &layouts);
    });

    fs::create_directories(config.output / "images");
    std::vector<json> manifest, truth, det_rows, pred_rows;
    for (const auto& s : samples) {
        json rec = write_annotated(config.output / "images", s.image_id, s.spliced.image);
        rec["image"] = "images/" + rec["image"].get<std::string>();
        rec["image_id"] = s.image_id;
        rec["split"] = s.split;
        manifest.push_back(std::move(rec));
    }
    std::vector<LabeledPrediction> all, seen, unseen;
    std::vector<DetectionEvalRecord> det_eval;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const auto& img = tests[i]->spliced.image;
        AnnotationRecord t{"synth", tests[i]->image_id, tests[i]->split, img.character_label, img.radicals,
                           img.structure_label};
        truth.push_back(record_to_json(t));
        det_rows.push_back(detection_to_json(detections[i]));
        pred_rows.push_back(prediction_to_json(tests[i]->image_id, predictions[i], config.top_k));

        LabeledPrediction lp{tests[i]->image_id, img.character_label, {}};
        for (const auto& p : predictions[i].predictions) lp.predicted.push_back(p.character);
        (tests[i]->split == "test-unseen" ? unseen : seen).push_back(lp);
        all.push_back(std::move(lp));
        det_eval.push_back({tests[i]->image_id, img.radicals, detection_predictions(detections[i])});
    }

    std::set<RadicalId> covered;
    for (const auto& [id, _] : bank.templates()) covered.insert(id);
    json metrics{{"schema_version", kSchemaVersion},
                 {"config",
                  {{"seed", *config.seed},
                   {"t", config.reasoner.t},
                   {"theta", config.reasoner.theta},
                   {"samples_per_category", config.samples_per_category},
                   {"n_seen", config.n_seen},
                   {"m_unseen", config.m_unseen}}},
                 {"counts",
                  {{"train_images", training.size()},
                   {"test_images", tests.size()},
                   {"templates", bank.size()},
                   {"radicals", dict.radicals().size()}}},
                 {"overall", accuracy_block(all)},
                 {"seen", accuracy_block(seen)},
                 {"unseen", accuracy_block(unseen)},
                 {"ap50", ap50(det_eval)}};

    write_manifest(config.output / "manifest.json", manifest);
    write_text_file(config.output / "split.json", split_to_json(split).dump(2) + "\n");
    write_text_file(config.output / "templates.json", templates_to_json(bank).dump() + "\n");
    write_text_file(config.output / "truth.jsonl", join_lines(truth));
    write_text_file(config.output / "detections.jsonl", join_lines(det_rows));
    write_text_file(config.output / "predictions.jsonl", join_lines(pred_rows));
    write_text_file(config.output / "metrics.json", metrics.dump(2) + "\n");
    return metrics;
}

}  // namespace radzero

// radzero: command-line front end for the zero-shot radical toolkit.
//
// Exit codes: 0 success, 2 configuration / usage errors, 3 data errors.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "radzero/annotation.hpp"
#include "radzero/detection.hpp"
#include "radzero/dictionary.hpp"
#include "radzero/error.hpp"
#include "radzero/evaluation.hpp"
#include "radzero/image_io.hpp"
#include "radzero/layout.hpp"
#include "radzero/parallel.hpp"
#include "radzero/pipeline.hpp"
#include "radzero/reasoner.hpp"
#include "radzero/synthesis.hpp"
#include "radzero/toy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace radzero;

namespace {

constexpr int kConfigError = 2;
constexpr int kDataError = 3;

void log(const char* level, const std::string& module, const std::string& msg) {
    std::cerr << "level=" << level << " module=" << module << " msg=" << json(msg).dump() << '\n';
}

void write_lines(const fs::path& path, const std::vector<json>& rows) {
    std::ostringstream out;
    for (const auto& r : rows) out << r.dump() << '\n';
    write_text_file(path, out.str());
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void require_path(const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw ValidationError("config", std::string(what) + " not found: " + p.string());
}

LayoutSet layouts_or_default(const std::string& path) {
    if (path.empty()) return default_layouts();
    require_path(path, "layout file");
    return load_layouts(path);
}

struct AugmentFlags {
    double rotation = 0.0, zoom_min = 1.0, zoom_max = 1.0, shear = 0.0;
    int pad_max = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--rotation", rotation, "max |rotation| in degrees");
        cmd->add_option("--zoom-min", zoom_min, "smallest zoom-out factor");
        cmd->add_option("--zoom-max", zoom_max, "largest zoom-in factor");
        cmd->add_option("--shear", shear, "max |shear| factor for distortion");
        cmd->add_option("--pad-max", pad_max, "max padding in pixels");
    }
    AugmentBounds bounds() const { return {zoom_min, zoom_max, rotation, shear, pad_max}; }
};

// Reads `{image_id, character_label | true_character | character}` records.
std::map<std::string, std::string> read_truth_labels(const fs::path& path) {
    std::map<std::string, std::string> out;
    for (const auto& j : read_json_lines(path)) {
        const auto id = j.at("image_id").get<std::string>();
        for (const char* key : {"character_label", "true_character", "character"}) {
            if (j.contains(key)) {
                out[id] = j[key].get<std::string>();
                break;
            }
        }
    }
    return out;
}

std::vector<LabeledPrediction> labeled_predictions(const fs::path& predictions, const fs::path& truth) {
    const auto labels = read_truth_labels(truth);
    std::vector<LabeledPrediction> out;
    for (const auto& j : read_json_lines(predictions)) {
        LabeledPrediction p;
        p.image_id = j.at("image_id").get<std::string>();
        const auto it = labels.find(p.image_id);
        if (it == labels.end()) throw ValidationError("eval", "no ground truth for image '" + p.image_id + "'");
        p.true_character = it->second;
        for (const auto& c : j.at("predictions")) p.predicted.push_back(c.at("character").get<std::string>());
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radzero: radical-based zero-shot character recognition toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t workers = 1;
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.set_config("--config", "", "INI file; keys under [run] configure `run`, flags override it");

    // make-toy
    auto* toy = app.add_subcommand("make-toy", "write a toy dictionary, layouts, radical images and run config");
    std::string toy_out;
    std::uint64_t toy_seed = 7;
    toy->add_option("--out", toy_out, "output directory")->required();
    toy->add_option("--seed", toy_seed, "radical drawing seed");

    // dict-validate
    auto* dv = app.add_subcommand("dict-validate", "validate a dictionary file");
    std::string dv_dict, dv_layouts, dv_out;
    dv->add_option("--dict", dv_dict, "dictionary file")->required();
    dv->add_option("--layouts", dv_layouts, "also check slot counts against this layout file");
    dv->add_option("--out", dv_out, "write the violation report (JSON) here");

    // synth
    auto* sy = app.add_subcommand("synth", "splice radicals into synthetic character images");
    std::string sy_radicals, sy_layouts, sy_structures, sy_out, sy_dict;
    std::size_t sy_n = 0;
    std::uint64_t sy_seed = 0;
    double sy_margin = 0.04;
    bool sy_valid = false;
    AugmentFlags sy_aug;
    sy->add_option("--radicals", sy_radicals, "radical image directory (<id>/*.png)")->required();
    sy->add_option("--layouts", sy_layouts, "layout file (default: built-in 14 layouts)");
    sy->add_option("--structures", sy_structures, "comma-separated structures")->required();
    sy->add_option("--n", sy_n, "images per structure")->required();
    sy->add_option("--seed", sy_seed, "master seed")->required();
    sy->add_option("--out", sy_out, "output directory")->required();
    sy->add_option("--margin", sy_margin, "slot margin fraction");
    sy->add_option("--dict", sy_dict, "dictionary for --dictionary-valid");
    sy->add_flag("--dictionary-valid", sy_valid, "only splice decompositions of real characters");
    sy_aug.attach(sy);

    // merge
    auto* mg = app.add_subcommand("merge", "merge two annotators' records with senior arbitration");
    std::string mg_e1, mg_e2, mg_se, mg_out;
    double mg_iou = 0.9;
    mg->add_option("--e1", mg_e1, "first annotator records (JSON lines)")->required();
    mg->add_option("--e2", mg_e2, "second annotator records (JSON lines)")->required();
    mg->add_option("--se", mg_se, "senior annotator records (JSON lines)")->required();
    mg->add_option("--iou", mg_iou, "IoU at which two boxes agree");
    mg->add_option("--out", mg_out, "merged records (JSON lines)")->required();

    // alpha
    auto* al = app.add_subcommand("alpha", "Krippendorff's alpha over annotation records");
    std::string al_records, al_out;
    double al_iou = 0.5;
    al->add_option("--records", al_records, "annotation records (JSON lines)")->required();
    al->add_option("--box-iou", al_iou, "IoU at which boxes count as agreeing");
    al->add_option("--out", al_out, "report (JSON)")->required();

    // templates
    auto* tp = app.add_subcommand("templates", "build radical templates from annotated images");
    std::string tp_train, tp_out;
    int tp_patch = 32;
    tp->add_option("--train", tp_train, "training manifest")->required();
    tp->add_option("--patch", tp_patch, "template size in pixels");
    tp->add_option("--out", tp_out, "template file (JSON)")->required();

    // detect
    auto* dt = app.add_subcommand("detect", "run the template-matching detector");
    std::string dt_templates, dt_images, dt_layouts, dt_dict, dt_out;
    DetectorConfig dt_cfg;
    dt->add_option("--templates", dt_templates, "template file from `templates`")->required();
    dt->add_option("--images", dt_images, "manifest of images to detect")->required();
    dt->add_option("--layouts", dt_layouts, "layout file (default: built-in)");
    dt->add_option("--dict", dt_dict, "restrict layout hypotheses to this dictionary's structures");
    dt->add_option("--top-j", dt_cfg.top_j, "candidates per location");
    dt->add_option("--temperature", dt_cfg.temperature, "softmax temperature over layout scores");
    dt->add_option("--out", dt_out, "detections (JSON lines)")->required();

    // ingest
    auto* ig = app.add_subcommand("ingest", "normalize external predictions (including raw grids)");
    std::string ig_in, ig_out;
    GridDecodeOptions ig_opts;
    ig->add_option("--predictions", ig_in, "prediction file (JSON lines)")->required();
    ig->add_option("--objectness", ig_opts.objectness_threshold, "objectness threshold for raw grids");
    ig->add_option("--nms-iou", ig_opts.nms_iou, "NMS IoU threshold for raw grids");
    ig->add_option("--top-j", ig_opts.top_j, "class candidates per location");
    ig->add_option("--out", ig_out, "detections (JSON lines)")->required();

    // reason
    auto* rs = app.add_subcommand("reason", "match detections against the dictionary");
    std::string rs_dict, rs_pred, rs_out, rs_layouts;
    ReasonerConfig rs_cfg;
    std::size_t rs_topk = 5;
    rs->add_option("--dict", rs_dict, "dictionary file")->required();
    rs->add_option("--predictions", rs_pred, "detections (JSON lines)")->required();
    rs->add_option("--layouts", rs_layouts, "align slots to structure layouts");
    rs->add_option("--t", rs_cfg.t, "top candidate sets and structures")->check(CLI::PositiveNumber);
    rs->add_option("--theta", rs_cfg.theta, "radical-set weight")->check(CLI::Range(0.0, 1.0));
    rs->add_option("--top-k", rs_topk, "predictions kept per image")->check(CLI::PositiveNumber);
    rs->add_option("--out", rs_out, "character predictions (JSON lines)")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "metrics");
    ev->require_subcommand(1);
    std::string ev_pred, ev_truth, ev_out, ev_csv, ev_ks = "1,3,5";
    auto add_common = [&](CLI::App* c) {
        c->add_option("--truth", ev_truth, "ground truth records (JSON lines)")->required();
        c->add_option("--out", ev_out, "metrics report (JSON)")->required();
        c->add_option("--csv", ev_csv, "also write a CSV table");
    };
    auto* ev_topk = ev->add_subcommand("topk", "top-k accuracy");
    ev_topk->add_option("--predictions", ev_pred, "character predictions (JSON lines)")->required();
    ev_topk->add_option("--k", ev_ks, "comma-separated k values");
    add_common(ev_topk);
    auto* ev_cat = ev->add_subcommand("catavg", "category-averaged top-1 accuracy");
    ev_cat->add_option("--predictions", ev_pred, "character predictions (JSON lines)")->required();
    add_common(ev_cat);
    auto* ev_ap = ev->add_subcommand("ap50", "radical detection AP at IoU 0.5");
    ev_ap->add_option("--detections", ev_pred, "detections (JSON lines)")->required();
    add_common(ev_ap);

    // split (also reachable as `eval split`)
    std::string sp_dict, sp_out;
    std::size_t sp_seen = 0, sp_unseen = 0;
    std::uint64_t sp_seed = 0;
    double sp_train = 0.8;
    auto add_split = [&](CLI::App* c) {
        c->add_option("--dict", sp_dict, "dictionary file (category order = file order)")->required();
        c->add_option("--n-seen", sp_seen, "first n categories are seen")->required();
        c->add_option("--m-unseen", sp_unseen, "last m categories are unseen")->required();
        c->add_option("--seed", sp_seed, "seed for the train/test assignment of seen samples");
        c->add_option("--train-fraction", sp_train, "fraction of seen samples used for training");
        c->add_option("--out", sp_out, "split (JSON)")->required();
    };
    auto* sp = app.add_subcommand("split", "zero-shot seen/unseen category split");
    add_split(sp);
    auto* ev_split = ev->add_subcommand("split", "zero-shot seen/unseen category split");
    add_split(ev_split);

    // run
    auto* rn = app.add_subcommand("run", "end-to-end synthetic zero-shot experiment");
    std::string rn_dict, rn_layouts, rn_radicals, rn_out;
    std::uint64_t rn_seed = 0;
    PipelineConfig rn_cfg;
    AugmentFlags rn_aug;
    rn->add_option("--dict", rn_dict, "dictionary file");
    rn->add_option("--layouts", rn_layouts, "layout file");
    rn->add_option("--radicals", rn_radicals, "radical image directory");
    rn->add_option("--out", rn_out, "output directory");
    auto* rn_seed_opt = rn->add_option("--seed", rn_seed, "master seed");
    rn->add_option("--n-seen", rn_cfg.n_seen, "seen categories");
    rn->add_option("--m-unseen", rn_cfg.m_unseen, "unseen categories");
    rn->add_option("--samples", rn_cfg.samples_per_category, "images per category");
    rn->add_option("--train-fraction", rn_cfg.train_fraction, "fraction of seen images used for templates");
    rn->add_option("--t", rn_cfg.reasoner.t, "reasoner t");
    rn->add_option("--theta", rn_cfg.reasoner.theta, "reasoner theta");
    rn->add_option("--top-k", rn_cfg.top_k, "predictions written per image");
    rn_aug.attach(rn);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        if (*toy) {
            write_toy_workspace(toy_out, toy_seed);
            log("info", "toy", "wrote toy workspace to " + toy_out);
        } else if (*dv) {
            require_path(dv_dict, "dictionary");
            std::ifstream in(dv_dict);
            const Dictionary dict = parse_dictionary(in, dv_dict);
            json violations = json::array();
            for (const auto& v : validate(dict)) {
                json row{{"message", v.message}};
                if (v.entry) row["entry"] = *v.entry;
                violations.push_back(std::move(row));
            }
            if (!dv_layouts.empty()) {
                for (const auto& m : check_against(layouts_or_default(dv_layouts), dict))
                    violations.push_back({{"message", m}});
            }
            json report{{"schema_version", kSchemaVersion},
                        {"entries", dict.entries().size()},
                        {"radicals", dict.radicals().size()},
                        {"structures", dict.structures().size()},
                        {"violations", violations}};
            if (!dv_out.empty()) write_text_file(dv_out, report.dump(2) + "\n");
            for (const auto& v : violations) log("error", "dictionary", v["message"].get<std::string>());
            log("info", "dictionary", std::to_string(violations.size()) + " violation(s) in " + dv_dict);
            return violations.empty() ? 0 : kDataError;
        } else if (*sy) {
            require_path(sy_radicals, "radical directory");
            const LayoutSet layouts = layouts_or_default(sy_layouts);
            const RadicalImageSet set = load_radical_dir(sy_radicals);
            std::optional<Dictionary> dict;
            if (sy_valid) {
                if (sy_dict.empty()) throw ValidationError("config", "--dictionary-valid needs --dict");
                require_path(sy_dict, "dictionary");
                dict = load_dictionary(sy_dict);
            }
            SynthesisConfig cfg{sy_n, sy_aug.bounds(), sy_seed, sy_margin, sy_valid};
            const auto structures = split_list(sy_structures);
            for (const auto& s : structures) {
                if (s == kSingle) throw ValidationError("config", "Single cannot be spliced");
                layouts.at(s);
            }
            check_bounds(cfg.augment);
            std::vector<json> records(sy_n * structures.size());
            parallel_for(records.size(), workers, [&](std::size_t idx) {
                const auto& s = structures[idx / sy_n];
                const std::size_t j = idx % sy_n;
                const auto img = generate_one(set, s, j, layouts, cfg, dict ? &*dict : nullptr).image;
                char stem[64];
                std::snprintf(stem, sizeof stem, "%s_%05zu", s.c_str(), j);
                records[idx] = write_annotated(sy_out, stem, img);
            });
            fs::create_directories(sy_out);
            write_manifest(fs::path(sy_out) / "manifest.json", records);
            log("info", "synthesis", "wrote " + std::to_string(records.size()) + " images to " + sy_out);
        } else if (*mg) {
            auto index = [](const std::string& path) {
                require_path(path, "annotation file");
                std::map<std::string, AnnotationRecord> out;
                for (const auto& j : read_json_lines(path)) {
                    auto r = record_from_json(j);
                    out.emplace(r.image_id, std::move(r));
                }
                return out;
            };
            const auto e1 = index(mg_e1), e2 = index(mg_e2), se = index(mg_se);
            std::vector<json> rows;
            std::size_t arbitrated = 0;
            for (const auto& [id, a] : e1) {
                const auto b = e2.find(id);
                if (b == e2.end()) throw ValidationError("annotation", "image '" + id + "' missing from --e2");
                const auto s = se.find(id);
                const AnnotationRecord empty{"", id, "", "", {}, ""};
                const auto merged = merge_annotations(a, b->second, s == se.end() ? empty : s->second, mg_iou);
                json row = record_to_json(merged.final);
                json prov = json::array();
                for (auto p : merged.radical_provenance) {
                    prov.push_back(p == Source::AgreedE1 ? "agreed" : "arbitrated");
                    arbitrated += p == Source::ArbitratedSE;
                }
                row["provenance"] = {{"radicals", prov},
                                     {"structure", merged.structure_provenance == Source::AgreedE1 ? "agreed" : "arbitrated"}};
                if (merged.slot_count_mismatch) {
                    row["slot_count_mismatch"] = true;
                    log("warn", "annotation", "annotators disagree on radical count for '" + id + "'");
                }
                rows.push_back(std::move(row));
            }
            write_lines(mg_out, rows);
            log("info", "annotation", "merged " + std::to_string(rows.size()) + " images, " +
                                          std::to_string(arbitrated) + " radical slot(s) arbitrated");
        } else if (*al) {
            require_path(al_records, "annotation file");
            std::vector<AnnotationRecord> records;
            for (const auto& j : read_json_lines(al_records)) records.push_back(record_from_json(j));
            write_text_file(al_out, report_to_json(agreement_report(records, al_iou)).dump(2) + "\n");
        } else if (*tp) {
            require_path(tp_train, "training manifest");
            const auto bank = build_templates(read_manifest(tp_train), tp_patch);
            write_text_file(tp_out, templates_to_json(bank).dump() + "\n");
            log("info", "detection", "built " + std::to_string(bank.size()) + " templates");
        } else if (*dt) {
            require_path(dt_templates, "template file");
            require_path(dt_images, "image manifest");
            const auto bank = templates_from_json(read_json_file(dt_templates));
            LayoutSet layouts = layouts_or_default(dt_layouts);
            if (!dt_dict.empty()) {
                require_path(dt_dict, "dictionary");
                const Dictionary dict = load_dictionary(dt_dict);
                std::vector<StructureKind> kinds;
                for (const auto& s : dict.structures()) kinds.push_back(s.kind);
                layouts = layouts.subset(kinds);
            }
            const json manifest = read_json_file(dt_images);
            const auto images = read_manifest(dt_images);
            std::vector<json> rows(images.size());
            parallel_for(images.size(), workers, [&](std::size_t i) {
                const auto& rec = manifest["records"][i];
                const std::string id = rec.value("image_id", fs::path(rec["image"].get<std::string>()).stem().string());
                rows[i] = detection_to_json(detect(images[i].glyph, bank, layouts, dt_cfg, id));
            });
            write_lines(dt_out, rows);
        } else if (*ig) {
            require_path(ig_in, "prediction file");
            std::vector<json> rows;
            for (const auto& r : ingest_predictions(ig_in, ig_opts)) rows.push_back(detection_to_json(r));
            write_lines(ig_out, rows);
        } else if (*rs) {
            require_path(rs_dict, "dictionary");
            require_path(rs_pred, "prediction file");
            check_config(rs_cfg);
            const Dictionary dict = load_dictionary(rs_dict);
            std::optional<LayoutSet> layouts;
            if (!rs_layouts.empty()) layouts = layouts_or_default(rs_layouts);
            const auto detections = ingest_predictions(rs_pred);
            std::vector<json> rows(detections.size());
            parallel_for(detections.size(), workers, [&](std::size_t i) {
                const auto p = crcm(dict, detections[i], rs_cfg, layouts ? &*layouts : nullptr);
                rows[i] = prediction_to_json(detections[i].image_id, p, rs_topk);
            });
            write_lines(rs_out, rows);
        } else if (*ev) {
            if (*ev_split) {
                require_path(sp_dict, "dictionary");
                const auto s = make_zero_shot_split(load_dictionary(sp_dict).categories(), sp_seen, sp_unseen, sp_seed,
                                                    sp_train);
                write_text_file(sp_out, split_to_json(s).dump(2) + "\n");
                return 0;
            }
            require_path(ev_pred, "prediction file");
            require_path(ev_truth, "ground truth file");
            json report{{"schema_version", kSchemaVersion}};
            std::ostringstream csv;
            csv << "metric,value\n";
            if (*ev_topk || *ev_cat) {
                const auto preds = labeled_predictions(ev_pred, ev_truth);
                report["samples"] = preds.size();
                if (*ev_topk) {
                    for (const auto& k : split_list(ev_ks)) {
                        const auto v = top_k_accuracy(preds, std::stoul(k));
                        report["top" + k] = v;
                        csv << "top" << k << ',' << v << '\n';
                    }
                } else {
                    const auto v = cat_avg(preds);
                    report["cat_avg"] = v;
                    report["per_category"] = per_category_accuracy(preds);
                    csv << "cat_avg," << v << '\n';
                }
            } else {
                std::map<std::string, std::vector<RadicalAnnotation>> truth;
                for (const auto& j : read_json_lines(ev_truth)) {
                    const auto rec = record_from_json(j);
                    truth[rec.image_id] = rec.radicals;
                }
                std::vector<DetectionEvalRecord> records;
                for (const auto& d : ingest_predictions(ev_pred)) {
                    const auto it = truth.find(d.image_id);
                    if (it == truth.end()) throw ValidationError("eval", "no ground truth for image '" + d.image_id + "'");
                    records.push_back({d.image_id, it->second, detection_predictions(d)});
                }
                const auto v = ap50(records);
                report["ap50"] = v;
                report["per_category"] = per_category_ap(records);
                csv << "ap50," << v << '\n';
            }
            write_text_file(ev_out, report.dump(2) + "\n");
            if (!ev_csv.empty()) write_text_file(ev_csv, csv.str());
        } else if (*sp) {
            require_path(sp_dict, "dictionary");
            const auto s = make_zero_shot_split(load_dictionary(sp_dict).categories(), sp_seen, sp_unseen, sp_seed, sp_train);
            write_text_file(sp_out, split_to_json(s).dump(2) + "\n");
        } else if (*rn) {
            rn_cfg.dictionary = rn_dict;
            rn_cfg.layouts = rn_layouts;
            rn_cfg.radicals = rn_radicals;
            rn_cfg.output = rn_out;
            if (rn_seed_opt->count() > 0) rn_cfg.seed = rn_seed;
            rn_cfg.augment = rn_aug.bounds();
            rn_cfg.workers = workers;
            const json metrics = run_end_to_end(rn_cfg);
            log("info", "pipeline",
                "top1=" + metrics["overall"]["top1"].dump() + " unseen_top1=" + metrics["unseen"].value("top1", json()).dump() +
                    " ap50=" + metrics["ap50"].dump());
        }
    } catch (const Error& e) {
        const bool config = e.module() == "config" || dynamic_cast<const IoError*>(&e) != nullptr;
        log("error", e.module(), e.what());
        return config ? kConfigError : kDataError;
    } catch (const std::exception& e) {
        log("error", "cli", e.what());
        return kDataError;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    log("info", "cli", "done in " + std::to_string(ms.count()) + " ms");
    return 0;
}

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "radzero/error.hpp"
#include "radzero/layout.hpp"
#include "radzero/reasoner.hpp"
#include "radzero/toy.hpp"

using namespace radzero;

namespace {

using Cands = std::vector<std::pair<std::string, double>>;

DetectionResult detection(const std::vector<Cands>& slots, const std::vector<std::pair<std::string, double>>& structs) {
    DetectionResult r;
    r.image_id = "x";
    for (const auto& s : slots) {
        LocationSlot slot;
        for (const auto& [label, conf] : s) slot.candidates.push_back({label, conf, Box{0, 0, 1, 1}});
        r.slots.push_back(slot);
    }
    for (const auto& [label, conf] : structs) r.structures.push_back({label, conf});
    return r;
}

Dictionary chase_dict(bool with_house = false) {
    std::vector<Radical> rads = {{"swine", "swine"}, {"toe", "toe"}, {"house", "house"}};
    std::vector<CharacterEntry> entries = {
        {"swine", "Single", {"swine"}}, {"toe", "Single", {"toe"}}, {"house", "Single", {"house"}},
        {"chase", "UD", {"swine", "toe"}}};
    if (with_house) entries.push_back({"roof", "UD", {"house", "swine"}});
    return Dictionary(rads, {{"Single", 1}, {"UD", 2}}, entries);
}

const std::vector<std::string> kLabels = {"a", "b", "c", "d", "e"};

void sort_slot(LocationSlot& s) {
    std::stable_sort(s.candidates.begin(), s.candidates.end(),
                     [](const auto& x, const auto& y) { return x.conf > y.conf; });
}

struct Case {
    Dictionary dict;
    DetectionResult result;
};

// Random detection over a small label alphabet and a dictionary seeded with
// decompositions reachable from the candidates.
Case random_case(oracle::Gen& g) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 3));
    DetectionResult r;
    r.image_id = "p";
    for (std::size_t i = 0; i < n; ++i) {
        auto labels = kLabels;
        g.shuffle(labels);
        LocationSlot slot;
        const int m = g.integer(1, 4);
        for (int k = 0; k < m; ++k) slot.candidates.push_back({labels[k], g.dyadic_conf(), Box{0, 0, 1, 1}});
        sort_slot(slot);
        r.slots.push_back(slot);
    }
    std::vector<std::string> kinds = {"Single", "UD", "LR", "UMD"};
    g.shuffle(kinds);
    const int ns = g.integer(1, 4);
    for (int k = 0; k < ns; ++k) r.structures.push_back({kinds[k], g.dyadic_conf()});
    std::stable_sort(r.structures.begin(), r.structures.end(),
                     [](const auto& x, const auto& y) { return x.conf > y.conf; });

    std::vector<Radical> rads;
    std::vector<CharacterEntry> entries;
    for (const auto& l : kLabels) {
        rads.push_back({l, l});
        entries.push_back({l, "Single", {l}});
    }
    const std::vector<StructureDecl> decls = {{"Single", 1}, {"UD", 2}, {"LR", 2}, {"UMD", 3}};
    const int nc = g.integer(1, 10);
    for (int c = 0; c < nc; ++c) {
        const auto& d = decls[static_cast<std::size_t>(g.integer(1, 3))];
        CharacterEntry e{"ch" + std::to_string(c), d.kind, {}};
        for (std::size_t k = 0; k < d.slot_count; ++k) {
            if (k < n && g.coin(0.8))
                e.radicals.push_back(g.pick(r.slots[k].candidates).label);
            else
                e.radicals.push_back(g.pick(kLabels));
        }
        entries.push_back(e);
    }
    return {Dictionary(rads, decls, entries), r};
}

const ScoredCharacter* find_pred(const CharacterPrediction& p, const std::string& c) {
    for (const auto& s : p.predictions)
        if (s.character == c) return &s;
    return nullptr;
}

}  // namespace

TEST_SUITE("reasoner") {

TEST_CASE("radical-set confidence is the mean of the chosen candidates") {
    const auto r = detection({{{"swine", 0.8}}, {{"toe", 0.6}}}, {{"UD", 1.0}});
    CHECK(radical_set_confidence(r.slots, {0, 0}) == doctest::Approx(0.7).epsilon(1e-15));
    const auto ones = detection({{{"a", 1.0}}, {{"b", 1.0}}, {{"c", 1.0}}}, {{"UMD", 1.0}});
    CHECK(radical_set_confidence(ones.slots, {0, 0, 0}) == 1.0);
    CHECK(radical_set_confidence(detection({{{"a", 0.4}}}, {}).slots, {0}) == 0.4);
    CHECK_THROWS_AS(radical_set_confidence(r.slots, {0, 1}), IndexOutOfRange);
    CHECK_THROWS_AS(radical_set_confidence(r.slots, {0}), IndexOutOfRange);
}

TEST_CASE("crcm worked examples") {
    const ReasonerConfig cfg;  // t = 5, theta = 0.7
    SUBCASE("perfect confidences") {
        const auto p = crcm(chase_dict(), detection({{{"swine", 1.0}}, {{"toe", 1.0}}}, {{"UD", 1.0}}), cfg);
        REQUIRE(p.predictions.size() == 1);
        CHECK(p.predictions[0].character == "chase");
        CHECK(p.predictions[0].p_c == 1.0);
    }
    SUBCASE("weighted combination") {
        const auto p = crcm(chase_dict(), detection({{{"swine", 0.8}}, {{"toe", 0.6}}}, {{"UD", 0.9}}), cfg);
        REQUIRE(p.predictions.size() == 1);
        CHECK(p.predictions[0].p_c == doctest::Approx(0.7 * 0.7 + 0.3 * 0.9).epsilon(1e-14));
        CHECK(p.predictions[0].p_c == doctest::Approx(0.76).epsilon(1e-14));
    }
    SUBCASE("wrong top-1 radical is recovered") {
        const auto p =
            crcm(chase_dict(), detection({{{"house", 0.9}, {"swine", 0.7}}, {{"toe", 0.8}}}, {{"UD", 0.9}}), cfg);
        REQUIRE_FALSE(p.predictions.empty());
        CHECK(p.predictions[0].character == "chase");
    }
    SUBCASE("nothing matches: zero-shot rejection") {
        const auto p = crcm(chase_dict(), detection({{{"house", 0.9}}, {{"house", 0.8}}}, {{"UD", 0.9}}), cfg);
        CHECK(p.predictions.empty());
    }
    SUBCASE("structures with the wrong arity are skipped") {
        const auto p = crcm(chase_dict(), detection({{{"swine", 0.9}}, {{"toe", 0.8}}}, {{"Single", 0.9}}), cfg);
        CHECK(p.predictions.empty());
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS(check_config(ReasonerConfig{0, 0.7}));
    CHECK_THROWS(check_config(ReasonerConfig{5, 1.5}));
    CHECK_THROWS(check_config(ReasonerConfig{5, -0.1}));
    CHECK_NOTHROW(check_config(ReasonerConfig{1, 0.0}));
}

TEST_CASE("top-t enumeration") {
    SUBCASE("fewer assignments than t yields all of them") {
        const auto r = detection({{{"a", 0.9}, {"b", 0.1}}, {{"c", 0.8}, {"d", 0.2}}}, {{"UD", 0.6}, {"LR", 0.4}});
        const auto pairs = top_conf_enumerate(r.slots, r.structures, 5);
        CHECK(pairs.size() == 4 * 2);
        CHECK(top_assignments(r.slots, 5).size() == 4);
    }
    SUBCASE("t = 1 is the per-slot argmax with the top structure") {
        const auto r = detection({{{"a", 0.9}, {"b", 0.1}}, {{"c", 0.8}, {"d", 0.2}}}, {{"UD", 0.6}, {"LR", 0.4}});
        const auto pairs = top_conf_enumerate(r.slots, r.structures, 1);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].radicals.choice == Assignment{0, 0});
        CHECK(pairs[0].structure == 0);
    }
    SUBCASE("3 x 3 candidates, t = 5, against all 27 assignments") {
        const auto r = detection({{{"a", 0.9}, {"b", 0.5}, {"c", 0.25}},
                                  {{"a", 0.75}, {"b", 0.5}, {"c", 0.125}},
                                  {{"a", 0.875}, {"b", 0.625}, {"c", 0.5}}},
                                 {{"UMD", 1.0}});
        const auto all = oracle::all_assignments(r.slots);
        REQUIRE(all.size() == 27);
        const auto top = top_assignments(r.slots, 5);
        REQUIRE(top.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(top[k].choice == all[k].first);
            CHECK(top[k].p_r == doctest::Approx(all[k].second).epsilon(1e-15));
        }
    }
    CHECK_THROWS(top_conf_enumerate({}, {}, 0));
}

TEST_CASE("property: top-t assignments match brute force") {
    oracle::Gen g(41);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_case(g);
        const std::size_t t = static_cast<std::size_t>(g.integer(1, 8));
        const auto all = oracle::all_assignments(c.result.slots);
        const auto top = top_assignments(c.result.slots, t);
        REQUIRE(top.size() == std::min(t, all.size()));
        for (std::size_t k = 0; k < top.size(); ++k) {
            REQUIRE(top[k].choice == all[k].first);
            REQUIRE(top[k].p_r == all[k].second);
        }
    }
}

TEST_CASE("property: crcm matches the reference matcher") {
    oracle::Gen g(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_case(g);
        const ReasonerConfig cfg{static_cast<std::size_t>(g.integer(1, 6)), g.integer(0, 10) / 10.0};
        const auto got = crcm(c.dict, c.result, cfg).predictions;
        const auto want = oracle::crcm(c.dict, c.result, cfg.t, cfg.theta);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            REQUIRE(got[k].character == want[k].character);
            REQUIRE(std::abs(got[k].p_c - want[k].p_c) < 1e-12);
        }
    }
}

TEST_CASE("property: output is a convex combination, sorted and unique") {
    oracle::Gen g(43);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_case(g);
        const ReasonerConfig cfg{5, g.real(0.0, 1.0)};
        const auto p = crcm(c.dict, c.result, cfg).predictions;
        std::set<std::string> seen;
        for (std::size_t k = 0; k < p.size(); ++k) {
            REQUIRE(p[k].p_c >= std::min(p[k].p_r, p[k].p_s) - 1e-15);
            REQUIRE(p[k].p_c <= std::max(p[k].p_r, p[k].p_s) + 1e-15);
            REQUIRE(p[k].p_c >= 0.0);
            REQUIRE(p[k].p_c <= 1.0);
            REQUIRE(seen.insert(p[k].character).second);
            if (k > 0) REQUIRE(p[k - 1].p_c >= p[k].p_c);
        }
    }
}

TEST_CASE("property: theta endpoints select one confidence exactly") {
    oracle::Gen g(44);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_case(g);
        for (const auto& s : crcm(c.dict, c.result, {5, 1.0}).predictions) REQUIRE(s.p_c == s.p_r);
        for (const auto& s : crcm(c.dict, c.result, {5, 0.0}).predictions) REQUIRE(s.p_c == s.p_s);
    }
}

TEST_CASE("property: raising a chosen confidence never lowers that prediction") {
    oracle::Gen g(45);
    int checked = 0;
    for (int trial = 0; trial < 4000; ++trial) {
        auto c = random_case(g);
        const ReasonerConfig cfg{static_cast<std::size_t>(g.integer(1, 6)), g.real(0.0, 1.0)};
        const auto before = crcm(c.dict, c.result, cfg);
        if (before.predictions.empty()) continue;
        const auto& target = g.pick(before.predictions);
        const auto* entry = c.dict.find(target.character);
        REQUIRE(entry);
        auto raised = c.result;
        if (g.coin()) {
            // The candidate carrying this character's radical in a random slot.
            const std::size_t i = static_cast<std::size_t>(g.integer(0, static_cast<int>(raised.slots.size()) - 1));
            for (auto& cand : raised.slots[i].candidates)
                if (cand.label == entry->radicals[i]) cand.conf = std::min(1.0, cand.conf + g.integer(1, 32) / 64.0);
            sort_slot(raised.slots[i]);
        } else {
            for (auto& s : raised.structures)
                if (s.label == entry->structure) s.conf = std::min(1.0, s.conf + g.integer(1, 32) / 64.0);
            std::stable_sort(raised.structures.begin(), raised.structures.end(),
                             [](const auto& x, const auto& y) { return x.conf > y.conf; });
        }
        const auto after = crcm(c.dict, raised, cfg);
        const auto* now = find_pred(after, target.character);
        REQUIRE(now);
        REQUIRE(now->p_c >= target.p_c - 1e-15);
        ++checked;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("zero-shot completeness: perfect detections of every toy entry") {
    const Dictionary dict = toy_dictionary();
    const LayoutSet layouts = default_layouts();
    for (const auto& e : dict.entries()) {
        const auto& layout = layouts.at(e.structure);
        DetectionResult r;
        r.image_id = e.character;
        r.image_size = std::pair{256, 256};
        for (std::size_t k = 0; k < e.radicals.size(); ++k)
            r.slots.push_back({{{e.radicals[k], 1.0, slot_box(layout.slots[k], 256, 256)}}});
        r.structures = {{e.structure, 1.0}};
        // Present the slots in reverse order; alignment must restore the layout order.
        std::reverse(r.slots.begin(), r.slots.end());
        const auto p = crcm(dict, r, {}, &layouts);
        REQUIRE_FALSE(p.predictions.empty());
        CHECK(p.predictions[0].character == e.character);
        CHECK(p.predictions[0].p_c == 1.0);
    }
}

TEST_CASE("slot alignment follows box positions") {
    const LayoutSet layouts = default_layouts();
    DetectionResult r;
    r.image_size = std::pair{256, 256};
    r.slots = {{{{"toe", 1.0, Box{20, 140, 230, 250}}}}, {{{"swine", 1.0, Box{20, 5, 230, 120}}}}};
    r.structures = {{"UD", 1.0}};
    CHECK(align_slots(r, layouts.at("UD")) == std::vector<std::size_t>{1, 0});
    CHECK(crcm(chase_dict(), r, {}, &layouts).predictions.at(0).character == "chase");
    CHECK(crcm(chase_dict(), r).predictions.empty());  // detection order without alignment
}

TEST_CASE("prediction json") {
    const auto p = crcm(chase_dict(), detection({{{"swine", 1.0}}, {{"toe", 1.0}}}, {{"UD", 1.0}}));
    const auto j = prediction_to_json("img", p, 5);
    CHECK(j["image_id"] == "img");
    CHECK(j["predictions"][0]["character"] == "chase");
    CHECK(j["predictions"][0]["p_c"] == 1.0);
}

}  // TEST_SUITE

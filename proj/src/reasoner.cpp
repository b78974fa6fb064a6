#include "radzero/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "radzero/error.hpp"
#include "radzero/image_io.hpp"

namespace radzero {

void check_config(const ReasonerConfig& config) {
    if (config.t < 1) throw InvalidParams("reasoner", "t must be at least 1");
    if (!(config.theta >= 0.0 && config.theta <= 1.0)) throw InvalidParams("reasoner", "theta must lie in [0, 1]");
}

double radical_set_confidence(const std::vector<LocationSlot>& slots, const Assignment& assignment) {
    if (assignment.size() != slots.size() || slots.empty())
        throw IndexOutOfRange("reasoner", "assignment must choose one candidate per slot");
    double sum = 0.0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (assignment[i] >= slots[i].candidates.size())
            throw IndexOutOfRange("reasoner", "candidate " + std::to_string(assignment[i]) + " out of range in slot " +
                                                  std::to_string(i));
        sum += slots[i].candidates[assignment[i]].conf;
    }
    return sum / static_cast<double>(slots.size());
}

std::vector<RankedAssignment> top_assignments(const std::vector<LocationSlot>& slots, std::size_t t) {
    std::vector<RankedAssignment> out;
    if (slots.empty() || t == 0) return out;
    for (const auto& s : slots) {
        if (s.candidates.empty()) return out;
    }

    // Best-first over the lattice of index vectors. Candidate lists are sorted,
    // so bumping any index never raises the mean and successors pop later.
    auto worse = [](const RankedAssignment& a, const RankedAssignment& b) {
        if (a.p_r != b.p_r) return a.p_r < b.p_r;
        return a.choice > b.choice;
    };
    std::priority_queue<RankedAssignment, std::vector<RankedAssignment>, decltype(worse)> frontier(worse);
    std::set<Assignment> seen;
    Assignment start(slots.size(), 0);
    frontier.push({start, radical_set_confidence(slots, start)});
    seen.insert(start);
    while (!frontier.empty() && out.size() < t) {
        RankedAssignment best = frontier.top();
        frontier.pop();
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (best.choice[i] + 1 >= slots[i].candidates.size()) continue;
            Assignment next = best.choice;
            ++next[i];
            if (seen.insert(next).second) frontier.push({next, radical_set_confidence(slots, next)});
        }
        out.push_back(std::move(best));
    }
    return out;
}

std::vector<CandidatePair> top_conf_enumerate(const std::vector<LocationSlot>& slots,
                                              const std::vector<StructureCandidate>& structures, std::size_t t) {
    if (t < 1) throw InvalidParams("reasoner", "t must be at least 1");
    std::vector<CandidatePair> out;
    const auto sets = top_assignments(slots, t);
    const std::size_t n_struct = std::min(t, structures.size());
    for (const auto& set : sets) {
        for (std::size_t k = 0; k < n_struct; ++k) out.push_back({set, k});
    }
    return out;
}

std::vector<std::size_t> align_slots(const DetectionResult& result, const StructureLayout& layout) {
    const std::size_t n = result.slots.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (n != layout.slot_count() || n < 2) return perm;

    std::vector<Box> boxes;
    for (const auto& s : result.slots) boxes.push_back(s.candidates.front().box);
    double fx = 0, fy = 0, fw = 0, fh = 0;
    if (result.image_size) {
        fw = result.image_size->first;
        fh = result.image_size->second;
    } else {
        Box u = boxes.front();
        for (const auto& b : boxes) u = {std::min(u.x1, b.x1), std::min(u.y1, b.y1), std::max(u.x2, b.x2), std::max(u.y2, b.y2)};
        fx = u.x1;
        fy = u.y1;
        fw = u.width();
        fh = u.height();
    }
    std::vector<SlotRect> norm;
    for (const auto& b : boxes)
        norm.emplace_back((b.x1 - fx) / fw, (b.y1 - fy) / fh, (b.x2 - fx) / fw, (b.y2 - fy) / fh);

    auto cost = [&](const std::vector<std::size_t>& p) {
        double c = 0.0;
        for (std::size_t k = 0; k < n; ++k) c += (norm[p[k]] - layout.slots[k]).abs().sum();
        return c;
    };
    if (n <= 7) {
        std::vector<std::size_t> best = perm;
        double best_cost = cost(perm);
        while (std::next_permutation(perm.begin(), perm.end())) {
            const double c = cost(perm);
            if (c < best_cost - 1e-12) {
                best_cost = c;
                best = perm;
            }
        }
        return best;
    }
    // greedy fallback for unusually wide layouts
    std::vector<bool> used(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t d = 0; d < n; ++d) {
            if (used[d]) continue;
            const double c = (norm[d] - layout.slots[k]).abs().sum();
            if (c < best) {
                best = c;
                pick = d;
            }
        }
        used[pick] = true;
        perm[k] = pick;
    }
    return perm;
}

CharacterPrediction crcm(const Dictionary& dict, const DetectionResult& result, const ReasonerConfig& config,
                         const LayoutSet* layouts) {
    check_config(config);
    CharacterPrediction out;
    if (result.slots.empty() || result.structures.empty()) return out;

    const std::size_t n = result.slots.size();
    std::map<std::size_t, std::vector<std::size_t>> alignment;  // by structure index
    std::map<CharacterLabel, ScoredCharacter> best;

    for (const auto& pair : top_conf_enumerate(result.slots, result.structures, config.t)) {
        const auto& structure = result.structures[pair.structure];
        const auto* decl = dict.find_structure(structure.label);
        if (!decl || decl->slot_count != n) continue;

        auto it = alignment.find(pair.structure);
        if (it == alignment.end()) {
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            if (layouts) {
                if (const auto* layout = layouts->find(structure.label)) perm = align_slots(result, *layout);
            }
            it = alignment.emplace(pair.structure, std::move(perm)).first;
        }
        const auto& perm = it->second;

        std::vector<RadicalId> radicals(n);
        for (std::size_t k = 0; k < n; ++k)
            radicals[k] = result.slots[perm[k]].candidates[pair.radicals.choice[perm[k]]].label;

        const double p_r = pair.radicals.p_r;
        const double p_s = structure.conf;
        const double p_c = config.theta * p_r + (1.0 - config.theta) * p_s;
        for (const auto& c : dict.search(radicals, structure.label)) {
            auto [slot, fresh] = best.try_emplace(c, ScoredCharacter{c, p_c, p_r, p_s});
            auto& cur = slot->second;
            if (!fresh && (p_c > cur.p_c || (p_c == cur.p_c && p_r > cur.p_r))) cur = {c, p_c, p_r, p_s};
        }
    }

    for (auto& [_, s] : best) out.predictions.push_back(std::move(s));
    std::sort(out.predictions.begin(), out.predictions.end(), [](const ScoredCharacter& a, const ScoredCharacter& b) {
        if (a.p_c != b.p_c) return a.p_c > b.p_c;
        if (a.p_r != b.p_r) return a.p_r > b.p_r;
        return a.character < b.character;
    });
    return out;
}

nlohmann::json prediction_to_json(const std::string& image_id, const CharacterPrediction& p, std::size_t top_k) {
    nlohmann::json preds = nlohmann::json::array();
    for (std::size_t i = 0; i < p.predictions.size() && i < top_k; ++i)
        preds.push_back({{"character", p.predictions[i].character}, {"p_c", p.predictions[i].p_c}});
    return {{"image_id", image_id}, {"predictions", std::move(preds)}};
}

}  // namespace radzero

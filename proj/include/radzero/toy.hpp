#pragma once

#include <cstdint>
#include <filesystem>

#include "radzero/dictionary.hpp"
#include "radzero/layout.hpp"
#include "radzero/synthesis.hpp"

namespace radzero {

/// Random stroke glyph used as a stand-in radical image.
Glyph draw_stroke_radical(Rng& rng, int size = 48);

/// `count` mutually distinct stroke radicals keyed by `ids`, one exemplar each
/// unless `exemplars` > 1 (extra exemplars are small rotations of the first).
RadicalImageSet make_toy_radicals(const std::vector<RadicalId>& ids, std::uint64_t seed, std::size_t exemplars = 1);

/// 12 radicals, structures Single/UD/LR/UMD, 30 characters: one Single per
/// radical followed by 6 UD, 6 LR and 6 UMD compounds.
Dictionary toy_dictionary();

/// Writes dict.txt, layouts.json, radicals/ and run.ini under `dir`.
void write_toy_workspace(const std::filesystem::path& dir, std::uint64_t seed = 7);

}  // namespace radzero

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "radzero/glyph.hpp"

namespace radzero {

inline constexpr int kSchemaVersion = 1;

/// Reads any PNG and converts it to 8-bit grayscale.
Glyph read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Glyph& g);
std::vector<std::uint8_t> encode_png(const Glyph& g);

nlohmann::json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);

/// Sidecar object `{image, character_label, structure_label, radicals:[{label, box}]}`.
nlohmann::json annotation_to_json(const AnnotatedImage& image, const std::string& image_path);

/// Reads labels from a sidecar object; the pixels are loaded from `image` relative to `base`.
AnnotatedImage annotation_from_json(const nlohmann::json& j, const std::filesystem::path& base);

/// Writes `<dir>/<stem>.png` and `<dir>/<stem>.json`; returns the sidecar object.
nlohmann::json write_annotated(const std::filesystem::path& dir, const std::string& stem,
                               const AnnotatedImage& image);
AnnotatedImage read_annotated(const std::filesystem::path& sidecar);

/// Manifest `{schema_version, records:[sidecar...]}`; image paths are relative to the manifest.
void write_manifest(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);
std::vector<AnnotatedImage> read_manifest(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace radzero

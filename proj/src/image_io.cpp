#include "radzero/image_io.hpp"

#include <png.h>

#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "radzero/error.hpp"

namespace radzero {

namespace fs = std::filesystem;
using nlohmann::json;

Glyph read_png(const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError("image_io", "cannot read PNG " + path.string() + ": " + image.message);
    image.format = PNG_FORMAT_GRAY;
    Raster pixels(image.height, image.width);
    if (!png_image_finish_read(&image, nullptr, pixels.data(), static_cast<png_int_32>(image.width),
                               nullptr)) {
        png_image_free(&image);
        throw IoError("image_io", "cannot decode PNG " + path.string() + ": " + image.message);
    }
    return Glyph(std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const Glyph& g) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(g.width());
    image.height = static_cast<png_uint_32>(g.height());
    image.format = PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, g.pixels().data(), g.width(), nullptr))
        throw IoError("image_io", std::string("cannot size PNG buffer: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, g.pixels().data(), g.width(),
                                   nullptr))
        throw IoError("image_io", std::string("cannot encode PNG: ") + image.message);
    out.resize(size);
    return out;
}

void write_png(const fs::path& path, const Glyph& g) {
    const auto bytes = encode_png(g);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("image_io", "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

json box_to_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw ParseError("image_io", "box must be an array [x1,y1,x2,y2]");
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ParseError("image_io", "box coordinates must be integers");
    }
    Box b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
    if (!b.valid()) throw ParseError("image_io", "box must satisfy x1<x2 and y1<y2");
    return b;
}

json annotation_to_json(const AnnotatedImage& image, const std::string& image_path) {
    json radicals = json::array();
    for (const auto& r : image.radicals)
        radicals.push_back({{"label", r.label}, {"box", box_to_json(r.box)}});
    return {{"image", image_path},
            {"character_label", image.character_label},
            {"structure_label", image.structure_label},
            {"radicals", std::move(radicals)}};
}

AnnotatedImage annotation_from_json(const json& j, const fs::path& base) {
    try {
        AnnotatedImage out;
        out.character_label = j.value("character_label", "");
        out.structure_label = j.at("structure_label").get<std::string>();
        for (const auto& r : j.at("radicals"))
            out.radicals.push_back({r.at("label").get<std::string>(), box_from_json(r.at("box"))});
        out.glyph = read_png(base / j.at("image").get<std::string>());
        const auto problems = check_annotation(out);
        if (!problems.empty())
            throw ValidationError("image_io", j.at("image").get<std::string>() + ": " + problems.front());
        return out;
    } catch (const json::exception& e) {
        throw ParseError("image_io", std::string("malformed annotation record: ") + e.what());
    }
}

json write_annotated(const fs::path& dir, const std::string& stem, const AnnotatedImage& image) {
    fs::create_directories(dir);
    write_png(dir / (stem + ".png"), image.glyph);
    json sidecar = annotation_to_json(image, stem + ".png");
    write_text_file(dir / (stem + ".json"), sidecar.dump(2) + "\n");
    return sidecar;
}

AnnotatedImage read_annotated(const fs::path& sidecar) {
    return annotation_from_json(read_json_file(sidecar), sidecar.parent_path());
}

void write_manifest(const fs::path& path, const std::vector<json>& records) {
    json j{{"schema_version", kSchemaVersion}, {"records", records}};
    write_text_file(path, j.dump(1) + "\n");
}

std::vector<AnnotatedImage> read_manifest(const fs::path& path) {
    const json j = read_json_file(path);
    if (!j.contains("records") || !j["records"].is_array())
        throw ParseError("image_io", path.string() + ": manifest has no 'records' array");
    std::vector<AnnotatedImage> out;
    out.reserve(j["records"].size());
    for (const auto& r : j["records"]) out.push_back(annotation_from_json(r, path.parent_path()));
    return out;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("io", "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("io", path.string() + ": " + e.what());
    }
}

std::vector<json> read_json_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("io", "cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw ParseError("io", path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("io", "cannot write " + path.string());
    out << text;
}

}  // namespace radzero

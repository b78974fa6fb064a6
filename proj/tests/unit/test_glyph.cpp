#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "radzero/error.hpp"
#include "radzero/glyph.hpp"
#include "radzero/image_io.hpp"

using namespace radzero;

namespace {

Glyph random_glyph(oracle::Gen& g, int w, int h, double ink = 0.3) {
    Glyph out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (g.coin(ink)) out.at(x, y) = static_cast<std::uint8_t>(g.integer(0, 127));
    return out;
}

}  // namespace

TEST_SUITE("glyph") {

TEST_CASE("glyph dimensions and validity") {
    Glyph g(5, 3);
    CHECK(g.width() == 5);
    CHECK(g.height() == 3);
    CHECK(g.pixels().size() == 15);
    CHECK((g.pixels() == kBackground).all());
    CHECK_THROWS_AS(Glyph(0, 3), InvalidParams);
    CHECK_THROWS_AS(Glyph(3, -1), InvalidParams);
}

TEST_CASE("iou of the offset 2x2 boxes is one seventh") {
    const Box a{0, 0, 2, 2}, b{1, 1, 3, 3};
    CHECK(iou(a, b) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(oracle::iou_cells(a, b) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("iou edge cases") {
    CHECK(iou({0, 0, 2, 2}, {2, 0, 4, 2}) == 0.0);  // touching half-open boxes
    CHECK(iou({0, 0, 4, 4}, {1, 1, 3, 3}) == doctest::Approx(0.25));
    CHECK(iou({3, 3, 9, 9}, {3, 3, 9, 9}) == 1.0);
}

TEST_CASE("property: iou is symmetric, bounded, reflexive and matches cell counting") {
    oracle::Gen g(11);
    for (int i = 0; i < 2000; ++i) {
        const Box a = g.box(12, 12), b = g.box(12, 12);
        const double v = iou(a, b);
        REQUIRE(v == iou(b, a));
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        REQUIRE(iou(a, a) == 1.0);
        REQUIRE(std::abs(v - oracle::iou_cells(a, b)) < 1e-12);
    }
}

TEST_CASE("ink bounding box") {
    Glyph g(10, 8);
    CHECK_FALSE(has_ink(g));
    CHECK_FALSE(find_ink_box(g).has_value());
    CHECK_THROWS_AS(ink_bounding_box(g), EmptyGlyph);
    g.at(2, 3) = 0;
    g.at(6, 5) = 100;
    g.at(8, 1) = 200;  // above threshold: background
    const Box b = ink_bounding_box(g);
    CHECK(b == Box{2, 3, 7, 6});
    CHECK(find_ink_box(g, Box{5, 0, 10, 8}) == Box{6, 5, 7, 6});
    CHECK(ink_bounding_box(g, 220) == Box{2, 1, 9, 6});
}

TEST_CASE("property: pasting onto a blank canvas translates the ink box") {
    oracle::Gen g(12);
    for (int i = 0; i < 1000; ++i) {
        const int w = g.integer(1, 6), h = g.integer(1, 6);
        Glyph src = random_glyph(g, w, h);
        if (!has_ink(src)) src.at(0, 0) = 0;
        const int cw = g.integer(w, 12), ch = g.integer(h, 12);
        const int x = g.integer(0, cw - w), y = g.integer(0, ch - h);
        const Glyph out = paste(Glyph(cw, ch), src, x, y);
        REQUIRE(ink_bounding_box(out) == ink_bounding_box(src).translated(x, y));
        REQUIRE(crop(out, Box{x, y, x + w, y + h}) == src);
    }
}

TEST_CASE("paste composites by minimum and must fit") {
    Glyph canvas(4, 4);
    canvas.at(1, 1) = 10;
    Glyph src(2, 2, 50);
    const Glyph out = paste(canvas, src, 1, 1);
    CHECK(out.at(1, 1) == 10);
    CHECK(out.at(2, 2) == 50);
    CHECK(out.at(0, 0) == kBackground);
    CHECK_THROWS(paste(canvas, src, 3, 3));
}

TEST_CASE("crop outside the glyph is rejected") {
    Glyph g(4, 4);
    CHECK_THROWS(crop(g, Box{2, 2, 5, 4}));
    CHECK_THROWS(crop(g, Box{2, 2, 2, 4}));
    CHECK(crop(g, Box{1, 1, 3, 4}).width() == 2);
}

TEST_CASE("pad grows a 4x4 glyph to 8x8 with background") {
    Glyph g(4, 4, 0);
    const Glyph p = pad(g, 2);
    CHECK(p.width() == 8);
    CHECK(p.height() == 8);
    CHECK(ink_bounding_box(p) == Box{2, 2, 6, 6});
    CHECK(p.at(0, 0) == kBackground);
    CHECK(p.at(7, 7) == kBackground);
}

TEST_CASE("resize and scale") {
    oracle::Gen g(13);
    const Glyph src = random_glyph(g, 7, 5);
    CHECK(resize(src, 7, 5) == src);
    CHECK(scale(src, 1.0) == src);
    const Glyph big = resize(src, 14, 10);
    CHECK(big.width() == 14);
    CHECK(big.height() == 10);
    // Integer upscaling by 2 replicates each pixel into a 2x2 block.
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 14; ++x) REQUIRE(big.at(x, y) == src.at(x / 2, y / 2));
    CHECK(resize(big, 7, 5) == src);
    CHECK(scale(src, 2.0).width() == 14);
    CHECK_THROWS(resize(src, 0, 3));
}

TEST_CASE("rotation by zero or a full turn is the identity") {
    oracle::Gen g(14);
    const Glyph src = random_glyph(g, 9, 6);
    CHECK(rotate(src, 0.0) == src);
    CHECK(rotate(src, 360.0) == src);
}

TEST_CASE("rotation by 90 degrees on an odd square is exact") {
    Glyph g(5, 5);
    g.at(4, 2) = 0;  // right of centre
    const Glyph r = rotate(g, 90.0);
    // Positive angles turn clockwise on screen (y points down): right goes to bottom.
    CHECK(ink_bounding_box(r) == Box{2, 4, 3, 5});
}

TEST_CASE("shear keeps the centre row fixed") {
    Glyph g(9, 9);
    for (int x = 2; x < 7; ++x) g.at(x, 4) = 0;
    const Glyph s = shear(g, 0.5);
    CHECK(crop(s, Box{0, 4, 9, 5}) == crop(g, Box{0, 4, 9, 5}));
    CHECK(shear(g, 0.0) == g);
}

TEST_CASE("raster operations are pure") {
    oracle::Gen g(15);
    const Glyph src = random_glyph(g, 11, 13);
    CHECK(rotate(src, 17.0) == rotate(src, 17.0));
    CHECK(shear(src, 0.2) == shear(src, 0.2));
    CHECK(resize(src, 5, 19) == resize(src, 5, 19));
    CHECK(encode_png(src) == encode_png(src));
}

TEST_CASE("annotation invariants") {
    AnnotatedImage img;
    img.glyph = Glyph(10, 10);
    img.structure_label = "Single";
    img.radicals = {{"a", {0, 0, 5, 5}}};
    CHECK(check_annotation(img).empty());
    img.radicals.push_back({"b", {5, 5, 10, 10}});
    CHECK_FALSE(check_annotation(img).empty());  // Single with two radicals
    img.structure_label = "UD";
    CHECK(check_annotation(img).empty());
    img.radicals.back().box = {5, 5, 11, 10};
    CHECK_FALSE(check_annotation(img).empty());  // outside the glyph
}

TEST_CASE("png and sidecar round trip") {
    oracle::Gen g(16);
    const auto dir = std::filesystem::temp_directory_path() / "radzero_glyph_io";
    std::filesystem::remove_all(dir);
    AnnotatedImage img{random_glyph(g, 23, 17), "chase", "UD", {{"swine", {0, 0, 23, 8}}, {"toe", {0, 8, 23, 17}}}};
    const auto rec = write_annotated(dir, "sample", img);
    CHECK(rec["image"] == "sample.png");
    CHECK(read_png(dir / "sample.png") == img.glyph);
    CHECK(read_annotated(dir / "sample.json") == img);
    write_manifest(dir / "manifest.json", {rec});
    const auto all = read_manifest(dir / "manifest.json");
    REQUIRE(all.size() == 1);
    CHECK(all.front() == img);
    CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("box json rejects malformed input") {
    CHECK(box_from_json(nlohmann::json::array({1, 2, 3, 4})) == Box{1, 2, 3, 4});
    CHECK_THROWS(box_from_json(nlohmann::json::array({1, 2, 3})));
    CHECK_THROWS(box_from_json(nlohmann::json::array({3, 2, 1, 4})));
}

}  // TEST_SUITE

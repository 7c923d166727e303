#include "sprite/assets.hpp"
#include "sprite/geometry.hpp"

#include <catch_amalgamated.hpp>

#include <random>

#include "support/oracles.hpp"

using sprite::BBox;

TEST_CASE("iou identity and disjoint boxes") {
  const BBox a{3, 4, 10, 12};
  CHECK(sprite::iou(a, a) == 1.0);

  const BBox b{20, 20, 30, 30};
  CHECK(sprite::iou(a, b) == 0.0);
}

TEST_CASE("iou matches the hand-checked overlap 4/28") {
  const BBox a{0, 0, 4, 4};
  const BBox b{2, 2, 6, 6};
  const sprite::IouCounts counts = sprite::iou_counts(a, b);
  CHECK(counts.intersection == 4);
  CHECK(counts.union_ == 28);
  CHECK(sprite::iou(a, b) == Catch::Approx(4.0 / 28.0).epsilon(0.0));

  const oracles::PixelCounts pixels = oracles::count_pixels(a, b, 6, 6);
  CHECK(pixels.intersection == counts.intersection);
  CHECK(pixels.union_ == counts.union_);
}

TEST_CASE("analytic iou equals the raster oracle on a sampled 64x64 grid") {
  const int coords[] = {0, 9, 23, 41, 64};
  std::vector<BBox> boxes;
  for (int x0 : coords) {
    for (int x1 : coords) {
      if (x0 >= x1) continue;
      for (int y0 : coords) {
        for (int y1 : coords) {
          if (y0 >= y1) continue;
          boxes.push_back(BBox{x0, y0, x1, y1});
        }
      }
    }
  }
  for (const BBox& a : boxes) {
    for (const BBox& b : boxes) {
      const sprite::IouCounts analytic = sprite::iou_counts(a, b);
      const sprite::IouCounts raster = sprite::raster_iou_counts(a, b, 64, 64);
      REQUIRE(analytic.intersection == raster.intersection);
      REQUIRE(analytic.union_ == raster.union_);
    }
  }
}

TEST_CASE("analytic iou equals the raster oracle on random 64x64 boxes") {
  std::mt19937 rng(424242);
  auto random_box = [&]() {
    const int x0 = static_cast<int>(rng() % 60);
    const int y0 = static_cast<int>(rng() % 60);
    return BBox{x0, y0, x0 + 1 + static_cast<int>(rng() % (64 - x0 - 1 + 1)),
                y0 + 1 + static_cast<int>(rng() % (64 - y0 - 1 + 1))};
  };
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box();
    const BBox b = random_box();
    const sprite::IouCounts analytic = sprite::iou_counts(a, b);
    const sprite::IouCounts raster = sprite::raster_iou_counts(a, b, 64, 64);
    REQUIRE(analytic.intersection == raster.intersection);
    REQUIRE(analytic.union_ == raster.union_);
  }
}

TEST_CASE("clamp_box clips at the canvas edge") {
  const sprite::Clamped result = sprite::clamp_box(BBox{-5, 10, 50, 60}, 100, 100);
  CHECK(result.box == BBox{0, 10, 50, 60});
  CHECK_FALSE(result.collapsed);
}

TEST_CASE("clamp_box leaves interior boxes alone and is idempotent") {
  const BBox b{10, 10, 40, 40};
  const sprite::Clamped once = sprite::clamp_box(b, 100, 100);
  CHECK(once.box == b);
  const sprite::Clamped twice = sprite::clamp_box(once.box, 100, 100);
  CHECK(twice.box == once.box);
}

TEST_CASE("clamp_box rejects fully out-of-canvas boxes") {
  CHECK_THROWS_AS(sprite::clamp_box(BBox{120, 0, 150, 30}, 100, 100), sprite::CalibrationError);
  CHECK_THROWS_AS(sprite::clamp_box(BBox{0, -30, 30, 0}, 100, 100), sprite::CalibrationError);
}

TEST_CASE("clamp_box re-expands when min_box_px exceeds the clipped sliver") {
  const sprite::Clamped result = sprite::clamp_box(BBox{98, 10, 130, 40}, 100, 100, 5);
  CHECK(result.collapsed);
  CHECK(result.box.width() == 5);
  CHECK(result.box.x_max == 100);
  CHECK(result.box.y_min == 10);
}

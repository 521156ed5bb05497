#include <doctest.h>

#include "ircx/encoder.h"
#include "ircx/errors.h"
#include "ircx/rng.h"

using namespace ircx;
using nn::Mat;

namespace {

Points rand_points(int n, uint64_t seed) {
  Rng g = stream(seed, "pts");
  Points p(n, 3);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) p(i, c) = g.uniform(0.0, 1.0);
  return p;
}

EncoderConfig small_cfg() {
  EncoderConfig cfg;
  cfg.channels = {8, 16, 24};
  cfg.blocks = {1, 1, 1};
  cfg.neighbors = 6;
  cfg.ratio = 0.25;
  cfg.out_dim = 8;
  return cfg;
}

Mat encode(const EncoderConfig& cfg, const Points& coords, uint64_t seed) {
  nn::ParamStore ps;
  const Encoder enc = Encoder::create(ps, "enc", cfg, seed);
  const nn::PointPyramid py = nn::PointPyramid::build(
      coords, cfg.unet().scale_count(), cfg.ratio, cfg.neighbors);
  nn::Pass p(ps);
  return p.val(enc.forward(p, py));
}

}  // namespace

TEST_CASE("encoder emits one feature row per input point") {
  const Points coords = rand_points(200, 1);
  const Mat eg = encode(small_cfg(), coords, 3);
  CHECK(eg.rows() == 200);
  CHECK(eg.cols() == 8);
  CHECK(eg.allFinite());

  // different parameter seeds give different encodings
  const Mat other = encode(small_cfg(), coords, 4);
  CHECK((eg - other).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("full-size configuration handles a 10240-point cloud") {
  const Points coords = rand_points(10240, 2);
  const EncoderConfig cfg;  // [32,64,128,256,512], d=32
  const Mat eg = encode(cfg, coords, 5);
  CHECK(eg.rows() == 10240);
  CHECK(eg.cols() == 32);
  CHECK(eg.allFinite());
}

TEST_CASE("encoder is permutation equivariant") {
  const int n = 260;  // enough for 3 scales at ratio 0.25
  const Points coords = rand_points(n, 6);
  nn::ParamStore ps;
  const EncoderConfig cfg = small_cfg();
  const Encoder enc = Encoder::create(ps, "enc", cfg, 7);

  nn::Pass p(ps);
  const Mat eg =
      p.val(enc.forward(p, nn::PointPyramid::build(coords, 3, 0.25, 6)));

  const std::vector<int> perm = stream(8, "perm").permutation(n);
  Points shuffled(n, 3);
  for (int i = 0; i < n; ++i) shuffled.row(i) = coords.row(perm[i]);
  nn::Pass p2(ps);
  const Mat eg_p =
      p2.val(enc.forward(p2, nn::PointPyramid::build(shuffled, 3, 0.25, 6)));

  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst,
                     (eg_p.row(i) - eg.row(perm[i])).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-9);
}

TEST_CASE("too-small clouds are rejected before any work") {
  nn::ParamStore ps;
  const EncoderConfig cfg;  // 5 scales at ratio 0.25 need >= 256 points
  const Encoder enc = Encoder::create(ps, "enc", cfg, 1);
  const nn::PointPyramid py =
      nn::PointPyramid::build(rand_points(100, 9), 5, 0.25, 8);
  nn::Pass p(ps);
  CHECK_THROWS_AS(enc.forward(p, py), ConfigError);
}

TEST_CASE("bad encoder configs are rejected") {
  EncoderConfig cfg;
  cfg.channels.clear();
  cfg.blocks.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(count_parameters(cfg), ConfigError);

  EncoderConfig mismatch;
  mismatch.blocks = {1, 1};
  CHECK_THROWS_AS(mismatch.validate(), ConfigError);

  EncoderConfig bad_ratio;
  bad_ratio.ratio = 0.0;
  CHECK_THROWS_AS(bad_ratio.validate(), ConfigError);
}

TEST_CASE("parameter count sits in the expected band and scales quadratically") {
  // full-size configuration: transformer block counts [1,2,3,5,2]
  EncoderConfig cfg;
  cfg.blocks = {1, 2, 3, 5, 2};
  const int64_t base = count_parameters(cfg);
  CHECK(base >= 5'800'000);
  CHECK(base <= 9'800'000);

  EncoderConfig doubled = cfg;
  for (int& c : doubled.channels) c *= 2;
  doubled.out_dim *= 2;
  const double ratio =
      static_cast<double>(count_parameters(doubled)) / static_cast<double>(base);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

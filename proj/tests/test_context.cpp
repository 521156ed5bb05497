#include <doctest.h>

#include "ircx/context.h"
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

Mat rand_mat(int rows, int cols, uint64_t seed) {
  Rng g = stream(seed, "mat");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = g.uniform(-1.0, 1.0);
  return m;
}

// Two well-separated blobs; used for the receptive-field probe.
Points two_clusters(int n_per, uint64_t seed) {
  Rng g = stream(seed, "clusters");
  Points p(2 * n_per, 3);
  for (int i = 0; i < n_per; ++i)
    for (int c = 0; c < 3; ++c) {
      p(i, c) = g.uniform(0.0, 0.25);
      p(n_per + i, c) = g.uniform(0.75, 1.0);
    }
  return p;
}

}  // namespace

TEST_CASE("fuse concatenates without touching the encoding") {
  const Mat eg = rand_mat(40, 32, 1);
  const Mat ec = rand_mat(40, 4, 2);
  const Mat es = fuse(eg, ec);
  REQUIRE(es.rows() == 40);
  REQUIRE(es.cols() == 36);
  CHECK((es.leftCols(32) - eg).cwiseAbs().maxCoeff() == 0.0);
  CHECK((es.rightCols(4) - ec).cwiseAbs().maxCoeff() == 0.0);

  // tape version plus slice round trip
  nn::ParamStore ps;
  nn::Pass p(ps);
  const int fused = fuse(p, p.leaf(eg), p.leaf(ec));
  CHECK((p.val(fused) - es).cwiseAbs().maxCoeff() == 0.0);
  const int back_g = ad::slice_cols(p.tape, fused, 0, 32);
  const int back_c = ad::slice_cols(p.tape, fused, 32, 4);
  CHECK((p.val(back_g) - eg).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.val(back_c) - ec).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(fuse(eg, rand_mat(39, 4, 3)), ArgumentError);
}

TEST_CASE("presets cover the ablation table") {
  const ContextConfig u5 = context_preset("ctx.unet5");
  CHECK(u5.variant == "unet5");
  const std::vector<int> want_ch{32, 32, 64, 64, 128};
  CHECK(u5.channels == want_ch);
  const std::vector<int> want_bl{1, 1, 1, 1, 1};
  CHECK(u5.blocks == want_bl);
  CHECK(u5.l == 4);

  const ContextConfig u3 = context_preset("ctx.unet3");
  CHECK(u3.variant == "unet3");
  CHECK(u3.scale_count() == 3);

  CHECK(context_preset("ctx.mlp").variant == "mlp");
  CHECK(context_preset("ctx.wide").channels[4] == 512);
  CHECK(context_preset("ctx.deep").blocks[3] == 5);
  CHECK(context_preset("ctx.wide-deep").channels[1] == 64);
  CHECK(context_preset("ctx.l2").l == 2);
  CHECK(context_preset("ctx.l1").l == 1);
  CHECK_THROWS_AS(context_preset("ctx.nope"), ConfigError);

  ContextConfig zero_l = u5;
  zero_l.l = 0;
  CHECK_THROWS_AS(zero_l.validate(), ConfigError);
}

TEST_CASE("contextualiser output is exactly zero at init") {
  const int n = 300;
  const Points coords = rand_points(n, 4);
  const Mat eg = rand_mat(n, 16, 5);

  for (const char* preset : {"ctx.unet5", "ctx.unet3", "ctx.mlp"}) {
    INFO(preset);
    const ContextConfig cfg = context_preset(preset);
    nn::ParamStore ps;
    const Contextualizer ctx = Contextualizer::create(ps, "ctx", cfg, 16, 6);
    const nn::PointPyramid py = nn::PointPyramid::build(
        coords, std::max(1, cfg.scale_count()), cfg.ratio, cfg.neighbors);
    nn::Pass p(ps);
    const Mat ec = p.val(ctx.forward(p, p.leaf(eg), py));
    CHECK(ec.rows() == n);
    CHECK(ec.cols() == cfg.l);
    CHECK(ec.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mlp variant is pointwise, unet5 mixes across the cloud") {
  const int n_per = 150;
  const Points coords = two_clusters(n_per, 7);
  const int n = 2 * n_per;
  const Mat eg = rand_mat(n, 8, 8);

  // --- mlp: strictly per-row
  {
    nn::ParamStore ps;
    const Contextualizer ctx =
        Contextualizer::create(ps, "ctx", context_preset("ctx.mlp"), 8, 9);
    // un-zero the final layer so outputs are informative
    nn::Param& last = ps.at(ctx.mlp.layers.back().w);
    last.value = nn::init_matrix(last.value.rows(), last.value.cols(),
                                 nn::Init::kaiming_in, 99, "unzero");
    const nn::PointPyramid py = nn::PointPyramid::build(coords, 1, 0.25, 8);

    nn::Pass p(ps);
    const Mat base = p.val(ctx.forward(p, p.leaf(eg), py));

    Mat poked = eg;
    poked.row(0).array() += 0.5;
    nn::Pass p2(ps);
    const Mat out = p2.val(ctx.forward(p2, p2.leaf(poked), py));
    CHECK((out.row(0) - base.row(0)).cwiseAbs().maxCoeff() > 0.0);
    CHECK((out.bottomRows(n - 1) - base.bottomRows(n - 1))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    // permuting rows permutes output identically
    const std::vector<int> perm = stream(10, "perm").permutation(n);
    Mat eg_p(n, 8);
    for (int i = 0; i < n; ++i) eg_p.row(i) = eg.row(perm[i]);
    nn::Pass p3(ps);
    const Mat out_p = p3.val(ctx.forward(p3, p3.leaf(eg_p), py));
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst = std::max(
          worst, (out_p.row(i) - base.row(perm[i])).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-12);  // gemm kernels may reassociate across row blocks
  }

  // --- unet5: perturbing one row reaches the far cluster
  {
    nn::ParamStore ps;
    const Contextualizer ctx =
        Contextualizer::create(ps, "ctx", context_preset("ctx.unet5"), 8, 9);
    nn::Param& head = ps.at(ps.index("ctx.head.w"));
    head.value = nn::init_matrix(head.value.rows(), head.value.cols(),
                                 nn::Init::kaiming_in, 99, "unzero");
    const nn::PointPyramid py = nn::PointPyramid::build(coords, 5, 0.25, 8);

    nn::Pass p(ps);
    const Mat base = p.val(ctx.forward(p, p.leaf(eg), py));

    Mat poked = eg;
    poked.row(0).array() += 0.5;  // row 0 sits in the first cluster
    nn::Pass p2(ps);
    const Mat out = p2.val(ctx.forward(p2, p2.leaf(poked), py));
    const double far_change =
        (out.bottomRows(n_per) - base.bottomRows(n_per)).cwiseAbs().maxCoeff();
    CHECK(far_change > 0.0);
  }
}

TEST_CASE("row and width mismatches are rejected") {
  nn::ParamStore ps;
  const Contextualizer ctx =
      Contextualizer::create(ps, "ctx", context_preset("ctx.mlp"), 8, 9);
  const nn::PointPyramid py = nn::PointPyramid::build(rand_points(20, 11), 1, 0.25, 8);
  nn::Pass p(ps);
  CHECK_THROWS_AS(ctx.forward(p, p.leaf(rand_mat(20, 7, 12)), py), ConfigError);
  CHECK_THROWS_AS(ctx.forward(p, p.leaf(rand_mat(19, 8, 13)), py), ArgumentError);
}

TEST_CASE("parameter budgets match the intended scale") {
  const int64_t ctx5 = count_parameters(context_preset("ctx.unet5"), 32);
  CHECK(ctx5 >= 265'000);
  CHECK(ctx5 <= 530'000);

  const int64_t mlp = count_parameters(context_preset("ctx.mlp"), 32);
  CHECK(mlp < ctx5);

  const EncoderConfig enc_cfg;
  const int64_t enc = count_parameters(enc_cfg);
  CHECK(enc / ctx5 >= 10);
}

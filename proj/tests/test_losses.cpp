#include <doctest.h>

#include <cmath>

#include "ircx/errors.h"
#include "ircx/losses.h"
#include "ircx/rng.h"

using namespace ircx;
using ad::Mat;
using ad::Tape;

namespace {

Mat rand_mat(int rows, int cols, uint64_t seed, double lo = -1.0,
             double hi = 1.0) {
  Rng g = stream(seed, "mat");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = g.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_CASE("clamped l1 follows the formula and saturates") {
  Tape t;
  Eigen::VectorXd gt(3);
  gt << 0.02, 0.5, 0.07;
  Mat pred(3, 1);
  pred << 0.02, 0.5, 0.07;
  CHECK(t.val(clamped_l1(t, t.leaf(pred), gt, 0.1))(0, 0) == 0.0);

  // both above the clamp -> saturated, loss 0
  Eigen::VectorXd g2(1);
  g2 << 0.9;
  Mat p2(1, 1);
  p2 << 0.5;
  CHECK(t.val(clamped_l1(t, t.leaf(p2), g2, 0.1))(0, 0) == 0.0);

  // random case vs elementwise recomputation
  const Mat pr = rand_mat(64, 1, 1, 0.0, 0.3);
  Eigen::VectorXd gr = rand_mat(64, 1, 2, 0.0, 0.3).col(0);
  const double got = t.val(clamped_l1(t, t.leaf(pr), gr, 0.1))(0, 0);
  double want = 0.0;
  for (int i = 0; i < 64; ++i)
    want += std::abs(std::min(pr(i, 0), 0.1) - std::min(gr[i], 0.1));
  want /= 64.0;
  CHECK(got == doctest::Approx(want).epsilon(1e-12));

  // saturation invariance: raising any entry already above the clamp
  Mat pr2 = pr;
  for (int i = 0; i < 64; ++i)
    if (pr2(i, 0) > 0.1) pr2(i, 0) += 5.0;
  Eigen::VectorXd gr2 = gr;
  for (int i = 0; i < 64; ++i)
    if (gr2[i] > 0.1) gr2[i] += 3.0;
  const double got2 = t.val(clamped_l1(t, t.leaf(pr2), gr2, 0.1))(0, 0);
  CHECK(got2 == doctest::Approx(got).epsilon(1e-15));
}

TEST_CASE("cross entropy equals the log-sum-exp recomputation") {
  Tape t;
  // one-hot correct with huge margin
  Mat hot = Mat::Zero(3, 4);
  hot(0, 1) = 1e6;
  hot(1, 3) = 1e6;
  hot(2, 0) = 1e6;
  auto hot_labels = std::make_shared<const std::vector<int>>(
      std::vector<int>{1, 3, 0});
  CHECK(t.val(cross_entropy(t, t.leaf(hot), hot_labels))(0, 0) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // uniform logits -> ln C
  const Mat flat = Mat::Constant(5, 4, 0.37);
  auto flat_labels = std::make_shared<const std::vector<int>>(
      std::vector<int>{0, 1, 2, 3, 2});
  CHECK(t.val(cross_entropy(t, t.leaf(flat), flat_labels))(0, 0) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // random case vs manual log-sum-exp
  const Mat logits = rand_mat(16, 6, 3, -3.0, 3.0);
  std::vector<int> raw(16);
  Rng g = stream(4, "labels");
  for (int& l : raw) l = static_cast<int>(g.uniform_index(6));
  auto labels = std::make_shared<const std::vector<int>>(raw);
  const double got = t.val(cross_entropy(t, t.leaf(logits), labels))(0, 0);
  double want = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double mx = logits.row(i).maxCoeff();
    const double lse =
        mx + std::log((logits.row(i).array() - mx).exp().sum());
    want += lse - logits(i, raw[i]);
  }
  want /= 16.0;
  CHECK(got == doctest::Approx(want).epsilon(1e-9));

  // out-of-range label
  auto bad = std::make_shared<const std::vector<int>>(std::vector<int>{0, 6});
  Tape t2;
  CHECK_THROWS_AS(cross_entropy(t2, t2.leaf(rand_mat(2, 6, 5)), bad),
                  ArgumentError);
}

TEST_CASE("uncertainty combination and its gradient") {
  {
    Tape t;
    Mat l1(1, 1), l2(1, 1), s(1, 2);
    l1 << 0.7;
    l2 << 1.3;
    s << 0.0, 0.0;
    const int combined = uncertainty_combine(
        t, {t.leaf(l1), t.leaf(l2)}, t.leaf(s));
    CHECK(t.val(combined)(0, 0) == 0.7 + 1.3);  // s = 0 -> plain sum
  }
  {
    Tape t;
    Mat l1(1, 1), l2(1, 1), s(1, 2);
    l1 << 1.0;
    l2 << 1.0;
    s << std::log(2.0), std::log(2.0);
    const int combined = uncertainty_combine(
        t, {t.leaf(l1), t.leaf(l2)}, t.leaf(s));
    CHECK(t.val(combined)(0, 0) ==
          doctest::Approx(1.0 + 2.0 * std::log(2.0)).epsilon(1e-12));
  }

  // dC/ds_k = -exp(-s_k) L_k + 1, checked against finite differences
  const Mat losses = rand_mat(1, 2, 6, 0.2, 2.0);
  const Mat s0 = rand_mat(1, 2, 7, -1.0, 1.0);
  auto eval = [&](const Mat& s, Mat* grad) {
    Tape t;
    Mat la(1, 1), lb(1, 1);
    la << losses(0, 0);
    lb << losses(0, 1);
    const int si = t.leaf(s);
    const int c = uncertainty_combine(t, {t.leaf(la), t.leaf(lb)}, si);
    const double v = t.val(c)(0, 0);
    if (grad) {
      t.backward(c);
      *grad = t.grad(si);
    }
    return v;
  };
  Mat analytic;
  eval(s0, &analytic);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Mat sp = s0, sm = s0;
    sp(0, k) += h;
    sm(0, k) -= h;
    const double fd = (eval(sp, nullptr) - eval(sm, nullptr)) / (2.0 * h);
    const double closed = -std::exp(-s0(0, k)) * losses(0, k) + 1.0;
    CHECK(std::abs(analytic(0, k) - fd) /
              std::max(1.0, std::abs(fd)) < 1e-6);
    CHECK(analytic(0, k) == doctest::Approx(closed).epsilon(1e-9));
  }

  // stationary point at s_k = ln L_k
  Mat s_star(1, 2);
  s_star << std::log(losses(0, 0)), std::log(losses(0, 1));
  Mat g_star;
  eval(s_star, &g_star);
  CHECK(g_star.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("near-surface rows pick exactly the close queries") {
  QuerySet q;
  q.points.resize(5, 3);
  q.points.setZero();
  q.gt_distance.resize(5);
  q.gt_distance << 0.05, 0.2, 0.0999, 0.1, 0.001;
  const std::vector<int> rows = near_surface_rows(q, 0.1);
  CHECK(rows == std::vector<int>{0, 2, 4});  // strict inequality at the clamp
}

TEST_CASE("loss config validation") {
  LossConfig ok;
  CHECK_NOTHROW(ok.validate());
  LossConfig bad;
  bad.clamp = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  LossConfig mode;
  mode.weighting = "both";
  CHECK_THROWS_AS(mode.validate(), ConfigError);
}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "ircx/metrics.h"
#include "ircx/rng.h"

using namespace ircx;

namespace {

Points rand_points(int n, uint64_t seed) {
  Rng g = stream(seed, "pts");
  Points p(n, 3);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) p(i, c) = g.uniform(0.0, 1.0);
  return p;
}

// exhaustive double loop
std::pair<double, double> chamfer_brute(const Points& a, const Points& b) {
  double l1 = 0, l2 = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const Points& from = pass == 0 ? a : b;
    const Points& to = pass == 0 ? b : a;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < from.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < to.rows(); ++j)
        best = std::min(best, (from.row(i) - to.row(j)).norm());
      s1 += best;
      s2 += best * best;
    }
    l1 += s1 / from.rows();
    l2 += s2 / from.rows();
  }
  return {l1 / 2.0, l2 / 2.0};
}

double fscore_brute(const Points& pred, const Points& gt, double delta) {
  auto frac_within = [&](const Points& from, const Points& to) {
    int hits = 0;
    for (int i = 0; i < from.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < to.rows(); ++j)
        best = std::min(best, (from.row(i) - to.row(j)).norm());
      if (best <= delta) ++hits;
    }
    return static_cast<double>(hits) / from.rows();
  };
  const double p = frac_within(pred, gt);
  const double r = frac_within(gt, pred);
  return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

TEST_CASE("chamfer distance basics and brute-force agreement") {
  const Points a = rand_points(8, 1);
  auto [self_l1, self_l2] = chamfer(a, a);
  CHECK(self_l1 == 0.0);
  CHECK(self_l2 == 0.0);

  Points p(1, 3), q(1, 3);
  p << 0, 0, 0;
  q << 1, 0, 0;
  auto [one_l1, one_l2] = chamfer(p, q);
  CHECK(one_l1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(one_l2 == doctest::Approx(1.0).epsilon(1e-15));

  const Points b = rand_points(11, 2);
  auto [got_l1, got_l2] = chamfer(a, b);
  auto [want_l1, want_l2] = chamfer_brute(a, b);
  CHECK(got_l1 == doctest::Approx(want_l1).epsilon(1e-12));
  CHECK(got_l2 == doctest::Approx(want_l2).epsilon(1e-12));

  // symmetry
  auto [sym_l1, sym_l2] = chamfer(b, a);
  CHECK(sym_l1 == doctest::Approx(got_l1).epsilon(1e-15));
  CHECK(sym_l2 == doctest::Approx(got_l2).epsilon(1e-15));

  // empty side -> infinite sentinel
  const Points none(0, 3);
  auto [inf_l1, inf_l2] = chamfer(none, a);
  CHECK(std::isinf(inf_l1));
  CHECK(std::isinf(inf_l2));
}

TEST_CASE("fscore basics, brute-force agreement and monotonicity") {
  const Points a = rand_points(16, 3);
  CHECK(fscore(a, a, 0.005) == 1.0);

  Points far = a;
  far.col(0).array() += 10.0;
  CHECK(fscore(a, far, 0.005) == 0.0);

  const Points b = rand_points(16, 4);
  const double d = 0.25;
  CHECK(fscore(a, b, d) == doctest::Approx(fscore_brute(a, b, d)).epsilon(1e-12));
  CHECK(fscore(a, b, d) == doctest::Approx(fscore(b, a, d)).epsilon(1e-15));
  CHECK(fscore(a, b, 2 * d) >= fscore(a, b, d));
  CHECK(fscore(Points(0, 3), a, d) == 0.0);
}

TEST_CASE("semantic fscore restricts matches to same-class points") {
  Points pts = rand_points(12, 5);
  std::vector<int> labels(12);
  for (int i = 0; i < 12; ++i) labels[i] = i % 3;

  auto [perfect, per] = semantic_fscore(pts, labels, pts, labels, 0.005, 3);
  CHECK(perfect == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(per.size() == 3);
  for (double f : per) CHECK(f == doctest::Approx(1.0).epsilon(1e-15));

  // same geometry, two classes swapped everywhere -> zero overlap per class
  std::vector<int> two_class(12);
  for (int i = 0; i < 12; ++i) two_class[i] = i % 2;
  std::vector<int> two_flipped(12);
  for (int i = 0; i < 12; ++i) two_flipped[i] = 1 - two_class[i];
  auto [zero, zper] =
      semantic_fscore(pts, two_flipped, pts, two_class, 0.005, 2);
  CHECK(zero == doctest::Approx(0.0).epsilon(1e-15));

  // brute force per class
  const Points gt_pts = rand_points(12, 6);
  std::vector<int> gt_labels(12);
  Rng g = stream(7, "labels");
  for (int& l : gt_labels) l = static_cast<int>(g.uniform_index(3));
  std::vector<int> pr_labels(12);
  for (int& l : pr_labels) l = static_cast<int>(g.uniform_index(3));

  auto [mf1, per_class] =
      semantic_fscore(pts, pr_labels, gt_pts, gt_labels, 0.3, 3);
  double mean = 0.0;
  int present = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<int> pi, gi;
    for (int i = 0; i < 12; ++i) {
      if (pr_labels[i] == c) pi.push_back(i);
      if (gt_labels[i] == c) gi.push_back(i);
    }
    if (gi.empty()) {
      CHECK(std::isnan(per_class[c]));
      continue;
    }
    Points pp(pi.size(), 3), gg(gi.size(), 3);
    for (size_t i = 0; i < pi.size(); ++i) pp.row(i) = pts.row(pi[i]);
    for (size_t i = 0; i < gi.size(); ++i) gg.row(i) = gt_pts.row(gi[i]);
    const double want = pi.empty() ? 0.0 : fscore_brute(pp, gg, 0.3);
    CHECK(per_class[c] == doctest::Approx(want).epsilon(1e-12));
    mean += per_class[c];
    ++present;
  }
  CHECK(mf1 == doctest::Approx(mean / present).epsilon(1e-12));

  // C = 1 degenerates to plain fscore
  const std::vector<int> ones(12, 0);
  auto [single, sper] = semantic_fscore(pts, ones, gt_pts, ones, 0.3, 1);
  CHECK(single == doctest::Approx(fscore(pts, gt_pts, 0.3)).epsilon(1e-12));
}

TEST_CASE("miou from the confusion matrix") {
  const std::vector<int> perfect{0, 1, 2, 1, 0, 2};
  auto [one, per_one] = miou(perfect, perfect, 3);
  CHECK(one == doctest::Approx(1.0).epsilon(1e-15));

  // TP(0)=1 FP(0)=1 FN(0)=0; TP(1)=1 FP(1)=0 FN(1)=1
  const std::vector<int> gt{0, 1, 1};
  const std::vector<int> pr{0, 0, 1};
  auto [half, per_half] = miou(pr, gt, 2);
  CHECK(per_half[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(per_half[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half == doctest::Approx(0.5).epsilon(1e-15));

  // random case vs set arithmetic
  Rng g = stream(8, "labels");
  std::vector<int> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = static_cast<int>(g.uniform_index(3));
    b[i] = static_cast<int>(g.uniform_index(3));
  }
  auto [got, per] = miou(a, b, 3);
  double mean = 0.0;
  int used = 0;
  for (int c = 0; c < 3; ++c) {
    int inter = 0, uni = 0;
    for (int i = 0; i < 100; ++i) {
      const bool in_a = a[i] == c, in_b = b[i] == c;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
    if (uni == 0) {
      CHECK(std::isnan(per[c]));
      continue;
    }
    CHECK(per[c] == doctest::Approx(static_cast<double>(inter) / uni)
                        .epsilon(1e-12));
    mean += per[c];
    ++used;
  }
  CHECK(got == doctest::Approx(mean / used).epsilon(1e-12));

  // relabeling permutation: values permute, mean unchanged
  auto relabel = [](std::vector<int> v) {
    for (int& x : v) x = (x + 1) % 3;
    return v;
  };
  auto [got2, per2] = miou(relabel(a), relabel(b), 3);
  CHECK(got2 == doctest::Approx(got).epsilon(1e-12));
  for (int c = 0; c < 3; ++c)
    CHECK(per2[(c + 1) % 3] == doctest::Approx(per[c]).epsilon(1e-12));
}

TEST_CASE("reports serialize with paper scaling and dash sentinels") {
  MetricReport r;
  r.cd_l1 = 0.0123;
  r.cd_l2 = 0.000456;
  r.f1_delta = 0.9;
  r.f1_2delta = 0.95;
  // mf1/miou left NaN: geometry-only model

  const std::string kv = report_kv(r);
  CHECK(kv.find("cd_l1_x100=1.23") != std::string::npos);
  CHECK(kv.find("cd_l2_x10000=4.56") != std::string::npos);
  CHECK(kv.find("miou=-") != std::string::npos);

  const std::string header = report_csv_header();
  CHECK(header ==
        "name,cd_l1_x100,cd_l2_x10000,f1_delta,f1_2delta,mf1_delta,"
        "mf1_2delta,miou");
  const std::string row = report_csv_row("room0", r);
  CHECK(row.substr(0, 6) == "room0,");
  CHECK(row.find("-") != std::string::npos);

  // aggregation ignores NaN fields
  MetricReport r2;
  r2.cd_l1 = 0.02;
  r2.miou = 0.5;
  const MetricReport mean = aggregate_reports({r, r2});
  CHECK(mean.cd_l1 == doctest::Approx((0.0123 + 0.02) / 2).epsilon(1e-12));
  CHECK(mean.miou == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::isnan(aggregate_reports({}).cd_l1));
}

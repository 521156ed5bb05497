#include <doctest.h>

#include "ircx/config.h"
#include "ircx/errors.h"

using namespace ircx;

TEST_CASE("config defaults validate and echo round-trips") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  const std::string echoed = cfg.echo();
  RunConfig back = RunConfig::parse_text(echoed);
  CHECK(back.echo() == echoed);  // echo is a fixed point
}

TEST_CASE("unknown keys are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("training.lrr", "0.1"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("nope = 1\n"), ConfigError);
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(RunConfig::parse_text("training.lr = 1\ntraining.lr = 2\n"),
                  ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
  RunConfig cfg = RunConfig::parse_text(
      "# heading\n\n  training.lr = 0.5  # trailing\n");
  CHECK(cfg.get_double("training.lr") == 0.5);
}

TEST_CASE("typed views pick up overrides") {
  RunConfig cfg;
  cfg.set("model.encoder_channels", "8,16,24,32,40");
  cfg.set("model.d", "6");
  cfg.set("training.regime", "geometry_only");
  const ModelConfig m = cfg.model();
  CHECK(m.encoder.out_dim == 6);
  CHECK(m.encoder.channels == std::vector<int>{8, 16, 24, 32, 40});
  // context tracks the encoder's sampling settings
  CHECK(m.context.neighbors == m.encoder.neighbors);
  const RegimeConfig r = cfg.regime();
  CHECK(r.regime == Regime::geometry_only);
  CHECK(r.loss.weighting == "single");  // auto resolves by regime
  cfg.set("training.regime", "joint");
  CHECK(cfg.regime().loss.weighting == "uncertainty");
}

TEST_CASE("bad values fail validation with ConfigError") {
  RunConfig cfg;
  cfg.set("metrics.delta", "-1");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  RunConfig cfg2;
  cfg2.set("data.synth_style", "c");
  CHECK_THROWS_AS(cfg2.validate(), ConfigError);

  RunConfig cfg3;
  cfg3.set("model.encoder_channels", "8,nope");
  CHECK_THROWS_AS(cfg3.get_ints("model.encoder_channels"), ConfigError);
}

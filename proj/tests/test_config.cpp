#include <gtest/gtest.h>

#include "fidbench/config.hpp"
#include "fidbench/error.hpp"

namespace fidbench {
namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config_toml(text, "cfg.toml");
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, ParsesAllFields) {
  ExperimentConfig cfg = parse_config_toml(R"(# comment
dimension = 4
prior = "hilbert_schmidt"   # trailing comment
n_particles = 2000
n_shots = 150
n_trials = 20
measurement = "haar_basis"
seed = 1234
report_every = 3

[resample]
a = 0.95
ess_fraction = 0.25
epsilon = 0.0
pure_preserving = true
)");
  EXPECT_EQ(cfg.dimension, 4);
  EXPECT_EQ(cfg.prior, Prior::hilbert_schmidt);
  EXPECT_EQ(cfg.n_particles, 2000);
  EXPECT_EQ(cfg.n_shots, 150);
  EXPECT_EQ(cfg.n_trials, 20);
  EXPECT_EQ(cfg.measurement, MeasurementKind::haar_basis);
  EXPECT_EQ(cfg.seed, 1234u);
  EXPECT_EQ(cfg.report_every, 3);
  EXPECT_DOUBLE_EQ(cfg.resample.a, 0.95);
  EXPECT_DOUBLE_EQ(cfg.resample.ess_fraction, 0.25);
  EXPECT_DOUBLE_EQ(cfg.resample.epsilon, 0.0);
  EXPECT_TRUE(cfg.resample.pure_preserving);
}

TEST(Config, DefaultsAndReportEvery) {
  ExperimentConfig cfg = parse_config_toml("");
  EXPECT_EQ(cfg.dimension, 2);
  EXPECT_EQ(cfg.effective_report_every(), 1);
  cfg = parse_config_toml("dimension = 8");
  EXPECT_EQ(cfg.effective_report_every(), 5);
  cfg = parse_config_toml("dimension = 8\nreport_every = 2");
  EXPECT_EQ(cfg.effective_report_every(), 2);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(error_of("dimension = 2\nbogus = 1\n").find("cfg.toml:2:"), std::string::npos);
  EXPECT_NE(error_of("dimension = 2\n\nn_particles = 5\n").find("cfg.toml:3: n_particles"), std::string::npos);
  EXPECT_NE(error_of("prior = \"uniform\"").find("cfg.toml:1:"), std::string::npos);
  EXPECT_NE(error_of("dimension = \"two\"").find("cfg.toml:1:"), std::string::npos);
  EXPECT_NE(error_of("dimension = 2\ndimension = 3").find("cfg.toml:2:"), std::string::npos);
  EXPECT_NE(error_of("[resample]\na = 0").find("cfg.toml:2: resample.a"), std::string::npos);
  EXPECT_NE(error_of("[resample]\nepsilon = 1.0").find("cfg.toml:2: resample.epsilon"), std::string::npos);
  EXPECT_NE(error_of("n_trials = 0").find("cfg.toml:1:"), std::string::npos);
  EXPECT_NE(error_of("n_shots = -1").find("cfg.toml:1:"), std::string::npos);
  EXPECT_NE(error_of("dimension = 1").find("cfg.toml:1:"), std::string::npos);
  EXPECT_NE(error_of("[resample\n").find("cfg.toml:1:"), std::string::npos);
  EXPECT_NE(error_of("seed 3").find("cfg.toml:1:"), std::string::npos);
}

TEST(Config, TomlRoundTrip) {
  ExperimentConfig cfg;
  cfg.dimension = 3;
  cfg.prior = Prior::arcsine;
  cfg.n_particles = 77;
  cfg.n_shots = 0;
  cfg.n_trials = 4;
  cfg.measurement = MeasurementKind::haar_basis;
  cfg.seed = 99;
  cfg.report_every = 7;
  cfg.resample.a = 0.1 + 0.2;
  cfg.resample.epsilon = 1.0 / 3.0;
  ExperimentConfig back = parse_config_toml(config_to_toml(cfg));
  EXPECT_EQ(config_to_toml(back), config_to_toml(cfg));
  EXPECT_EQ(back.resample.a, cfg.resample.a);
  EXPECT_EQ(back.resample.epsilon, cfg.resample.epsilon);
  EXPECT_EQ(back.prior, cfg.prior);
}

TEST(Config, RequireValidListsEveryIssue) {
  ExperimentConfig cfg;
  cfg.dimension = 1;
  cfg.n_particles = 3;
  try {
    require_valid(cfg, "--flags");
    FAIL();
  } catch (const FormatError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("--flags: dimension"), std::string::npos);
    EXPECT_NE(msg.find("--flags: n_particles"), std::string::npos);
  }
  EXPECT_EQ(check_config(ExperimentConfig{}).size(), 0u);
}

}  // namespace
}  // namespace fidbench

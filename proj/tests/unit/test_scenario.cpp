#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "teleop/scenario.hpp"

namespace teleop {
namespace {

const std::filesystem::path kShipped =
    std::filesystem::path(TELEOP_SOURCE_DIR) / "scenarios" / "paper_sec4.cfg";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

TEST(Scenario, LoadsShippedConfig) {
  const auto sc = load_scenario(kShipped);
  EXPECT_EQ(sc.master.mass, 0.5);
  EXPECT_EQ(sc.slave.damping, 1.0);
  EXPECT_EQ(sc.human.stiffness, 10.0);
  EXPECT_EQ(sc.human.damping, 1.0);
  EXPECT_EQ(sc.wall.position, 4.0);
  EXPECT_EQ(sc.gains.kp, 1.0);
  EXPECT_EQ(sc.gains.kv, 10.0);
  EXPECT_EQ(sc.gains.kd, 2.0);
  EXPECT_EQ(sc.gains.p_eps, 0.002);
  EXPECT_EQ(sc.channel.T, 0.006);
  EXPECT_EQ(sc.channel.eps_min, 0.006);
  EXPECT_EQ(sc.operator_force.start, 10.0);
  EXPECT_EQ(sc.operator_force.stop, 20.0);
  EXPECT_EQ(sc.duration, 40.0);
  EXPECT_EQ(sc.integrator_substeps, 10);
  EXPECT_FALSE(sc.nonidealities.has_value());
  EXPECT_EQ(sc.mode, ControlMode::Sampled);
}

TEST(Scenario, MissingSection) {
  const std::string text = replace(read_file(kShipped), "[gains]", "[unused_gains]");
  try {
    parse_scenario(text);
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.section(), "unused_gains");
  }
  std::string no_gains = read_file(kShipped);
  const auto a = no_gains.find("[gains]");
  const auto b = no_gains.find("[channel]");
  no_gains.erase(a, b - a);
  try {
    parse_scenario(no_gains);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("gains"), std::string::npos);
  }
}

TEST(Scenario, FractionalDelayRejected) {
  const std::string text = replace(read_file(kShipped), "d1 = 0", "d1 = 1.5");
  try {
    parse_scenario(text);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("d1"), std::string::npos);
  }
}

TEST(Scenario, UnknownKeyCarriesLineAndSection) {
  const std::string text = "[master]\nmass = 1\ndamping = 1\nstiffness = 3\n";
  try {
    parse_scenario(text);
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.section(), "master");
    EXPECT_NE(std::string(e.what()).find("stiffness"), std::string::npos);
  }
}

TEST(Scenario, MalformedLines) {
  EXPECT_THROW(parse_scenario("[master\nmass = 1\n"), ParseError);
  EXPECT_THROW(parse_scenario("mass = 1\n"), ParseError);
  EXPECT_THROW(parse_scenario("[master]\nmass 1\n"), ParseError);
  EXPECT_THROW(parse_scenario(replace(read_file(kShipped), "mass = 0.5", "mass = abc")),
               ParseError);
  EXPECT_THROW(parse_scenario("[master]\nmass = 1\nmass = 2\n"), ParseError);
}

TEST(Scenario, InvariantBreachIsValidationError) {
  const std::string text = replace(read_file(kShipped), "kp = 1", "kp = 0");
  EXPECT_THROW(parse_scenario(text), ValidationError);
}

TEST(Scenario, OptionalSectionsAndEnums) {
  std::string text = read_file(kShipped);
  text += "\n[nonidealities]\nnoise_std = 0.001\n";
  text = replace(text, "seed = 0", "seed = 0\nmode = continuous\nkernel = tustin\ngrid_spacing = linear");
  const auto sc = parse_scenario(text);
  ASSERT_TRUE(sc.nonidealities.has_value());
  EXPECT_EQ(sc.nonidealities->noise_std, 0.001);
  EXPECT_EQ(sc.nonidealities->actuator_limit, 5.0);
  EXPECT_EQ(sc.mode, ControlMode::Continuous);
  EXPECT_EQ(sc.kernel, DerivativeKernel::Tustin);
  EXPECT_EQ(sc.analysis.spacing, GridSpacing::Linear);
}

TEST(Scenario, RoundTrip) {
  auto sc = load_scenario(kShipped);
  sc.nonidealities = NonidealityConfig{};
  sc.nonidealities->noise_std = 0.1 + 0.2;  // not exactly representable in short form
  sc.channel.jitter = true;
  sc.channel.eps_min = 0.004;
  sc.seed = 0xFFFFFFFFFFFFull;
  sc.master_initial = {0.25, -1.0 / 3.0};
  const auto back = parse_scenario(serialize_scenario(sc));
  EXPECT_EQ(back, sc);
  EXPECT_EQ(scenario_hash(back), scenario_hash(sc));
  sc.seed += 1;
  EXPECT_NE(scenario_hash(back), scenario_hash(sc));
  EXPECT_EQ(scenario_hash(sc).size(), 16u);
}

TEST(Scenario, SaveAndLoad) {
  const auto sc = load_scenario(kShipped);
  const auto path = std::filesystem::temp_directory_path() / "teleop_roundtrip_test.cfg";
  save_scenario(path, sc);
  EXPECT_EQ(load_scenario(path), sc);
  std::filesystem::remove(path);
  EXPECT_THROW(load_scenario(path), Error);
}

}  // namespace
}  // namespace teleop

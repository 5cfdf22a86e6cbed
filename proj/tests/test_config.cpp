#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "soliton/config.hpp"
#include "soliton/run.hpp"

using namespace soliton;
using nlohmann::ordered_json;

namespace {

ordered_json base() {
  return ordered_json::parse(R"({"command": "profile", "equation": "nls",
                                 "model": {"family": "soler_power", "k": 1, "m": 1},
                                 "omega": 0.5, "grid": {"N": 128}})");
}

std::string error_of(const ordered_json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("soliton_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesMinimal) {
  const auto c = parse_config(base());
  EXPECT_EQ(c.command, Command::profile);
  EXPECT_EQ(c.equation, Equation::nls);
  EXPECT_EQ(c.model.k, 1);
  EXPECT_FALSE(c.grid.L.has_value());
  EXPECT_EQ(c.grid.N, 128);
  EXPECT_EQ(c.tolerances.re_tol, 1e-3);
  EXPECT_EQ(c.output.dir, "out");
}

TEST(Config, UnknownKeysAreNamed) {
  auto j = base();
  j["gird"] = 1;
  EXPECT_NE(error_of(j).find("'gird'"), std::string::npos);
  j = base();
  j["tolerances"] = {{"re_tol", 1e-3}, {"retol", 2}};
  EXPECT_NE(error_of(j).find("tolerances.retol"), std::string::npos);
  j = base();
  j["model"]["power"] = 3;
  EXPECT_NE(error_of(j).find("model.power"), std::string::npos);
}

TEST(Config, ValidationNamesTheField) {
  auto j = base();
  j["grid"]["N"] = -4;
  EXPECT_NE(error_of(j).find("grid.N"), std::string::npos);
  j["grid"]["N"] = 15;
  EXPECT_NE(error_of(j).find("grid.N"), std::string::npos);
  j = base();
  j.erase("omega");
  EXPECT_NE(error_of(j).find("omega"), std::string::npos);
  j = base();
  j["model"]["k"] = 0;
  EXPECT_NE(error_of(j).find("model.k"), std::string::npos);
  j = base();
  j["output"] = {{"formats", {"csv", "png"}}};
  EXPECT_NE(error_of(j).find("png"), std::string::npos);
  j = base();
  j["model"] = {{"family", "custom"}};
  EXPECT_NE(error_of(j).find("custom"), std::string::npos);
  j = base();
  j["command"] = "scan";
  EXPECT_NE(error_of(j).find("omega_grid"), std::string::npos);
}

TEST(Config, CommandLineMustAgree) {
  EXPECT_THROW(parse_config(base(), Command::scan), ConfigError);
  auto j = base();
  j.erase("command");
  EXPECT_EQ(parse_config(j, Command::profile).command, Command::profile);
  EXPECT_THROW(parse_config(j), ConfigError);
  EXPECT_THROW(parse_command("plot"), ConfigError);
}

TEST(Config, DerrickDefaultsToDemo) {
  const auto c = parse_config(ordered_json::parse(R"({"command": "derrick"})"));
  EXPECT_EQ(c.equation, Equation::nlw);
  EXPECT_EQ(c.model.coefficients, NlwModel::default_demo().coefficients());
}

TEST(Config, EffectiveConfigRoundTrips) {
  auto j = base();
  j["grid"]["L"] = 25.0;
  j["tolerances"] = {{"disk_radius", 0.02}};
  const auto c = parse_config(j);
  const auto e = effective_config(c);
  EXPECT_EQ(e["tolerances"]["band_distance"], "auto");
  EXPECT_EQ(e["tolerances"]["disk_radius"], 0.02);
  const auto again = effective_config(parse_config(e));
  EXPECT_EQ(e.dump(), again.dump());
}

TEST(Config, HashIgnoresOutputAndThreads) {
  auto a = parse_config(base());
  auto b = a;
  b.output.dir = "elsewhere";
  b.threads = 4;
  EXPECT_EQ(config_hash_input(a), config_hash_input(b));
  b.grid.N = 256;
  EXPECT_NE(config_hash_input(a), config_hash_input(b));
  EXPECT_EQ(stable_hash("abc"), stable_hash("abc"));
  EXPECT_EQ(stable_hash("").size(), 16u);
}

TEST(Run, ProfileWritesFilesWithHeaders) {
  auto c = parse_config(base());
  c.output.dir = scratch("profile").string();
  std::ostringstream log;
  EXPECT_EQ(run(c, log), 0);
  const std::filesystem::path d = c.output.dir;
  for (const char* f : {"effective_config.json", "profile.csv", "profile.json", "profile.svg"})
    EXPECT_TRUE(std::filesystem::exists(d / f)) << f;
  const auto csv = slurp(d / "profile.csv");
  EXPECT_EQ(csv.rfind("# soliton-spectra ", 0), 0u);
  EXPECT_NE(csv.find("# config_hash " + stable_hash(config_hash_input(c))), std::string::npos);
  EXPECT_NE(csv.find("# checks profile_residual"), std::string::npos);
  EXPECT_NE(csv.find("\nx,phi\n"), std::string::npos);
}

TEST(Run, ScanIsDeterministicAcrossThreadCounts) {
  auto j = ordered_json::parse(R"({"command": "scan", "equation": "nls", "model": {"k": 3},
                                   "omega_grid": {"start": 0.3, "stop": 0.6, "count": 3},
                                   "grid": {"N": 128}, "output": {"formats": ["csv", "json"]}})");
  auto c = parse_config(j);
  c.output.dir = scratch("scan1").string();
  std::ostringstream log;
  EXPECT_EQ(run(c, log), 0);
  auto again = load_config((std::filesystem::path(c.output.dir) / "effective_config.json").string());
  again.output.dir = scratch("scan2").string();
  again.threads = 3;
  EXPECT_EQ(run(again, log), 0);
  for (const char* f : {"scan.csv", "scan.json", "scan_Q.csv"})
    EXPECT_EQ(slurp(std::filesystem::path(c.output.dir) / f), slurp(std::filesystem::path(again.output.dir) / f)) << f;
}

TEST(Run, VerifyPassesOnDiracExample) {
  auto j = ordered_json::parse(R"({"command": "verify", "equation": "dirac1d", "model": {"k": 1},
                                   "omega": 0.8, "grid": {"N": 256}, "output": {"formats": ["json"]}})");
  auto c = parse_config(j);
  c.output.dir = scratch("verify").string();
  const auto rows = verify_checks(c);
  bool has_charge = false;
  for (const auto& r : rows) {
    EXPECT_TRUE(r.pass) << r.name << " " << r.value;
    has_charge = has_charge || r.tag == "charge_closed_form";
  }
  EXPECT_TRUE(has_charge);
}

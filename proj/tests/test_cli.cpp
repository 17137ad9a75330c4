#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using uncertainty::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "uncertainty");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = uncertainty::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("bound subcommand", "[cli]") {
  const auto r = invoke({"bound", "--l2", "2", "--r", "0"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("omega").get<double>() == 2.5);
  CHECK(j.at("heisenberg").get<double>() == 1.5);
  CHECK_THAT(j.at("w_as_printed").get<double>(), Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_FALSE(j.at("w_consistent").get<bool>());
  CHECK(j.at("omega_min").get<double>() == 2.5);

  const auto z = json::parse(invoke({"bound", "--l2", "0", "--r", "4"}).out);
  CHECK(z.at("omega").get<double>() == 1.5);
  CHECK(z.at("w_as_printed").is_null());

  const auto infeasible = json::parse(invoke({"bound", "--l2", "3", "--r", "1"}).out);
  CHECK_FALSE(infeasible.at("feasible").get<bool>());
  CHECK(infeasible.at("omega_min").is_null());
}

TEST_CASE("example subcommand", "[cli]") {
  const auto r = invoke({"example", "--l0", "3", "--l2", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK_THAT(j.at("product").get<double>(), Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT(j.at("R").get<double>(), Catch::Matchers::WithinAbs(20.0, 1e-12));
  CHECK_THAT(j.at("omega").get<double>(), Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK(j.at("saturated").get<bool>());
  CHECK(j.at("state").get<uncertainty::SuperpositionState>().size() == 2);
  CHECK(invoke({"example", "--l0", "1", "--l2", "0.5"}).code == 2);
}

TEST_CASE("solve and omega-min subcommands", "[cli]") {
  const auto s = json::parse(invoke({"solve", "--triple", "2", "1", "0", "--l2", "3", "--f", "15"}).out);
  CHECK_THAT(s.at("omega").get<double>(), Catch::Matchers::WithinAbs(2.625, 1e-12));
  CHECK(s.at("domain") == "Dom2");
  const auto viaR = json::parse(invoke({"solve", "--triple", "2", "1", "0", "--l2", "3", "--r", "6"}).out);
  CHECK(viaR.at("probs") == s.at("probs"));
  CHECK(invoke({"solve", "--triple", "2", "1", "0", "--l2", "3"}).code == 2);
  CHECK(invoke({"solve", "--triple", "2", "1", "0", "--l2", "3", "--f", "15", "--r", "6"}).code == 2);

  const auto m = json::parse(invoke({"omega-min", "--l2", "3", "--r", "6"}).out);
  CHECK(m.at("solution").at("l1") == 2);
  CHECK_FALSE(m.at("w_consistent").get<bool>());
  CHECK(invoke({"omega-min", "--l2", "3", "--r", "1"}).code == 2);
  CHECK(invoke({"omega-min", "--l2", "3", "--r", "6", "--lmax", "2"}).code == 2);
}

TEST_CASE("numerical check subcommands", "[cli]") {
  const auto v = invoke({"verify-basis", "--states", "20"});
  REQUIRE(v.code == 0);
  CHECK(json::parse(v.out).at("passed").get<bool>());

  const auto sc = invoke({"scan", "--samples", "2000", "--check"});
  REQUIRE(sc.code == 0);
  const auto rep = json::parse(sc.out).get<uncertainty::ScanReport>();
  CHECK(rep.violations == 0);
  CHECK(rep.seed == uncertainty::cli::default_seed);
  CHECK(sc.out == invoke({"scan", "--samples", "2000", "--check", "--threads", "1"}).out);

  const auto mn = invoke({"minimize", "--l2", "3", "--r", "6", "--lmax", "6", "--restarts", "3", "--check"});
  REQUIRE(mn.code == 0);
  const auto j = json::parse(mn.out);
  CHECK(j.at("check_passed").get<bool>());
  CHECK_THAT(j.at("best_product").get<double>(), Catch::Matchers::WithinAbs(2.625, 1e-4));
  CHECK(j.get<uncertainty::OptimizeResult>().converged);
}

TEST_CASE("usage errors", "[cli]") {
  const auto none = invoke({});
  CHECK(none.code == 2);
  CHECK(none.err.find("Usage") != std::string::npos);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"bound", "--l2", "abc", "--r", "0"}).code == 2);
  CHECK(invoke({"bound", "--l2", "-1", "--r", "0"}).code == 2);
  CHECK(invoke({"bound", "--l2", "1"}).code == 2);
  CHECK(invoke({"curve", "--r", "10", "--lmax", "5", "--steps", "1"}).code == 2);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("minimize") != std::string::npos);
}

TEST_CASE("output option writes the report to a file", "[cli]") {
  const auto path = std::filesystem::temp_directory_path() / "uncertainty_cli_test.json";
  std::filesystem::remove(path);
  const auto r = invoke({"bound", "--l2", "3", "--r", "6", "--output", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(json::parse(read_file(path)).at("omega_min").get<double>() == 2.625);
  std::filesystem::remove(path);
  CHECK(invoke({"bound", "--l2", "3", "--r", "6", "--output", "/nonexistent/dir/x.json"}).code == 1);
}

TEST_CASE("curve output is byte-stable against golden files", "[cli][golden]") {
  for (const char* R : {"1000", "10000", "100000"}) {
    const auto a = invoke({"curve", "--r", R, "--lmax", "20", "--steps", "201"});
    const auto b = invoke({"curve", "--r", R, "--lmax", "20", "--steps", "201"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto golden = read_file(std::filesystem::path(GOLDEN_DIR) / (std::string("curve_R") + R + ".csv"));
    CHECK(a.out == golden);
  }
}

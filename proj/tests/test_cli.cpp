// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_options.hpp"

using namespace ldc_cli;

namespace {

ParseOutcome parse(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "ldc_bench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  ParseOutcome o = parse_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return o;
}

}  // namespace

TEST_CASE("fractions are exact") {
  CHECK(parse_fraction("1/16") == 16);
  CHECK(parse_fraction("1/64") == 64);
  CHECK_FALSE(parse_fraction("0.0625").has_value());
  CHECK_FALSE(parse_fraction("2/16").has_value());
  CHECK_FALSE(parse_fraction("1/").has_value());
  CHECK_FALSE(parse_fraction("1/0").has_value());
  CHECK_FALSE(parse_fraction("1/16x").has_value());
}

TEST_CASE("vectors") {
  CHECK(parse_vector("0,3") == std::pair{0.0, 3.0});
  CHECK(parse_vector("-1.5,1e1") == std::pair{-1.5, 10.0});
  CHECK_FALSE(parse_vector("0;3").has_value());
  CHECK_FALSE(parse_vector("0,").has_value());
}

TEST_CASE("empty arguments print usage and fail") {
  std::vector<const char*> argv{"ldc_bench"};
  std::ostringstream out, err;
  const ParseOutcome o = parse_cli(1, argv.data(), out, err);
  CHECK_FALSE(o.spec.has_value());
  CHECK(o.exit_code != 0);
  CHECK(out.str().find("Usage") != std::string::npos);
}

TEST_CASE("table selection") {
  const ParseOutcome o = parse({"--table", "1"});
  REQUIRE(o.spec.has_value());
  CHECK(o.spec->table == 1);
  CHECK(o.spec->rows.empty());
  CHECK_FALSE(o.spec->has_domain);

  const ParseOutcome p = parse({"--domain", "slit", "--b", "0,10", "--mode", "parallel",
                                "--table", "8", "--rows", "1,3"});
  REQUIRE(p.spec.has_value());
  CHECK(p.spec->domain == "slit");
  CHECK(p.spec->by == 10.0);
  CHECK(p.spec->mode == "parallel");
  CHECK(p.spec->rows == std::vector<std::size_t>{0, 2});
}

TEST_CASE("single runs") {
  const ParseOutcome o =
      parse({"--domain", "lshape", "--b", "1,1", "--H", "1/32", "--levels", "4", "--s", "0.5",
             "--out", "x.csv"});
  REQUIRE(o.spec.has_value());
  CHECK(o.spec->coarse_n == 32);
  CHECK(o.spec->levels == 4);
  CHECK(o.spec->bx == 1.0);
  CHECK(o.spec->s == 0.5);
  CHECK_FALSE(o.spec->gamma.has_value());
  CHECK(o.spec->out == "x.csv");
}

TEST_CASE("configuration errors") {
  std::string err;
  CHECK(parse({"--bogus"}, &err).exit_code == kExitConfig);
  CHECK(parse({"--H", "0.0625"}, &err).exit_code == kExitConfig);
  CHECK(err.find("1/N") != std::string::npos);
  CHECK(parse({"--b", "3"}).exit_code == kExitConfig);
  CHECK(parse({"--domain", "cube"}).exit_code == kExitConfig);
  CHECK(parse({"--mode", "fast"}).exit_code == kExitConfig);
  CHECK(parse({"--table", "9"}).exit_code == kExitConfig);
  CHECK(parse({"--rows", "1"}).exit_code == kExitConfig);
  CHECK(parse({"--table", "1", "--rows", "0"}).exit_code == kExitConfig);
  CHECK(parse({"--table", "1", "--levels", "3"}).exit_code == kExitConfig);
}

TEST_CASE("config files are overridden by flags") {
  const auto path = std::filesystem::temp_directory_path() / "ldc_cli_test.ini";
  {
    std::ofstream f(path);
    f << "domain = slit\nb = \"0,3\"\nH = \"1/32\"\nlevels = 2\n";
  }
  const ParseOutcome o = parse({"--config", path.string(), "--levels", "5"});
  std::filesystem::remove(path);
  REQUIRE(o.spec.has_value());
  CHECK(o.spec->domain == "slit");
  CHECK(o.spec->has_domain);
  CHECK(o.spec->by == 3.0);
  CHECK(o.spec->coarse_n == 32);
  CHECK(o.spec->levels == 5);
}

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "centerbias/centerbias.hpp"

using namespace centerbias;
namespace fs = std::filesystem;

namespace {

const char* kChi4 = R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 10})";
const char* k11a1 = R"({"lfunction": {"family": "elliptic", "model": [0, -1, 1, -10, -20],
                        "conductor": 11, "rank": 0}, "xmax": 5})";

double num(const Cell& c) { return std::get<double>(c); }

std::size_t col(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  ADD_FAILURE() << "no column " << name;
  return 0;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "centerbias_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesBuiltinCharacter) {
  const auto c = parse_config_text(kChi4);
  EXPECT_EQ(c.family, Family::dirichlet);
  EXPECT_EQ(c.modulus, 4u);
  EXPECT_EQ(c.R, -1);
  EXPECT_EQ(c.nu, 1);
  EXPECT_EQ(c.xmax, 10u);
  EXPECT_EQ(c.grid(), std::vector<double>{10.0});
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config_text("[1, 2]"), ValidationError);
  EXPECT_THROW(parse_config_text("{not json"), ValidationError);
  EXPECT_THROW(parse_config_text(R"({"xmax": 10})"), ValidationError);
  EXPECT_THROW(parse_config_text(R"({"lfunction": {"family": "maass"}, "xmax": 10})"), ValidationError);
  EXPECT_THROW(parse_config_text(R"({"lfunction": {"family": "dirichlet", "character": "chi4"}})"),
               ValidationError);
  EXPECT_THROW(parse_config_text(
                   R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "nu": 0, "xmax": 10})"),
               ValidationError);
  EXPECT_THROW(parse_config_text(
                   R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 1e15})"),
               ValidationError);
  EXPECT_THROW(parse_config_text(
                   R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 10, "grid": "linear"})"),
               ValidationError);
  EXPECT_THROW(parse_config_text(
                   R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 10,
                       "output": {"format": "xml"}})"),
               ValidationError);
  EXPECT_THROW(parse_config_text(
                   R"({"lfunction": {"family": "custom", "degree": 1, "cutoff": 3,
                       "local_factors": {"2": [[1, 0]], "3": [[-1, 0]]}}, "xmax": 3})"),
               ValidationError);
}

TEST(Config, LogSpacedGrid) {
  const auto c = parse_config_text(
      R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 1000, "grid": {"log_spaced": 4}})");
  const auto xs = c.grid();
  ASSERT_EQ(xs.size(), 4u);
  EXPECT_EQ(xs.front(), 16.0);
  EXPECT_EQ(xs.back(), 1000.0);
}

TEST(Table, CsvRoundTrip) {
  Table t;
  t.columns = {"x", "label", "n"};
  t.add_row({0.1, std::string("a,\"b\""), std::int64_t{7}});
  t.add_row({std::nan(""), std::string("plain"), std::int64_t{-3}});
  EXPECT_THROW(t.add_row({1.0}), ValidationError);
  const std::string csv = render_csv(t);
  EXPECT_EQ(csv, "x,label,n\n0.1,\"a,\"\"b\"\"\",7\nnan,plain,-3\n");
  const Table back = parse_csv(csv);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(num(back.rows[0][0]), 0.1);
  EXPECT_EQ(std::get<std::string>(back.rows[0][1]), "a,\"b\"");
  EXPECT_EQ(num(back.rows[0][2]), 7.0);
  EXPECT_TRUE(std::isnan(num(back.rows[1][0])));
}

TEST(Table, JsonNullsNonFinite) {
  Table t;
  t.columns = {"x", "y"};
  t.add_row({1.5, std::nan("")});
  const auto doc = nlohmann::json::parse(render_json(t, {{"command", "bias"}}));
  EXPECT_EQ(doc["meta"]["command"], "bias");
  EXPECT_EQ(doc["rows"][0]["x"], 1.5);
  EXPECT_TRUE(doc["rows"][0]["y"].is_null());
}

TEST(Commands, BiasChi4AtTen) {
  const Table t = cmd_bias(parse_config_text(kChi4));
  ASSERT_EQ(t.rows.size(), 1u);
  const double expected = -1 / std::sqrt(3.0) + 1 / std::sqrt(5.0) - 1 / std::sqrt(7.0);
  EXPECT_NEAR(num(t.rows[0][col(t, "bias")]), expected, 1e-15);
  EXPECT_EQ(num(t.rows[0][col(t, "predicted_slope")]), -0.5);
  EXPECT_TRUE(std::isnan(num(t.rows[0][col(t, "fit_slope")])));
}

TEST(Commands, PredictedSlopes) {
  const auto e37 = parse_config_text(R"({"lfunction": {"family": "elliptic", "model": [0, 0, 1, -1, 0],
                                         "conductor": 37, "rank": 1}, "xmax": 100})");
  EXPECT_EQ(num(cmd_bias(e37).rows[0][col(cmd_bias(e37), "predicted_slope")]), -0.5);
  const Table e11 = cmd_bias(parse_config_text(k11a1));
  EXPECT_EQ(num(e11.rows[0][col(e11, "predicted_slope")]), 0.5);

  RunOptions o;
  o.tau_cache = scratch("tau_small.bin");
  const auto delta = parse_config_text(
      R"({"lfunction": {"family": "delta", "cutoff": 2000}, "xmax": 1000})");
  const Table d = cmd_bias(delta, o);
  EXPECT_EQ(num(d.rows.back()[col(d, "predicted_slope")]), 0.5);
  EXPECT_EQ(num(d.rows.back()[col(d, "x")]), 1000.0);
}

TEST(Commands, ProductAtCentreAndAtTwo) {
  const Table t = cmd_product(parse_config_text(kChi4));
  ASSERT_EQ(t.rows.size(), 1u);
  // ∏_{p<=10} (1 - χ(p)/√p)^{-1} over p = 3, 5, 7
  const double direct = 1 / ((1 + 1 / std::sqrt(3.0)) * (1 - 1 / std::sqrt(5.0)) * (1 + 1 / std::sqrt(7.0)));
  EXPECT_NEAR(num(t.rows[0][col(t, "scaled_product")]), direct, 1e-14);
  EXPECT_NEAR(num(t.rows[0][col(t, "target")]), 0.9442583142, 1e-9);

  RunOptions o;
  o.s = cplx{2.0, 0.0};
  const Table z = cmd_product(
      parse_config_text(R"({"lfunction": {"family": "dirichlet", "character": "trivial"}, "xmax": 10})"), o);
  EXPECT_NEAR(num(z.rows[0][col(z, "product_re")]), std::exp(0.466906), 1e-5);
  EXPECT_NEAR(num(z.rows[0][col(z, "target_re")]), M_PI * M_PI / 6, 1e-12);
}

TEST(Commands, RaceCounts) {
  auto c = parse_config_text(
      R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 20,
          "race": {"q": 4, "a": 3, "b": 1, "s": 0}})");
  const Table t = cmd_race(c);
  const auto& row = t.rows.back();
  EXPECT_EQ(num(row[col(t, "pi_a")]), 4.0);  // 3 7 11 19
  EXPECT_EQ(num(row[col(t, "pi_b")]), 3.0);  // 5 13 17
  EXPECT_EQ(num(row[col(t, "difference")]), 1.0);

  c.xmax = 2;
  const Table small = cmd_race(c);
  EXPECT_EQ(num(small.rows.back()[col(small, "difference")]), 0.0);
}

TEST(Commands, GoldfeldSmall) {
  const Table t = cmd_goldfeld(parse_config_text(k11a1));
  ASSERT_EQ(t.rows.size(), 1u);
  // N_2 = 5, N_3 = 5, N_5 = 5 for 11a1
  EXPECT_NEAR(num(t.rows[0][col(t, "product")]), 5.0 / 2 * 5.0 / 3 * 5.0 / 5, 1e-14);
  EXPECT_EQ(std::get<std::int64_t>(t.rows[0][col(t, "rank")]), 0);
  EXPECT_THROW(cmd_goldfeld(parse_config_text(kChi4)), ValidationError);
}

TEST(Commands, ExplicitBoundaries) {
  const std::string fixtures = CENTERBIAS_FIXTURE_DIR;
  auto c = parse_config_text(std::string(R"({"lfunction": {"family": "dirichlet", "character": "chi4"},
      "xmax": 100, "x": 1.5, "zeros_path": ")") + fixtures + R"(/empty.txt"})");
  const Table t = cmd_explicit(c);
  ASSERT_FALSE(t.rows.empty());
  EXPECT_EQ(std::get<std::int64_t>(t.rows[0][col(t, "zeros_used")]), 0);
  EXPECT_EQ(num(t.rows[0][col(t, "lhs_re")]), 0.0);
  EXPECT_EQ(num(t.rows[0][col(t, "zero_sum")]), 0.0);

  c.zeros_path.reset();
  EXPECT_THROW(cmd_explicit(c), ValidationError);
  EXPECT_THROW(cmd_explicit(parse_config_text(k11a1)), UnsupportedError);
}

TEST(Commands, FitNeedsTwoPoints) {
  EXPECT_THROW(cmd_fit(parse_config_text(kChi4)), InsufficientDataError);
  const Table t = cmd_fit(parse_config_text(
      R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 4096})"));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(num(t.rows[0][col(t, "predicted_slope")]), -0.5);
  EXPECT_EQ(num(t.rows[1][col(t, "predicted_slope")]), 1.0);
  EXPECT_THROW(run_command("nope", parse_config_text(kChi4)), ValidationError);
}

TEST(Binary, ThreadCountDoesNotChangeOutput) {
  const fs::path cfg = scratch("chi4_bias.json");
  {
    std::ofstream out(cfg);
    out << R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "xmax": 300000})";
  }
  const std::string cli = CENTERBIAS_CLI;
  std::string outs[2];
  const char* threads[2] = {"1", "8"};
  for (int i = 0; i < 2; ++i) {
    const fs::path out = scratch(std::string("bias_t") + threads[i] + ".csv");
    const std::string cmd = "\"" + cli + "\" bias --config \"" + cfg.string() + "\" --threads " +
                            threads[i] + " --out \"" + out.string() + "\"";
    ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
    outs[i] = slurp(out);
  }
  EXPECT_FALSE(outs[0].empty());
  EXPECT_EQ(outs[0], outs[1]);
}

TEST(Binary, BadConfigExitsNonZero) {
  const fs::path cfg = scratch("bad.json");
  {
    std::ofstream out(cfg);
    out << R"({"lfunction": {"family": "dirichlet", "character": "chi4"}, "nu": 0, "xmax": 10})";
  }
  const std::string cmd = "\"" + std::string(CENTERBIAS_CLI) + "\" bias --config \"" + cfg.string() +
                          "\" > /dev/null 2>&1";
  EXPECT_NE(std::system(cmd.c_str()), 0);
}

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cnls/runner/config.hpp"
#include "cnls/runner/fd_oracle.hpp"
#include "cnls/runner/output.hpp"
#include "cnls/runner/properties.hpp"
#include "cnls/runner/scenarios.hpp"

using namespace cnls;
using namespace cnls::runner;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("cnls_runner_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

ScenarioConfig small(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.ntst = 100;
  return c;
}

}  // namespace

TEST(Config, DefaultsAndScenarioDomains) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.scenario, "verify");
  EXPECT_EQ(c.model.omega, 1.0);
  EXPECT_EQ(c.model.s, 4.0);
  EXPECT_EQ(c.model.beta2, 2.0);
  EXPECT_EQ(default_domain("diagram").second, 7.0);
  EXPECT_EQ(default_domain("asymptotics").second, 8.0);
  EXPECT_EQ(default_domain("eigenloci").second, 11.0);
  EXPECT_EQ(default_domain("geneig").second, 9.0);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config(json{{"scenari", "diagram"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"model", {{"omega", 1.0}, {"beta1", 3.0}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"newton", {{"tol", 1e-8}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"mesh", {{"ntst", 100}, {"nclo", 4}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"continuation", {{"ds", 0.1}}}}), ConfigError);
}

TEST(Config, ValuesChecked) {
  EXPECT_THROW(parse_config(json{{"scenario", "plot"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"domain", {1.0, 5.0}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"domain", {-5.0}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"mesh", {{"ntst", "many"}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"beta1_range", {10.0, 5.0}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"newton", {{"residual_tol", -1.0}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"model", {{"s", 0.0}}}}), ConfigError);
}

TEST(Config, RunDependencies) {
  EXPECT_NO_THROW(parse_config(json{{"runs", {1, 2, 3}}}));
  EXPECT_NO_THROW(parse_config(json{{"runs", {1, 2, 4, 5}}}));
  EXPECT_THROW(parse_config(json{{"runs", {1, 3}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"runs", {1, 2, 5}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"runs", {1, 1}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"runs", {6}}}), ConfigError);
}

TEST(Config, RoundTripAndFileLoad) {
  const auto c = parse_config(json{{"scenario", "eigenloci"},
                                   {"domain", {-10.0, 12.0}},
                                   {"mesh", {{"ntst", 150}, {"ncol", 3}}},
                                   {"ells", {2}},
                                   {"beta1_range", {5.0, 60.0}},
                                   {"newton", {{"residual_tol", 1e-9}}}});
  const auto back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(domain_of(back).first, -10.0);
  EXPECT_EQ(back.ncol, 3);
  EXPECT_EQ(ells_of(back), std::vector<int>{2});

  const auto dir = scratch("config");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"scenario": "diagram", "extra": 1})";
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
  std::ofstream(dir / "broken.json") << R"({"scenario": )";
  EXPECT_THROW(load_config((dir / "broken.json").string()), ConfigError);
  EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
}

TEST(Csv, HeaderOrderAndEmptyFields) {
  const auto& h = csv_header();
  ASSERT_EQ(h.size(), 16u);
  EXPECT_EQ(h.front(), "step");
  EXPECT_EQ(h[4], "lambda_R");
  EXPECT_EQ(h.back(), "special");

  analytic::ModelParams m{1.0, 4.0, 6.5, 2.0};
  const auto h4 = systems::fundamental_seed(m, bvp::Mesh::uniform(-5, 5, 20, 4));
  const auto f = split(format_row(make_row(h4, 3, "FOLD")));
  ASSERT_EQ(f.size(), 16u);
  EXPECT_EQ(f[0], "3");
  EXPECT_EQ(std::stod(f[1]), 6.5);
  for (int i : {3, 4, 5, 6, 7, 8, 9, 12}) EXPECT_TRUE(f[i].empty()) << h[i];
  EXPECT_EQ(f[15], "FOLD");

  const auto e = split(format_row(make_row(systems::eigen_seed(h4, 0), 0)));
  EXPECT_FALSE(e[4].empty());
  EXPECT_FALSE(e[5].empty());
  EXPECT_FALSE(e[12].empty());
  EXPECT_TRUE(e[6].empty());
  const auto g = split(format_row(make_row(systems::geneig_seed(h4), 0)));
  for (int i : {2, 6, 7, 8, 9, 12}) EXPECT_FALSE(g[i].empty()) << h[i];
  EXPECT_TRUE(g[4].empty());
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -19.416262012345678, 6.02214076e23, 5e-324}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(Output, ScaledProfileIsSqrtBetaTimesStored) {
  analytic::ModelParams m{1.0, 4.0, 50.0, 2.0};
  const auto s = systems::fundamental_seed(m, bvp::Mesh::uniform(-8, 8, 40, 4));
  const auto t = scale_profile(s);
  EXPECT_EQ((t.values - s.values * std::sqrt(50.0)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.parameters[systems::BETA1], 50.0);
}

TEST(Output, AlignedEtaDifference) {
  analytic::ModelParams m{1.0, 4.0, 20.0, 2.0};
  const auto g = systems::geneig_seed(systems::fundamental_seed(m, bvp::Mesh::uniform(-5, 5, 20, 4)));
  auto f = g;
  f.values.bottomRows(4) *= -1;
  const auto [d, sg] = aligned_eta_difference(g, f);
  EXPECT_EQ(d, 0.0);
  EXPECT_EQ(sg, -1);
  EXPECT_EQ(aligned_eta_difference(g, g).second, 1);
}

TEST(FdOracle, BoundStatesOfSechSquaredWell) {
  // -d2 + s - 2 beta1 omega sech^2(sqrt(omega) x): kappa(kappa+1) = 2 beta1
  const auto r = fd_spectrum_check({1.0, 4.0, 10.0, 2.0});
  ASSERT_EQ(r.computed.size(), 4u);
  const double exact[4] = {-12.0, -5.0, 0.0, 3.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.computed[i], exact[i], 1e-6);
  const auto r3 = fd_spectrum_check({1.0, 4.0, 3.0, 2.0});
  ASSERT_EQ(r3.computed.size(), 2u);
  EXPECT_NEAR(r3.computed[0], 0.0, 1e-6);
  EXPECT_NEAR(r3.computed[1], 3.0, 1e-6);
  // omega = 2: the well scales to s - 2 (kappa - k)^2 with kappa = 2 at beta1 = 3
  const auto r2 = fd_spectrum_check({2.0, 4.0, 3.0, 2.0});
  EXPECT_NEAR(r2.computed[0], -4.0, 1e-6);
  EXPECT_NEAR(r2.computed[1], 2.0, 1e-6);
}

TEST(Properties, SelfChecks) {
  EXPECT_LT(fundamental_residual(1.0), 1e-12);
  EXPECT_LT(fundamental_residual(3.0), 1e-11);
  for (int m = 2; m <= 4; ++m) EXPECT_GT(collocation_order(m), 2 * m - 0.5) << m;
  const analytic::ModelParams model{1.0, 4.0, 0.0, 2.0};
  EXPECT_LT(pointwise_jacobian_gap(systems::homoclinic_system(), model, 4), 1e-6);
  EXPECT_LT(pointwise_jacobian_gap(systems::eigen_system(), model, 5), 1e-6);
  EXPECT_LT(pointwise_jacobian_gap(systems::geneig_system(0.1), model, 6), 1e-6);
  // a wrong Jacobian is caught
  auto broken = systems::homoclinic_system();
  broken.rhs_jac_state = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(4, 4).eval();
  };
  EXPECT_GT(pointwise_jacobian_gap(broken, model, 4), 1e-3);
}

TEST(Eigenloci, PathIndices) {
  const auto idx = eigen_path_indices({1, 2, 4});
  const std::vector<std::pair<int, int>> expected = {{1, 0}, {2, 0}, {2, 1}, {4, 0}, {4, 1}, {4, 2}, {4, 3}};
  EXPECT_EQ(idx, expected);
  EXPECT_TRUE(eigen_path_indices({0}).empty());
}

TEST(Eigenloci, OnsetRowIsAnalytic) {
  EigenPath p;
  p.ell = 2;
  p.onset_beta1 = 10.0;
  p.onset_lambda_i = 12.0;
  const auto rows = eigen_path_rows(p);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].special, "onset");
  EXPECT_EQ(*rows[0].lambda_R, 0.0);
  EXPECT_EQ(*rows[0].lambda_I, 12.0);
}

TEST(Diagram, SmallRunIsDeterministicAndCorrect) {
  auto c = small("diagram");
  c.ells = {0};
  c.beta1_range = std::make_pair(2.0, 13.0);
  const auto d1 = scratch("diag1"), d2 = scratch("diag2");
  const auto r = run_diagram(c, d1);
  run_diagram(c, d2);
  for (const char* f : {"fundamental.csv", "ell0.csv", "summary.json"}) {
    const auto a = slurp(d1 / "diagram" / f);
    ASSERT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(d2 / "diagram" / f)) << f;
  }
  ASSERT_EQ(r.branches.size(), 1u);
  const auto& b = r.branches[0];
  EXPECT_EQ(b.onset, 3.0);
  EXPECT_EQ(b.criticality, 1);
  EXPECT_EQ(b.zero_counts.at(12.0), 0);
  // V keeps one sign on the ell = 0 branch
  const auto* s = find_special(b.branch, "B12");
  ASSERT_NE(s, nullptr);
  EXPECT_GT(s->location.solution.values.row(1).minCoeff(), -1e-8);
  // the pitchfork at 3 and 6 are marked on the fundamental branch (only ell=0 asked)
  EXPECT_NE(find_special(r.fundamental, "BP0"), nullptr);
  EXPECT_LT(worst_boundary(b.branch), 1e-2);
  const auto k = kernel_state_check(s->location.solution);
  EXPECT_LT(k.gauge, 1e-10);
  EXPECT_GT(k.order, 3.5);
  EXPECT_TRUE(fs::exists(d1 / "diagram" / "snapshots" / "ell0_B12.json"));
  // header then one row per point
  const auto text = slurp(d1 / "diagram" / "ell0.csv");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), b.branch.points.size() + 1);
}

TEST(Asymptotics, ScaledProfilesConverge) {
  auto c = small("asymptotics");
  c.ntst = 160;
  c.ells = {1};
  const auto dir = scratch("asym");
  const auto r = run_asymptotics(c, dir);
  ASSERT_EQ(r.profiles.size(), 1u);
  const auto& p = r.profiles[0];
  ASSERT_TRUE(p.difference.has_value());
  EXPECT_LT(*p.difference, 0.1);
  const auto snap = json::parse(slurp(dir / "asymptotics" / "snapshots" / "ell1_B50_scaled.json"));
  EXPECT_EQ(snap["x_minus"].get<double>(), -8.0);
  EXPECT_EQ(snap["x_plus"].get<double>(), 8.0);
  const auto raw = json::parse(slurp(dir / "asymptotics" / "snapshots" / "ell1_B50.json"));
  EXPECT_NEAR(snap["states"][100][0].get<double>(), std::sqrt(50.0) * raw["states"][100][0].get<double>(), 1e-12);
}

TEST(Geneig, FirstTwoRunsOnCoarseMesh) {
  auto c = small("geneig");
  c.ntst = 120;
  c.runs = {1, 2};
  const auto r = compute_geneig(c);
  EXPECT_TRUE(r.approach_error.empty()) << r.approach_error;
  EXPECT_NEAR(r.c0, 0.074836, 1e-3);
  ASSERT_EQ(r.runs.size(), 5u);
  EXPECT_EQ(r.runs[0].status, "ok");
  EXPECT_EQ(r.runs[1].status, "ok");
  EXPECT_EQ(r.runs[2].status, "skipped");
  const auto& C1 = r.labeled.at("C1");
  EXPECT_NEAR(C1.parameters[systems::C1], 1.0, 1e-10);
  EXPECT_NEAR(C1.parameters[systems::C2], 0.0, 1e-10);
  // eta is orthogonal to (U', V') and normalized in the rescaled measure
  const double mu = systems::unit_interval_measure(C1.mesh);
  EXPECT_NEAR(mu * bvp::integral_functional(C1, [](double, const Eigen::VectorXd& u) {
                return u[systems::ETA] * u[2] + u[systems::ETA + 1] * u[3];
              }),
              0.0, 1e-9);
  EXPECT_GT(C1.parameters[systems::EPS1], 0.0);
}

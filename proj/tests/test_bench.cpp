#include <trdh/bench.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace trdh;

namespace {

bool same_number(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

// Field-by-field equality where NaN matches NaN; timing optional.
void expect_same(const RunRecord& a, const RunRecord& b, bool with_time, bool with_x) {
  EXPECT_EQ(a.problem, b.problem);
  EXPECT_EQ(a.solver, b.solver);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.message, b.message);
  EXPECT_EQ(a.seed, b.seed);
  for (auto [x, y] : {std::pair{a.f, b.f}, {a.h_over_lambda, b.h_over_lambda}, {a.criticality, b.criticality},
                      {a.x_err, b.x_err}, {a.train_acc, b.train_acc}, {a.test_acc, b.test_acc}})
    EXPECT_TRUE(same_number(x, y)) << x << " vs " << y;
  EXPECT_EQ(a.n_f, b.n_f);
  EXPECT_EQ(a.n_grad, b.n_grad);
  EXPECT_EQ(a.n_prox, b.n_prox);
  EXPECT_EQ(a.iterations, b.iterations);
  if (with_time) {
    EXPECT_EQ(a.time_s, b.time_s);
  }
  if (with_x) {
    EXPECT_EQ(a.x, b.x);
  }
}

RunConfig small_bpdn(SolverKind s) {
  RunConfig c = preset("bpdn");
  c.solver = s;
  c.problem_params = {{"m", 40}, {"n", 100}, {"k_nnz", 4}};
  return c;
}

RunRecord odd_record() {
  RunRecord r;
  r.problem = "fh,cstr";
  r.solver = "TR-\"TRDH\"-PSB";
  r.status = "max_iter";
  r.message = "line one, with comma";
  r.seed = 18446744073709551615ULL;
  r.f = 0.1 + 0.2;
  r.h_over_lambda = 2.0;
  r.criticality = 5e-324;
  r.train_acc = 99.25;
  r.n_f = 501;
  r.n_grad = 77;
  r.n_prox = 1000;
  r.iterations = 500;
  r.time_s = 1.0 / 3.0;
  r.x = {0.0, 0.5, 0.5411264516643174, -0.0, 1e300};
  return r;
}

}  // namespace

TEST(Bench, CsvRoundTripIsExact) {
  const RunRecord r = odd_record();
  expect_same(record_from_csv(to_csv_row(r)), r, true, false);
  const RunRecord real = run(small_bpdn(SolverKind::TRDH));
  expect_same(record_from_csv(to_csv_row(real)), real, true, false);
  EXPECT_THROW(record_from_csv("a,b,c"), ParseError);
}

TEST(Bench, JsonRoundTripIsExact) {
  const RunRecord r = odd_record();
  expect_same(record_from_json(nlohmann::json::parse(to_json(r).dump())), r, true, true);
  const RunRecord real = run(small_bpdn(SolverKind::R2));
  expect_same(record_from_json(nlohmann::json::parse(to_json(real).dump())), real, true, true);
}

TEST(Bench, RepeatedRunsAreIdenticalExceptTiming) {
  for (SolverKind s : {SolverKind::R2, SolverKind::TRDH, SolverKind::iTRDH, SolverKind::TR}) {
    const RunConfig c = small_bpdn(s);
    expect_same(run(c), run(c), false, true);
  }
}

TEST(Bench, ParallelSuiteMatchesSerialAndKeepsOrder) {
  std::vector<RunConfig> cs;
  for (SolverKind s : {SolverKind::TR, SolverKind::R2, SolverKind::iTRDH, SolverKind::TRDH})
    cs.push_back(small_bpdn(s));
  const auto serial = run_suite(cs, 1), parallel = run_suite(cs, 4);
  ASSERT_EQ(parallel.size(), cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    EXPECT_EQ(parallel[i].solver, cs[i].solver_label());
    expect_same(serial[i], parallel[i], false, true);
  }
  EXPECT_THROW(run_suite({}), ConfigError);
}

TEST(Bench, ExitCodes) {
  RunRecord r;
  r.status = "first_order";
  EXPECT_EQ(exit_code(r), 0);
  r.status = "max_iter";
  EXPECT_EQ(exit_code(r), 2);
  r.status = "stalled";
  EXPECT_EQ(exit_code(r), 2);
  r.status = "error:io";
  EXPECT_EQ(exit_code(r), 1);
  RunConfig c = small_bpdn(SolverKind::TRDH);
  c.options.max_iter = 2;
  EXPECT_EQ(exit_code(run(c)), 2);
}

TEST(Bench, FailuresBecomeRows) {
  RunConfig svm = preset("svm");
  svm.solver = SolverKind::R2;
  svm.mnist_dir = "";
  RunConfig bad = small_bpdn(SolverKind::R2);
  bad.problem_params["nope"] = 1.0;
  const auto rows = run_suite({svm, small_bpdn(SolverKind::R2), bad}, 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].status, "error:io");
  EXPECT_FALSE(rows[0].message.empty());
  EXPECT_EQ(rows[1].status, "first_order");
  EXPECT_EQ(rows[2].status, "error:config");
  EXPECT_NE(rows[2].message.find("nope"), std::string::npos);
}

TEST(Bench, TableHasFourteenRowsInPublishedOrder) {
  const auto cs = table_configs("bpdn", 1234);
  const std::vector<std::string> want{"R2",           "TRDH-Spec",      "iTRDH-Spec",     "TRDH-PSB",
                                      "iTRDH-PSB",    "TRDH-Andrei",    "iTRDH-Andrei",   "TR-R2",
                                      "TR-TRDH-PSB",  "TR-iTRDH-PSB",   "TR-TRDH-Andrei", "TR-iTRDH-Andrei",
                                      "TR-TRDH-Spec", "TR-iTRDH-Spec"};
  ASSERT_EQ(cs.size(), want.size());
  for (std::size_t i = 0; i < cs.size(); ++i) EXPECT_EQ(cs[i].solver_label(), want[i]);
  EXPECT_THROW(table_configs("nope", 1), ConfigError);
}

TEST(Bench, BpdnTableAllFirstOrderWithTenNonzeros) {
  const auto rows = run_suite(table_configs("bpdn", 1234), 4);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, "first_order") << r.solver;
    EXPECT_EQ(r.h_over_lambda, 10.0) << r.solver;
    if (r.solver.rfind("iTRDH", 0) == 0 || r.solver == "R2") {
      EXPECT_EQ(r.n_prox, r.iterations) << r.solver;
    }
  }
}

TEST(Bench, PresetsEncodeTolerances) {
  EXPECT_EQ(preset("bpdn").options.eps_abs_inner, 1e-5);
  EXPECT_EQ(preset("nnmf").options.eps_abs_inner, 1e-3);
  EXPECT_EQ(preset("svm").options.eps_abs, 1e-4);
  EXPECT_EQ(preset("fh-cstr").options.max_inner_iter, 200);
  EXPECT_EQ(preset("fh").hessian, HessianKind::LBFGS);
  for (const auto& n : preset_names()) EXPECT_EQ(preset(n).options.eps_rel_inner, 1e-6);
  EXPECT_THROW(preset("lasso"), ConfigError);
}

TEST(Bench, JsonOutputCarriesMetadataAndHash) {
  std::vector<RunConfig> cs{small_bpdn(SolverKind::TRDH), small_bpdn(SolverKind::TRDH)};
  cs[1].seed = 7;
  const auto rows = run_suite(cs);
  const auto j = nlohmann::json::parse(format_rows(rows, cs, OutputFormat::Json));
  ASSERT_EQ(j.at("rows").size(), 2u);
  ASSERT_EQ(j.at("metadata").size(), 2u);
  EXPECT_EQ(j["metadata"][0]["constants"]["alpha"], cs[0].constants.alpha);
  EXPECT_NE(j["metadata"][0]["config_hash"], j["metadata"][1]["config_hash"]);
  EXPECT_EQ(config_hash(cs[0]), config_hash(small_bpdn(SolverKind::TRDH)));
  const std::string csv = format_rows(rows, cs, OutputFormat::Csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csv_header());
  std::getline(in, line);
  expect_same(record_from_csv(line), rows[0], true, false);
}

TEST(Bench, Parsers) {
  EXPECT_EQ(parse_diag("Spec"), DiagKind::Spectral);
  EXPECT_EQ(parse_diag("andrei"), DiagKind::Andrei);
  EXPECT_FALSE(parse_diag("bfgs"));
  EXPECT_EQ(parse_solver("itrdh"), SolverKind::iTRDH);
  EXPECT_FALSE(parse_solver("lbfgs"));
  EXPECT_EQ(parse_subsolver("TRDH"), Subsolver::TRDH);
  EXPECT_EQ(parse_hessian("LBFGS"), HessianKind::LBFGS);
  EXPECT_FALSE(parse_hessian("BFGS"));
}

#include <gtest/gtest.h>

#include "ouhyper/error.hpp"
#include "ouhyper/report.hpp"
#include "ouhyper/scan.hpp"

using namespace ouhyper;

namespace {

ScanSpec hc_scan() {
  ScanSpec s;
  s.inequality = "hc";
  s.corpus = default_corpus();
  s.p_grid = {1.5, 2.0, 4.0};
  s.t_grid = {0.1, 0.5, 1.0};
  return s;
}

}  // namespace

TEST(Scan, GridOrderAndCount) {
  const auto r = run_scan(hc_scan());
  ASSERT_EQ(r.rows.size(), 45u);
  EXPECT_EQ(r.failures(), 0u);
  EXPECT_EQ(r.errors(), 0u);
  // Last axis varies fastest.
  EXPECT_EQ(r.rows[0].coords.at("t"), 0.1);
  EXPECT_EQ(r.rows[1].coords.at("t"), 0.5);
  EXPECT_EQ(r.rows[3].coords.at("p"), 2.0);
  EXPECT_EQ(r.rows[9].f_index, 1u);
}

TEST(Scan, IndependentOfThreadCount) {
  auto a = hc_scan();
  a.threads = 1;
  auto b = hc_scan();
  b.threads = 4;
  const auto ra = run_scan(a);
  const auto rb = run_scan(b);
  ASSERT_EQ(ra.rows.size(), rb.rows.size());
  for (std::size_t i = 0; i < ra.rows.size(); ++i) {
    EXPECT_EQ(ra.rows[i].verdict.lhs, rb.rows[i].verdict.lhs);
    EXPECT_EQ(ra.rows[i].verdict.rhs, rb.rows[i].verdict.rhs);
  }
}

TEST(Scan, CorpusFilter) {
  auto s = hc_scan();
  s.corpus_filter = "logistic";
  EXPECT_EQ(filtered_corpus(s).size(), 1u);
  EXPECT_EQ(run_scan(s).rows.size(), 9u);
  s.corpus_filter = "nothing-matches";
  EXPECT_THROW(run_scan(s), ConfigError);
}

TEST(Scan, Validation) {
  auto s = hc_scan();
  s.inequality = "nope";
  EXPECT_THROW(validate_scan_spec(s), ConfigError);
  s = hc_scan();
  s.t_grid.clear();
  EXPECT_THROW(validate_scan_spec(s), ConfigError);
  s = hc_scan();
  s.inequality = "genhc";
  EXPECT_THROW(validate_scan_spec(s), ConfigError);
  s = hc_scan();
  s.inequality = "sandwich";
  s.t_grid = {0.0, 1.0};
  EXPECT_THROW(validate_scan_spec(s), ConfigError);
}

TEST(Scan, GeneratorAxesAndSandwich) {
  ScanSpec s;
  s.inequality = "genhc";
  s.generator_family = "power";
  s.generator_axes["p"] = {1.5, 3.0};
  s.corpus = {"exp_linear:lambda=0.6"};
  s.t_grid = {0.2, 0.6};
  const auto r = run_scan(s);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].c_spec, "power:p=1.5");
  EXPECT_EQ(r.failures(), 0u);

  ScanSpec w;
  w.inequality = "sandwich";
  w.corpus = {"logistic:a=1,b=1"};
  w.s_grid = {0.3, 1.0};
  w.t_grid = {0.0, 0.5};
  const auto rw = run_scan(w);
  EXPECT_EQ(rw.rows.size(), 8u);  // two verdicts per cell
  EXPECT_EQ(rw.failures(), 0u);
}

TEST(Scan, CellErrorsKeepTheirRow) {
  ScanSpec s;
  s.inequality = "genhc";
  s.generator_family = "exm1";
  s.generator_axes = {{"alpha", {1.0}}, {"beta", {2.0}}};
  s.corpus = {"sine:a=0.5,kappa=2"};
  const auto strict = run_scan(s);
  ASSERT_EQ(strict.rows.size(), 1u);
  EXPECT_EQ(strict.rows[0].error_kind, "precondition");
  EXPECT_FALSE(strict.rows[0].verdict.holds);
  EXPECT_EQ(strict.errors(), 1u);

  s.numeric.enforce_conditions = false;
  s.corpus = {"sine:a=0.5,kappa=2", "poly_plus_const:c2=1,kappa=1"};
  const auto relaxed = run_scan(s);
  ASSERT_EQ(relaxed.rows.size(), 2u);
  EXPECT_TRUE(relaxed.rows[0].error.empty());
  EXPECT_FALSE(relaxed.rows[0].verdict.note.empty());
  // u(0, f) = int exp(x^2) for f = x^2 + 1 is not integrable.
  EXPECT_FALSE(relaxed.rows[1].error.empty());
  EXPECT_FALSE(relaxed.rows[1].verdict.holds);
}

TEST(Search, NoViolationForAValidInequality) {
  auto s = hc_scan();
  s.corpus = {"exp_linear:lambda=0.6", "logistic:a=1,b=1"};
  const auto r = search_counterexample(s, 60);
  EXPECT_FALSE(r.violation.has_value());
  EXPECT_EQ(r.label, "exploratory");
  EXPECT_LE(r.evaluations, 60u);
  EXPECT_GT(r.evaluations, 18u);
}

TEST(Search, FindsPlantedViolation) {
  auto s = hc_scan();
  s.corpus = {"exp_linear:lambda=0.6"};
  s.q_scale = 1.5;
  const auto r = search_counterexample(s, 40);
  ASSERT_TRUE(r.violation.has_value());
  EXPECT_LT(r.violation->verdict.margin, -r.violation->verdict.slack);
  EXPECT_GT(r.best_score, 1.0);
}

TEST(Search, Deterministic) {
  auto s = hc_scan();
  s.corpus = {"exp_linear:lambda=0.6"};
  const auto a = search_counterexample(s, 30);
  const auto b = search_counterexample(s, 30);
  EXPECT_EQ(a.best_score, b.best_score);
  EXPECT_THROW(search_counterexample(s, 0), ConfigError);
}

TEST(ScanReport, CsvRowsDescribeTheirCell) {
  auto s = hc_scan();
  s.corpus = {"logistic:a=1,b=1"};
  s.p_grid = {2.0};
  s.t_grid = {0.5};
  const auto csv = render_csv(scan_verdicts(run_scan(s)));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_NE(csv.find("f=logistic:a=1,b=1"), std::string::npos);
}

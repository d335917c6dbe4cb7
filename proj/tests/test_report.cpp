#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "taglife/report.hpp"

using namespace taglife;

TEST_CASE("format_cell renders the documented fixture strings") {
  // A strongly significant retweet coefficient...
  ReportCell a{0.2651, 0.0073, wald_pvalue(0.2651, 0.0073)};
  CHECK(format_cell(a) == "0.2651*** (0.0073)");
  // ...and a hazard-ratio cell whose p-value sits in the one-star band.
  ReportCell b{0.9935, 0.0003, 0.02};
  CHECK(format_cell(b) == "0.9935* (0.0003)");
}

TEST_CASE("star thresholds at the conventional boundaries") {
  CHECK(stars(0.0001) == "***");
  CHECK(stars(0.001) == "**");
  CHECK(stars(0.009) == "**");
  CHECK(stars(0.01) == "*");
  CHECK(stars(0.049) == "*");
  CHECK(stars(0.05) == "");
  CHECK(stars(0.9) == "");
}

TEST_CASE("wald p-values agree with the normal distribution") {
  CHECK(wald_pvalue(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(wald_pvalue(1.959963984540054, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(wald_pvalue(-1.959963984540054, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(wald_pvalue(2.575829303549, 1.0) == doctest::Approx(0.01).epsilon(1e-9));
}

namespace {

ArmaxFit make_fit() {
  ArmaxFit fit;
  fit.predictor_names = {"(intercept)", "rt", "rp", "src_alpha", "follow_alpha"};
  fit.beta = Eigen::VectorXd(5);
  fit.beta << 0.1, 0.2651, 0.15, 0.001, 0.1;
  fit.beta_se = Eigen::VectorXd(5);
  fit.beta_se << 0.5, 0.0073, 0.01, 0.0005, 0.04;
  fit.loglik = -1234.56;
  fit.aic = 2487.12;
  return fit;
}

}  // namespace

TEST_CASE("growth table carries cells, loglik and AIC per class column") {
  std::map<TagClass, ArmaxFit> fits;
  fits[TagClass::Winner] = make_fit();
  const ModelTable t = growth_table("Growth", fits);
  REQUIRE(t.col_names.size() == 2);
  CHECK(t.col_names[0] == "Winner");
  CHECK(t.col_names[1] == "Also-ran");
  REQUIRE(t.row_names.size() == 5);
  REQUIRE(t.cells.size() == 5);
  CHECK(t.cells[1][0].has_value());
  CHECK_FALSE(t.cells[1][1].has_value());  // missing class column
  CHECK(format_cell(*t.cells[1][0]) == "0.2651*** (0.0073)");
  CHECK(t.loglik[0].value() == doctest::Approx(-1234.56));
  CHECK(t.aic[0].value() == doctest::Approx(2487.12));
  CHECK_FALSE(t.loglik[1].has_value());

  const std::string text = render_text(t);
  CHECK(text.find("0.2651*** (0.0073)") != std::string::npos);
  CHECK(text.find("Loglik") != std::string::npos);
  CHECK(text.find("-1234.56") != std::string::npos);
  CHECK(text.find("AIC") != std::string::npos);
  CHECK(text.find("2487.12") != std::string::npos);
}

TEST_CASE("survival table displays hazard ratios with delta-method errors") {
  CoxFit fit;
  fit.covariate_names = {"src_alpha"};
  fit.beta = Eigen::VectorXd(1);
  fit.beta << std::log(0.9935);
  // Beta-scale error chosen so the Wald z lands in the one-star band and
  // the delta-method HR-scale error displays as 0.0030.
  fit.se = Eigen::VectorXd(1);
  fit.se << -std::log(0.9935) / 2.2;
  fit.hazard_ratio = fit.beta.array().exp();
  fit.loglik = -321.0;
  fit.aic = 644.0;
  std::map<TagClass, CoxFit> fits;
  fits[TagClass::AlsoRan] = fit;
  const ModelTable t = survival_table("Persistence", fits);
  REQUIRE(t.cells.size() == 1);
  CHECK_FALSE(t.cells[0][0].has_value());
  REQUIRE(t.cells[0][1].has_value());
  CHECK(format_cell(*t.cells[0][1]) == "0.9935* (0.0029)");
  const std::string text = render_text(t);
  CHECK(text.find("0.9935* (0.0029)") != std::string::npos);
}

TEST_CASE("empty fit maps render a header-only table") {
  const ModelTable t = growth_table("Growth", {});
  CHECK(t.row_names.empty());
  const std::string text = render_text(t);
  CHECK(text.find("Winner") != std::string::npos);
  CHECK(text.find("nan") == std::string::npos);
}

TEST_CASE("csv rendering quotes cell strings and keeps full precision") {
  std::map<TagClass, ArmaxFit> fits;
  fits[TagClass::Winner] = make_fit();
  const std::string csv = render_csv(growth_table("Growth", fits));
  CHECK(csv.find("0.2651*** (0.0073)") != std::string::npos);
  // Full-precision value column alongside the display string.
  CHECK(csv.find("0.2651") != std::string::npos);
  CHECK(csv.find("rt") != std::string::npos);
}

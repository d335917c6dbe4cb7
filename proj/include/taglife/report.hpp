#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taglife/armax.hpp"
#include "taglife/survival.hpp"
#include "taglife/taxonomy.hpp"

namespace taglife {

/// One coefficient cell of a model table: the displayed value, its
/// standard error, and the two-sided p-value driving the stars.
struct ReportCell {
  double value = 0.0;
  double se = 0.0;
  double p = 1.0;
};

/// Significance stars: p < 0.05 "*", p < 0.01 "**", p < 0.001 "***".
std::string stars(double p);

/// Renders "value[stars] (se)", e.g. "0.2651*** (0.0073)".
std::string format_cell(const ReportCell& cell);

/// Two-sided normal p-value for estimate/se.
double wald_pvalue(double estimate, double se);

/// A two-column (winner / also-ran) coefficient table with Loglik and
/// AIC footer rows.
struct ModelTable {
  std::string title;
  std::vector<std::string> col_names;  // "Winner", "Also-ran"
  std::vector<std::string> row_names;
  // cells[row][col]; absent when the model lacks that term or column.
  std::vector<std::vector<std::optional<ReportCell>>> cells;
  std::vector<std::optional<double>> loglik;  // per column
  std::vector<std::optional<double>> aic;
};

/// Coefficient table for the growth regressions (one fit per class;
/// either may be absent).
ModelTable growth_table(const std::string& title,
                        const std::map<TagClass, ArmaxFit>& fits);

/// Hazard-ratio table for the persistence models. Displayed values are
/// exp(beta); displayed errors are delta-method SEs of the hazard ratio;
/// stars come from the Wald test on beta.
ModelTable survival_table(const std::string& title,
                          const std::map<TagClass, CoxFit>& fits);

/// Aligned plain-text rendering.
std::string render_text(const ModelTable& table);

/// CSV rendering with full-precision numeric columns.
std::string render_csv(const ModelTable& table);

}  // namespace taglife

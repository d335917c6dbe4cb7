#include "taglife/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "taglife/text.hpp"

namespace taglife {

std::string stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string format_cell(const ReportCell& cell) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f%s (%.4f)", cell.value, stars(cell.p).c_str(), cell.se);
  return buf;
}

double wald_pvalue(double estimate, double se) {
  if (!(se > 0.0) || !std::isfinite(estimate)) return 1.0;
  const double z = std::abs(estimate / se);
  return std::erfc(z / std::sqrt(2.0));
}

namespace {

const std::vector<TagClass> kClassOrder = {TagClass::Winner, TagClass::AlsoRan};
const std::vector<std::string> kClassHeaders = {"Winner", "Also-ran"};

template <typename Fit, typename CellFn>
ModelTable build_table(const std::string& title, const std::map<TagClass, Fit>& fits,
                       const std::vector<std::string>& (*names_of)(const Fit&), CellFn cell_of,
                       double (*loglik_of)(const Fit&), double (*aic_of)(const Fit&)) {
  ModelTable table;
  table.title = title;
  table.col_names = kClassHeaders;

  for (TagClass cls : kClassOrder) {
    const auto it = fits.find(cls);
    if (it == fits.end()) continue;
    for (const std::string& name : names_of(it->second)) {
      if (std::find(table.row_names.begin(), table.row_names.end(), name) ==
          table.row_names.end())
        table.row_names.push_back(name);
    }
  }
  table.cells.assign(table.row_names.size(),
                     std::vector<std::optional<ReportCell>>(kClassOrder.size()));
  table.loglik.assign(kClassOrder.size(), std::nullopt);
  table.aic.assign(kClassOrder.size(), std::nullopt);

  for (std::size_t c = 0; c < kClassOrder.size(); ++c) {
    const auto it = fits.find(kClassOrder[c]);
    if (it == fits.end()) continue;
    const Fit& fit = it->second;
    const std::vector<std::string>& names = names_of(fit);
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto row = std::find(table.row_names.begin(), table.row_names.end(), names[j]);
      table.cells[static_cast<std::size_t>(row - table.row_names.begin())][c] =
          cell_of(fit, static_cast<Eigen::Index>(j));
    }
    table.loglik[c] = loglik_of(fit);
    table.aic[c] = aic_of(fit);
  }
  return table;
}

const std::vector<std::string>& armax_names(const ArmaxFit& fit) { return fit.predictor_names; }
double armax_loglik_of(const ArmaxFit& fit) { return fit.loglik; }
double armax_aic_of(const ArmaxFit& fit) { return fit.aic; }

const std::vector<std::string>& cox_names(const CoxFit& fit) { return fit.covariate_names; }
double cox_loglik_of(const CoxFit& fit) { return fit.loglik; }
double cox_aic_of(const CoxFit& fit) { return fit.aic; }

}  // namespace

ModelTable growth_table(const std::string& title, const std::map<TagClass, ArmaxFit>& fits) {
  return build_table(
      title, fits, armax_names,
      [](const ArmaxFit& fit, Eigen::Index j) {
        ReportCell cell;
        cell.value = fit.beta[j];
        cell.se = fit.beta_se[j];
        cell.p = wald_pvalue(fit.beta[j], fit.beta_se[j]);
        return cell;
      },
      armax_loglik_of, armax_aic_of);
}

ModelTable survival_table(const std::string& title, const std::map<TagClass, CoxFit>& fits) {
  return build_table(
      title, fits, cox_names,
      [](const CoxFit& fit, Eigen::Index j) {
        ReportCell cell;
        cell.value = fit.hazard_ratio[j];
        cell.se = fit.hazard_ratio[j] * fit.se[j];  // delta method
        cell.p = wald_pvalue(fit.beta[j], fit.se[j]);
        return cell;
      },
      cox_loglik_of, cox_aic_of);
}

namespace {

std::string footer_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

}  // namespace

std::string render_text(const ModelTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"Variables"};
  header.insert(header.end(), table.col_names.begin(), table.col_names.end());
  rows.push_back(header);
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    std::vector<std::string> row = {table.row_names[r]};
    for (const std::optional<ReportCell>& cell : table.cells[r])
      row.push_back(cell ? format_cell(*cell) : "");
    rows.push_back(std::move(row));
  }
  std::vector<std::string> loglik_row = {"Loglik"}, aic_row = {"AIC"};
  for (std::size_t c = 0; c < table.col_names.size(); ++c) {
    loglik_row.push_back(footer_number(table.loglik[c]));
    aic_row.push_back(footer_number(table.aic[c]));
  }
  rows.push_back(std::move(loglik_row));
  rows.push_back(std::move(aic_row));

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream out;
  if (!table.title.empty()) out << table.title << "\n";
  std::string rule;
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c + 1 < width.size() ? 2 : 0);
  rule.assign(total, '-');
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << "\n";
  };
  emit(rows[0]);
  out << rule << "\n";
  for (std::size_t r = 1; r + 2 < rows.size(); ++r) emit(rows[r]);
  out << rule << "\n";
  emit(rows[rows.size() - 2]);
  emit(rows[rows.size() - 1]);
  return out.str();
}

std::string render_csv(const ModelTable& table) {
  std::ostringstream out;
  std::vector<std::string> header = {"variable"};
  for (const std::string& col : table.col_names) {
    const std::string slug = col == "Also-ran" ? "also_ran" : to_lower(col);
    header.push_back(slug + "_value");
    header.push_back(slug + "_se");
    header.push_back(slug + "_p");
    header.push_back(slug + "_cell");
  }
  out << join_csv(header) << "\n";
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    std::vector<std::string> row = {table.row_names[r]};
    for (const std::optional<ReportCell>& cell : table.cells[r]) {
      if (cell) {
        row.push_back(fmt_compact(cell->value));
        row.push_back(fmt_compact(cell->se));
        row.push_back(fmt_compact(cell->p));
        row.push_back(format_cell(*cell));
      } else {
        row.insert(row.end(), {"", "", "", ""});
      }
    }
    out << join_csv(row) << "\n";
  }
  for (const char* name : {"Loglik", "AIC"}) {
    std::vector<std::string> row = {name};
    const auto& values = std::string(name) == "Loglik" ? table.loglik : table.aic;
    for (const std::optional<double>& v : values) {
      row.push_back(v ? fmt_compact(*v) : "");
      row.insert(row.end(), {"", "", ""});
    }
    out << join_csv(row) << "\n";
  }
  return out.str();
}

}  // namespace taglife

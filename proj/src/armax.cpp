#include "taglife/armax.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

#include "taglife/errors.hpp"

namespace taglife {

Eigen::Index RegressionDesign::n_obs() const {
  Eigen::Index n = 0;
  for (const DesignSegment& s : segments) n += s.y.size();
  return n;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ArmaParams {
  double phi1 = 0.0, phi2 = 0.0, psi = 0.0;
};

// Partial-autocorrelation reparameterization keeps the AR polynomial
// stationary; tanh keeps the MA root invertible.
ArmaParams from_unconstrained(const Eigen::Vector3d& u) {
  const double p1 = std::tanh(u[0]);
  const double p2 = std::tanh(u[1]);
  ArmaParams p;
  p.phi1 = p1 * (1.0 - p2);
  p.phi2 = p2;
  p.psi = std::tanh(u[2]);
  return p;
}

// Stationary state covariance of the ARMA(2,1) state-space form with
// unit innovation variance: P = T P T' + R R'.
Eigen::Matrix2d stationary_cov(const ArmaParams& p) {
  Eigen::Matrix3d A;
  Eigen::Vector3d b;
  // unknowns (p11, p12, p22)
  A << 1.0 - p.phi1 * p.phi1, -2.0 * p.phi1, -1.0,
       -p.phi1 * p.phi2, 1.0 - p.phi2, 0.0,
       -p.phi2 * p.phi2, 0.0, 1.0;
  b << 1.0, p.psi, p.psi * p.psi;
  const Eigen::Vector3d s = A.colPivHouseholderQr().solve(b);
  Eigen::Matrix2d P;
  P << s[0], s[1], s[1], s[2];
  return P;
}

struct FilterAccum {
  double sum_log_f = 0.0;
  Eigen::MatrixXd xtx;   // sum vx vx' / F
  Eigen::VectorXd xty;   // sum vx vy / F
  double yty = 0.0;      // sum vy^2 / F
  Eigen::Index n = 0;
};

// Runs the innovations filter on y and every predictor column at once.
// The covariance recursion is shared; only the state means differ.
void filter_segment(const DesignSegment& seg, const ArmaParams& p, FilterAccum& acc,
                    std::vector<double>* raw_vy = nullptr,
                    std::vector<Eigen::VectorXd>* raw_vx = nullptr,
                    std::vector<double>* raw_f = nullptr) {
  const Eigen::Index k = seg.x.cols();
  const Eigen::Index n = seg.y.size();
  Eigen::Matrix2d T;
  T << p.phi1, 1.0, p.phi2, 0.0;
  Eigen::Matrix2d RR;
  RR << 1.0, p.psi, p.psi, p.psi * p.psi;

  Eigen::Matrix2d P = stationary_cov(p);
  Eigen::Vector2d ay = Eigen::Vector2d::Zero();
  Eigen::MatrixXd ax = Eigen::MatrixXd::Zero(2, k);

  for (Eigen::Index t = 0; t < n; ++t) {
    const double F = P(0, 0);
    if (!(F > 1e-12)) throw ConvergenceError("armax filter: non-positive innovation variance");
    const Eigen::Vector2d M = P.col(0);

    const double vy = seg.y[t] - ay[0];
    Eigen::VectorXd vx = seg.x.row(t).transpose() - ax.row(0).transpose();

    acc.sum_log_f += std::log(F);
    acc.xtx.noalias() += vx * vx.transpose() / F;
    acc.xty.noalias() += vx * vy / F;
    acc.yty += vy * vy / F;
    ++acc.n;
    if (raw_vy) raw_vy->push_back(vy);
    if (raw_vx) raw_vx->push_back(vx);
    if (raw_f) raw_f->push_back(F);

    ay = T * (ay + M * (vy / F));
    ax = T * (ax + (M / F) * vx.transpose());
    const Eigen::Matrix2d Pf = P - M * M.transpose() / F;
    P = T * Pf * T.transpose() + RR;
  }
}

struct Concentrated {
  double loglik = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd beta;
  double sigma2 = 0.0;
};

Concentrated concentrated_loglik(const RegressionDesign& design, const ArmaParams& p) {
  const Eigen::Index k = design.n_predictors();
  FilterAccum acc;
  acc.xtx = Eigen::MatrixXd::Zero(k, k);
  acc.xty = Eigen::VectorXd::Zero(k);
  for (const DesignSegment& seg : design.segments) filter_segment(seg, p, acc);

  Concentrated c;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(acc.xtx);
  c.beta = ldlt.solve(acc.xty);
  const double rss = std::max(1e-300, acc.yty - c.beta.dot(acc.xty));
  const double n = static_cast<double>(acc.n);
  c.sigma2 = rss / n;
  c.loglik = -0.5 * n * (std::log(2.0 * kPi) + 1.0) - 0.5 * n * std::log(c.sigma2) -
             0.5 * acc.sum_log_f;
  return c;
}

double neg_profile(const RegressionDesign& design, const Eigen::Vector3d& u) {
  try {
    return -concentrated_loglik(design, from_unconstrained(u)).loglik;
  } catch (const std::exception&) {
    return 1e12;
  }
}

Eigen::Vector3d num_grad(const RegressionDesign& design, const Eigen::Vector3d& u) {
  Eigen::Vector3d g;
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d up = u, dn = u;
    up[i] += h;
    dn[i] -= h;
    g[i] = (neg_profile(design, up) - neg_profile(design, dn)) / (2.0 * h);
  }
  return g;
}

}  // namespace

double armax_loglik(const RegressionDesign& design, const Eigen::VectorXd& beta, double phi1,
                    double phi2, double psi, double sigma2) {
  if (sigma2 <= 0.0) return -std::numeric_limits<double>::infinity();
  ArmaParams p{phi1, phi2, psi};
  const Eigen::Index k = design.n_predictors();
  FilterAccum acc;
  acc.xtx = Eigen::MatrixXd::Zero(k, k);
  acc.xty = Eigen::VectorXd::Zero(k);
  std::vector<double> vy, f;
  std::vector<Eigen::VectorXd> vx;
  for (const DesignSegment& seg : design.segments) filter_segment(seg, p, acc, &vy, &vx, &f);
  const double n = static_cast<double>(acc.n);
  double quad = 0.0, sum_log_f = 0.0;
  for (std::size_t t = 0; t < vy.size(); ++t) {
    const double e = vy[t] - beta.dot(vx[t]);
    quad += e * e / f[t];
    sum_log_f += std::log(f[t]);
  }
  return -0.5 * n * std::log(2.0 * kPi * sigma2) - 0.5 * sum_log_f - 0.5 * quad / sigma2;
}

RegressionDesign build_design(const std::map<std::string, TagSeries>& series,
                              const std::vector<ClassAssignment>& assignments, TagClass cls,
                              bool with_env) {
  RegressionDesign design;
  design.predictor_names = {"intercept", "rt", "rp", "src_alpha", "follow_alpha"};
  if (with_env) {
    design.predictor_names.push_back("rtEnv");
    design.predictor_names.push_back("rpEnv");
    design.predictor_names.push_back("srcEnv_alpha");
  }
  const Eigen::Index k = design.n_predictors();

  for (const ClassAssignment& a : assignments) {
    if (a.cls != cls) continue;
    const auto it = series.find(a.tag);
    if (it == series.end()) throw DataError("build_design: no series for tag '" + a.tag + "'");
    const TagSeries& ts = it->second;
    const CurveSummary& cs = ts.summary;
    if (cs.t_star - cs.t0 < kMinSegmentMinutes) {
      design.excluded_tags.push_back(a.tag);
      continue;
    }
    const int first = ts.frames.front().minute;
    auto frame_at = [&](int minute) -> const VibrancyFrame& {
      return ts.frames[static_cast<std::size_t>(minute - first)];
    };

    DesignSegment seg;
    seg.tag = a.tag;
    const Eigen::Index len = cs.t_star - cs.t0;
    seg.y.resize(len);
    seg.x.resize(len, k);
    for (int t = cs.t0 + 1; t <= cs.t_star; ++t) {
      const Eigen::Index row = t - cs.t0 - 1;
      const VibrancyFrame& now = frame_at(t);
      const VibrancyFrame& lag = frame_at(t - 1);
      seg.y[row] = std::log1p(static_cast<double>(now.y));
      seg.x(row, 0) = 1.0;
      seg.x(row, 1) = std::log1p(static_cast<double>(lag.rt));
      seg.x(row, 2) = std::log1p(static_cast<double>(lag.rp));
      seg.x(row, 3) = static_cast<double>(lag.src_alpha);
      seg.x(row, 4) = std::log1p(lag.follow_alpha);
      if (with_env) {
        if (ts.env.empty()) throw DataError("build_design: env series missing for '" + a.tag + "'");
        const EnvFrame& elag = ts.env[static_cast<std::size_t>(t - 1 - first)];
        seg.x(row, 5) = std::log1p(static_cast<double>(elag.rt_env));
        seg.x(row, 6) = std::log1p(static_cast<double>(elag.rp_env));
        seg.x(row, 7) = static_cast<double>(elag.src_env_alpha);
      }
    }
    design.segments.push_back(std::move(seg));
  }
  if (design.segments.empty())
    throw DataError("build_design: class has zero usable segments");
  return design;
}

ArmaxFit fit_armax(const RegressionDesign& design) {
  const Eigen::Index k = design.n_predictors();
  const Eigen::Index n = design.n_obs();
  const Eigen::Index free_params = k + 4;  // beta, phi1, phi2, psi, sigma2
  if (n <= 10 * free_params)
    throw DataError("fit_armax: need more than 10 observations per free parameter");

  // BFGS on the 3 ARMA parameters; beta and sigma2 are concentrated out.
  Eigen::Vector3d u = Eigen::Vector3d::Zero();  // phi = psi = 0: OLS start
  double f = neg_profile(design, u);
  const double start_loglik = -f;
  Eigen::Vector3d g = num_grad(design, u);
  Eigen::Matrix3d H = Eigen::Matrix3d::Identity();

  int iter = 0;
  const int max_iter = 200;
  int stalls = 0;  // consecutive iterations with negligible improvement
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-7) {
      converged = true;
      break;
    }
    Eigen::Vector3d dir = -H * g;
    if (dir.dot(g) >= 0.0) dir = -g;  // reset on loss of descent
    double step = 1.0;
    double f_new = f;
    Eigen::Vector3d u_new = u;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      u_new = u + step * dir;
      f_new = neg_profile(design, u_new);
      if (f_new <= f + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::Vector3d g_new = num_grad(design, u_new);
    const Eigen::Vector3d s = u_new - u;
    const Eigen::Vector3d yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
      const Eigen::Matrix3d V = I - s * yv.transpose() / sy;
      H = V * H * V.transpose() + s * s.transpose() / sy;
    }
    const double improvement = f - f_new;
    u = u_new;
    f = f_new;
    g = g_new;
    if (improvement < 1e-12 && g.lpNorm<Eigen::Infinity>() < 1e-5) {
      converged = true;
      break;
    }
    // A flat likelihood ridge (typical near the stationarity boundary) can
    // leave a small residual gradient forever; repeated negligible steps
    // mean the optimum is located to working precision.
    stalls = improvement < 1e-10 * std::max(1.0, std::abs(f)) ? stalls + 1 : 0;
    if (stalls >= 3) {
      converged = true;
      break;
    }
  }
  if (!converged && iter == max_iter && g.lpNorm<Eigen::Infinity>() > 1e-3)
    throw ConvergenceError("fit_armax: optimizer failed to converge (grad norm " +
                           std::to_string(g.lpNorm<Eigen::Infinity>()) + ")");

  const ArmaParams p = from_unconstrained(u);
  const Concentrated c = concentrated_loglik(design, p);

  ArmaxFit fit;
  fit.predictor_names = design.predictor_names;
  fit.beta = c.beta;
  fit.phi1 = p.phi1;
  fit.phi2 = p.phi2;
  fit.psi = p.psi;
  fit.sigma2 = c.sigma2;
  fit.loglik = c.loglik;
  fit.start_loglik = start_loglik;
  fit.aic = 2.0 * static_cast<double>(free_params) - 2.0 * c.loglik;
  fit.n_obs = n;
  fit.iterations = iter;

  // Observed information in the natural parameterization.
  const Eigen::Index dim = k + 4;
  Eigen::VectorXd theta(dim);
  theta.head(k) = c.beta;
  theta[k] = p.phi1;
  theta[k + 1] = p.phi2;
  theta[k + 2] = p.psi;
  theta[k + 3] = c.sigma2;
  auto nll = [&](const Eigen::VectorXd& th) {
    try {
      return -armax_loglik(design, th.head(k), th[k], th[k + 1], th[k + 2], th[k + 3]);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  Eigen::MatrixXd info(dim, dim);
  const double f0 = nll(theta);
  std::vector<double> h(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i)
    h[static_cast<std::size_t>(i)] = std::max(1e-5, 1e-4 * std::abs(theta[i]));
  // Keep ARMA perturbations inside the stationary/invertible region.
  const double margin =
      std::min({1.0 - p.phi1 - p.phi2, 1.0 + p.phi1 - p.phi2, 1.0 - std::abs(p.phi2),
                1.0 - std::abs(p.psi), c.sigma2});
  for (Eigen::Index i = k; i < dim; ++i)
    h[static_cast<std::size_t>(i)] =
        std::min(h[static_cast<std::size_t>(i)], std::max(1e-8, 0.2 * margin));
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      const double hi = h[static_cast<std::size_t>(i)], hj = h[static_cast<std::size_t>(j)];
      if (i == j) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp[i] += hi;
        tm[i] -= hi;
        info(i, i) = (nll(tp) - 2.0 * f0 + nll(tm)) / (hi * hi);
      } else {
        Eigen::VectorXd tpp = theta, tpm = theta, tmp = theta, tmm = theta;
        tpp[i] += hi; tpp[j] += hj;
        tpm[i] += hi; tpm[j] -= hj;
        tmp[i] -= hi; tmp[j] += hj;
        tmm[i] -= hi; tmm[j] -= hj;
        info(i, j) = info(j, i) = (nll(tpp) - nll(tpm) - nll(tmp) + nll(tmm)) / (4.0 * hi * hj);
      }
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
  fit.beta_se.resize(k);
  if (!info.allFinite() || !lu.isInvertible()) {
    fit.se_flagged = true;
    fit.beta_se.setConstant(std::numeric_limits<double>::quiet_NaN());
    fit.phi1_se = fit.phi2_se = fit.psi_se = std::numeric_limits<double>::quiet_NaN();
  } else {
    const Eigen::MatrixXd cov = lu.inverse();
    for (Eigen::Index i = 0; i < k; ++i) {
      const double v = cov(i, i);
      if (v <= 0.0) {
        fit.se_flagged = true;
        fit.beta_se[i] = std::numeric_limits<double>::quiet_NaN();
      } else {
        fit.beta_se[i] = std::sqrt(v);
      }
    }
    auto safe_sqrt = [&](double v) {
      if (v <= 0.0) {
        fit.se_flagged = true;
        return std::numeric_limits<double>::quiet_NaN();
      }
      return std::sqrt(v);
    };
    fit.phi1_se = safe_sqrt(cov(k, k));
    fit.phi2_se = safe_sqrt(cov(k + 1, k + 1));
    fit.psi_se = safe_sqrt(cov(k + 2, k + 2));
  }
  return fit;
}

ResidualDiagnostics diagnostics(const ArmaxFit& fit, const RegressionDesign& design) {
  ArmaParams p{fit.phi1, fit.phi2, fit.psi};
  const Eigen::Index k = design.n_predictors();
  FilterAccum acc;
  acc.xtx = Eigen::MatrixXd::Zero(k, k);
  acc.xty = Eigen::VectorXd::Zero(k);
  std::vector<double> vy, f;
  std::vector<Eigen::VectorXd> vx;
  for (const DesignSegment& seg : design.segments) filter_segment(seg, p, acc, &vy, &vx, &f);

  std::vector<double> e(vy.size());
  for (std::size_t t = 0; t < vy.size(); ++t)
    e[t] = (vy[t] - fit.beta.dot(vx[t])) / std::sqrt(fit.sigma2 * f[t]);

  ResidualDiagnostics d;
  d.n = static_cast<Eigen::Index>(e.size());
  const double n = static_cast<double>(e.size());
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= n;
  double c0 = 0.0;
  for (double v : e) c0 += (v - mean) * (v - mean);
  const int max_lag = 20;
  d.acf.resize(max_lag);
  for (int lag = 1; lag <= max_lag; ++lag) {
    double ck = 0.0;
    for (std::size_t t = static_cast<std::size_t>(lag); t < e.size(); ++t)
      ck += (e[t] - mean) * (e[t - static_cast<std::size_t>(lag)] - mean);
    d.acf[static_cast<std::size_t>(lag - 1)] = ck / c0;
  }
  // Durbin-Levinson PACF from the ACF.
  d.pacf.resize(max_lag);
  std::vector<double> phi_prev(static_cast<std::size_t>(max_lag) + 1, 0.0);
  std::vector<double> phi_cur(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int m = 1; m <= max_lag; ++m) {
    double num = d.acf[static_cast<std::size_t>(m - 1)];
    double den = 1.0;
    for (int j = 1; j < m; ++j) {
      num -= phi_prev[static_cast<std::size_t>(j)] * d.acf[static_cast<std::size_t>(m - j - 1)];
      den -= phi_prev[static_cast<std::size_t>(j)] * d.acf[static_cast<std::size_t>(j - 1)];
    }
    const double pm = den != 0.0 ? num / den : 0.0;
    for (int j = 1; j < m; ++j)
      phi_cur[static_cast<std::size_t>(j)] = phi_prev[static_cast<std::size_t>(j)] -
                                             pm * phi_prev[static_cast<std::size_t>(m - j)];
    phi_cur[static_cast<std::size_t>(m)] = pm;
    phi_prev = phi_cur;
    d.pacf[static_cast<std::size_t>(m - 1)] = pm;
  }
  d.band = 2.0 / std::sqrt(n);
  double q = 0.0;
  for (int lag = 1; lag <= 10; ++lag)
    q += d.acf[static_cast<std::size_t>(lag - 1)] * d.acf[static_cast<std::size_t>(lag - 1)] /
         (n - static_cast<double>(lag));
  d.ljung_box = n * (n + 2.0) * q;
  const boost::math::chi_squared chi(7.0);  // 10 lags minus p+q=3
  d.ljung_box_pvalue = 1.0 - boost::math::cdf(chi, d.ljung_box);
  return d;
}

}  // namespace taglife

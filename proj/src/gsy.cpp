#include "dfp/gsy.hpp"

#include <stdexcept>

#include "dfp/coda.hpp"
#include "dfp/ingest.hpp"
#include "dfp/parallel.hpp"

namespace dfp {

ScoreFactorModel fit_score_factors(const Eigen::Ref<const MatrixXd>& scores, const KRule& rule) {
  const Index T = scores.rows(), ns = scores.cols();
  if (T < 2) throw std::invalid_argument("fit_score_factors: need at least two years");
  ScoreFactorModel m;
  m.col_means = scores.colwise().mean();
  const MatrixXd c = scores.rowwise() - m.col_means;
  MatrixXd cov = c.transpose() * c / static_cast<double>(T);
  cov = 0.5 * (cov + cov.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fit_score_factors: eigensolver failed");

  m.eigenvalues.resize(ns);
  MatrixXd vecs(ns, ns);
  for (Index r = 0; r < ns; ++r) {
    const Index src = ns - 1 - r;
    m.eigenvalues(r) = std::max(0.0, es.eigenvalues()(src));
    VectorXd v = es.eigenvectors().col(src);
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    vecs.col(r) = v(imax) < 0 ? VectorXd(-v) : v;
  }

  if (rule.is_fixed) {
    if (rule.k < 1 || rule.k > ns)
      throw std::invalid_argument("fit_score_factors: factor count must lie in [1, n_states]");
    m.r = rule.k;
  } else {
    m.r = m.eigenvalues(0) > 0.0 ? select_K_evr(m.eigenvalues, std::max<Index>(T, 2)) : 1;
  }
  m.loadings = vecs.leftCols(m.r);
  m.factors = c * m.loadings;
  return m;
}

ForecastSet gsy_two_stage(const DensityPanel& panel, const GsyConfig& config) {
  const Index ns = panel.n_states(), T = panel.n_years(), p = panel.n_ages();
  const int H = config.horizon;
  if (H < 1) throw std::invalid_argument("gsy_two_stage: horizon must be at least 1");
  if (config.p0 < 1) throw std::invalid_argument("gsy_two_stage: p0 must be at least 1");

  ForecastSet out;
  out.method = config.use_clr ? "gsy" : "gsy_noclr";
  out.grid = panel.grid();
  out.states = panel.states();
  out.radix = panel.radix();
  out.horizon = H;
  out.clr_blocks.assign(2 * ns, MatrixXd::Zero(H, p));
  out.density_blocks.assign(2 * ns, MatrixXd::Zero(H, p));

  const std::optional<ClrPanel> clrp =
      config.use_clr ? std::optional<ClrPanel>(clr_panel(panel)) : std::nullopt;
  auto series_block = [&](Index s, Gender g) -> const MatrixXd& {
    return config.use_clr ? clrp->block(s, g) : panel.block(s, g);
  };

  // Stage one: principal components per state x gender series.
  std::vector<FpcaModel> models(2 * ns);
  parallel_for(static_cast<int>(2 * ns), config.threads, [&](int i) {
    const Index s = i / 2;
    const Gender g = static_cast<Gender>(i % 2);
    const CovSurface cov =
        longrun_cov(panel.grid(), series_block(s, g), config.kernel, config.bandwidth);
    models[i] = fpca(cov, series_block(s, g), KRule::fixed(config.p0));
  });
  Index p0_eff = models[0].retained();
  for (const auto& m : models) p0_eff = std::min(p0_eff, m.retained());

  // Stage two: per gender and score index, a factor model across states,
  // with the factors forecast by ARIMA and mapped back through the loadings.
  std::vector<MatrixXd> score_fc(2 * ns, MatrixXd::Zero(H, p0_eff));
  parallel_for(static_cast<int>(2 * p0_eff), config.threads, [&](int task) {
    const Gender g = static_cast<Gender>(task % 2);
    const Index j = task / 2;
    MatrixXd v(T, ns);
    for (Index s = 0; s < ns; ++s) v.col(s) = models[2 * s + static_cast<int>(g)].scores.col(j);
    const ScoreFactorModel fm = fit_score_factors(v, config.r_rule);
    MatrixXd f_fc(H, fm.r);
    for (int r = 0; r < fm.r; ++r) {
      const ArimaFit af = auto_arima(fm.factors.col(r));
      f_fc.col(r) = forecast_scores(af, fm.factors.col(r), H).values;
    }
    const MatrixXd v_fc = (f_fc * fm.loadings.transpose()).rowwise() + fm.col_means;
    for (Index s = 0; s < ns; ++s) score_fc[2 * s + static_cast<int>(g)].col(j) = v_fc.col(s);
  });

  for (Index s = 0; s < ns; ++s)
    for (Gender g : kGenders) {
      const int i = 2 * s + static_cast<int>(g);
      const MatrixXd curve_fc = (score_fc[i] * models[i].basis.leftCols(p0_eff).transpose())
                                    .rowwise() +
                                models[i].mean.transpose();
      for (int h = 0; h < H; ++h) {
        if (config.use_clr) {
          out.clr_blocks[i].row(h) = curve_fc.row(h);
          out.density_blocks[i].row(h) =
              inv_clr(ClrCurve{panel.grid(), curve_fc.row(h).transpose()}, panel.radix())
                  .values.transpose();
        } else {
          // Raw-scale forecasts can dip below zero; clamp, refloor and
          // renormalise so the result is a valid density.
          VectorXd d = curve_fc.row(h).transpose().cwiseMax(0.0);
          const DensityCurve fixed =
              repair_zero_counts(DensityCurve{panel.grid(), d, panel.radix()});
          out.density_blocks[i].row(h) = fixed.values.transpose();
          out.clr_blocks[i].row(h) = clr(fixed).values.transpose();
        }
      }
    }
  return out;
}

}  // namespace dfp

#include "dfp/pipeline.hpp"

#include <stdexcept>

#include "dfp/coda.hpp"
#include "dfp/parallel.hpp"

namespace dfp {
namespace {

ForecastSet make_set(const DensityPanel& panel, const std::string& method, int horizon) {
  if (horizon < 1) throw std::invalid_argument("forecast: horizon must be at least 1");
  ForecastSet out;
  out.method = method;
  out.grid = panel.grid();
  out.states = panel.states();
  out.radix = panel.radix();
  out.horizon = horizon;
  out.clr_blocks.assign(2 * panel.states().size(), MatrixXd::Zero(horizon, panel.n_ages()));
  out.density_blocks = out.clr_blocks;
  return out;
}

}  // namespace

ForecastSet forecast_panel(const DensityPanel& panel, const PipelineConfig& config,
                           PipelineDiag* diag) {
  const Index ns = panel.n_states();
  const int H = config.horizon;
  ForecastSet out =
      make_set(panel, config.decomposition == AnovaMethod::FM ? "fm" : "fmp", H);

  const ClrPanel clrp = clr_panel(panel);
  const AnovaFit fit =
      config.decomposition == AnovaMethod::FM ? fm_anova(clrp) : fmp_anova(clrp);

  if (diag) diag->states.assign(ns, StateDiag{});

  parallel_for(static_cast<int>(ns), config.threads, [&](int si) {
    const Index s = si;
    const FpcaModel model =
        mfpca_stack(panel.grid(), fit.residuals.block(s, Gender::Female),
                    fit.residuals.block(s, Gender::Male), config.k_rule, config.kernel,
                    config.bandwidth);

    // One ARIMA per retained score column, iterated out to the horizon.
    const Index R = model.retained();
    MatrixXd score_fc(H, R);
    std::vector<ScoreDiag> sdiag(R);
    for (Index r = 0; r < R; ++r) {
      const ArimaFit af = auto_arima(model.scores.col(r));
      const ScoreForecast fc = forecast_scores(af, model.scores.col(r), H);
      score_fc.col(r) = fc.values;
      sdiag[r] = ScoreDiag{af.p, af.d, af.q, af.fallback};
    }

    // Residual forecasts on the stacked grid, then split by gender and add
    // the deterministic surface back before inverting the transform.
    const MatrixXd resid_fc =
        (score_fc * model.basis.transpose()).rowwise() + model.mean.transpose();
    const Index p = panel.n_ages();
    for (Gender g : kGenders) {
      const int gi = static_cast<int>(g);
      const VectorXd det = fit.deterministic(s, g);
      MatrixXd& clr_out = out.clr_blocks[2 * s + gi];
      MatrixXd& den_out = out.density_blocks[2 * s + gi];
      clr_out = resid_fc.middleCols(gi * p, p).rowwise() + det.transpose();
      for (int h = 0; h < H; ++h)
        den_out.row(h) =
            inv_clr(ClrCurve{panel.grid(), clr_out.row(h).transpose()}, panel.radix())
                .values.transpose();
    }

    if (diag) {
      StateDiag& d = diag->states[s];
      d.state = panel.states()[s];
      d.K = model.K;
      d.retained = R;
      d.bandwidth = model.bandwidth;
      d.scores = std::move(sdiag);
    }
  });
  return out;
}

ForecastSet naive_benchmark(const DensityPanel& panel, int horizon) {
  ForecastSet out = make_set(panel, "naive", horizon);
  const Index last = panel.n_years() - 1;
  for (Index s = 0; s < panel.n_states(); ++s)
    for (Gender g : kGenders) {
      const DensityCurve d = panel.curve(s, g, last);
      const ClrCurve y = clr(d);
      out.clr_blocks[2 * s + static_cast<int>(g)] =
          y.values.transpose().replicate(horizon, 1);
      out.density_blocks[2 * s + static_cast<int>(g)] =
          d.values.transpose().replicate(horizon, 1);
    }
  return out;
}

}  // namespace dfp

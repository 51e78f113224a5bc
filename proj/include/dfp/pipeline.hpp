#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfp/anova.hpp"
#include "dfp/arima.hpp"
#include "dfp/fpca.hpp"

namespace dfp {

struct PipelineConfig {
  AnovaMethod decomposition = AnovaMethod::FM;
  KRule k_rule = KRule::evr();
  LagKernel kernel = LagKernel::Bartlett;
  std::optional<double> bandwidth;  // absent selects the plug-in rule
  int horizon = 10;
  int threads = 1;
};

/// Point forecasts for every state x gender cell at horizons 1..H, on the
/// clr scale and as densities integrating to the panel radix.  Block (s, g)
/// is an H x p matrix, row h-1 for horizon h.
struct ForecastSet {
  std::string method;
  AgeGrid grid;
  std::vector<std::string> states;
  double radix = 1e5;
  int horizon = 0;
  std::vector<MatrixXd> clr_blocks;
  std::vector<MatrixXd> density_blocks;

  const MatrixXd& clr(Index s, Gender g) const { return clr_blocks[2 * s + static_cast<int>(g)]; }
  const MatrixXd& density(Index s, Gender g) const {
    return density_blocks[2 * s + static_cast<int>(g)];
  }
  DensityCurve density_curve(Index s, Gender g, int h) const {
    return DensityCurve{grid, density(s, g).row(h - 1).transpose(), radix};
  }
};

struct ScoreDiag {
  int p = 0, d = 0, q = 0;
  bool fallback = false;
};

struct StateDiag {
  std::string state;
  int K = 0;
  Index retained = 0;
  double bandwidth = 0.0;
  std::vector<ScoreDiag> scores;
};

struct PipelineDiag {
  std::vector<StateDiag> states;
};

/// Full forecasting pass: clr transform, additive decomposition, per-state
/// joint principal components of the gender-stacked residuals, one ARIMA
/// per score series, then reassembly and back-transform.
ForecastSet forecast_panel(const DensityPanel& panel, const PipelineConfig& config,
                           PipelineDiag* diag = nullptr);

/// No-change benchmark: the last observed density repeated at every horizon.
ForecastSet naive_benchmark(const DensityPanel& panel, int horizon);

}  // namespace dfp

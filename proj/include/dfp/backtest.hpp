#pragma once

#include <iosfwd>
#include <map>

#include "dfp/gsy.hpp"
#include "dfp/pipeline.hpp"

namespace dfp {

struct BacktestConfig {
  int train_window = 0;
  int horizon = 0;
  std::vector<std::string> methods{"fm"};  // any of fm, fmp, gsy, naive
  KRule k_rule = KRule::evr();
  LagKernel kernel = LagKernel::Bartlett;
  std::optional<double> bandwidth;
  bool gsy_clr = true;
  int gsy_p0 = 6;
  int threads = 1;
};

struct ErrorRow {
  std::string method;
  Gender gender = Gender::Female;
  int horizon = 0;
  double kld_x100 = 0.0;
  double jsd_x100 = 0.0;
};

struct ErrorMeanRow {
  std::string method;
  Gender gender = Gender::Female;
  double kld_x100 = 0.0;
  double jsd_x100 = 0.0;
};

/// Per (method, gender, horizon) divergences averaged over rolling windows,
/// states and grid size, times 100; mean rows average over horizons.
struct ErrorTable {
  std::vector<ErrorRow> rows;
  std::vector<ErrorMeanRow> means;
};

struct WindowDiag {
  int first_train_year = 0;
  int last_train_year = 0;
  std::map<std::string, PipelineDiag> pipelines;
};

struct BacktestDiag {
  std::vector<WindowDiag> windows;
};

/// Expanding set of rolling origins: every window of `train_window`
/// consecutive years whose full h = 1..horizon holdout lies inside the
/// panel is refit from scratch and scored against the held-out densities.
ErrorTable rolling_backtest(const DensityPanel& panel, const BacktestConfig& config,
                            BacktestDiag* diag = nullptr);

/// CSV rows `method,gender,horizon,kld_x100,jsd_x100`, mean rows last.
void write_error_table(std::ostream& out, const ErrorTable& table);

}  // namespace dfp

#include "dfp/backtest.hpp"

#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dfp/divergence.hpp"
#include "dfp/parallel.hpp"

namespace dfp {
namespace {

ForecastSet run_method(const DensityPanel& train, const std::string& method,
                       const BacktestConfig& config, PipelineDiag* diag) {
  if (method == "fm" || method == "fmp") {
    PipelineConfig pc;
    pc.decomposition = method == "fm" ? AnovaMethod::FM : AnovaMethod::FMP;
    pc.k_rule = config.k_rule;
    pc.kernel = config.kernel;
    pc.bandwidth = config.bandwidth;
    pc.horizon = config.horizon;
    return forecast_panel(train, pc, diag);
  }
  if (method == "gsy") {
    GsyConfig gc;
    gc.p0 = config.gsy_p0;
    gc.kernel = config.kernel;
    gc.bandwidth = config.bandwidth;
    gc.horizon = config.horizon;
    gc.use_clr = config.gsy_clr;
    return gsy_two_stage(train, gc);
  }
  if (method == "naive") return naive_benchmark(train, config.horizon);
  throw std::invalid_argument("rolling_backtest: unknown method '" + method + "'");
}

}  // namespace

ErrorTable rolling_backtest(const DensityPanel& panel, const BacktestConfig& config,
                            BacktestDiag* diag) {
  const Index T = panel.n_years();
  const Index ns = panel.n_states();
  const int m = config.train_window, H = config.horizon;
  if (m < 10) throw std::invalid_argument("rolling_backtest: train_window must be at least 10");
  if (H < 1) throw std::invalid_argument("rolling_backtest: horizon must be at least 1");
  const Index n_windows = T - m - H + 1;
  if (n_windows < 1)
    throw std::invalid_argument("rolling_backtest: panel has " + std::to_string(T) +
                                " years, need at least train_window + horizon = " +
                                std::to_string(m + H));
  if (config.methods.empty())
    throw std::invalid_argument("rolling_backtest: no methods requested");
  {
    std::set<std::string> seen;
    for (const auto& method : config.methods)
      if (!seen.insert(method).second)
        throw std::invalid_argument("rolling_backtest: duplicate method '" + method + "'");
  }

  const int n_methods = static_cast<int>(config.methods.size());
  const double p = static_cast<double>(panel.n_ages());

  // One task per (window, method); each fills its own slot so threaded and
  // serial runs reduce in the same order and agree bit for bit.
  struct TaskOut {
    MatrixXd kld_sum;  // 2 x H, gender by horizon, already divided by ns * p
    MatrixXd jsd_sum;
    PipelineDiag diag;
  };
  std::vector<TaskOut> slots(static_cast<size_t>(n_windows) * n_methods);
  const bool want_diag = diag != nullptr;

  parallel_for(static_cast<int>(n_windows) * n_methods, config.threads, [&](int task) {
    const Index w = task / n_methods;
    const std::string& method = config.methods[task % n_methods];
    const DensityPanel train = subset_years(panel, w, m);
    TaskOut& slot = slots[task];
    const bool pipeline_diag = want_diag && (method == "fm" || method == "fmp");
    const ForecastSet fc = run_method(train, method, config, pipeline_diag ? &slot.diag : nullptr);
    slot.kld_sum = MatrixXd::Zero(2, H);
    slot.jsd_sum = MatrixXd::Zero(2, H);
    for (int h = 1; h <= H; ++h) {
      const Index t_obs = w + m + h - 1;
      for (Index s = 0; s < ns; ++s)
        for (Gender g : kGenders) {
          const DensityCurve obs = panel.curve(s, g, t_obs);
          const DensityCurve hat = fc.density_curve(s, g, h);
          slot.kld_sum(static_cast<int>(g), h - 1) += kld(obs, hat);
          slot.jsd_sum(static_cast<int>(g), h - 1) += jsd(obs, hat);
        }
    }
    slot.kld_sum /= static_cast<double>(ns) * p;
    slot.jsd_sum /= static_cast<double>(ns) * p;
  });

  ErrorTable table;
  for (int mi = 0; mi < n_methods; ++mi) {
    MatrixXd kacc = MatrixXd::Zero(2, H), jacc = MatrixXd::Zero(2, H);
    for (Index w = 0; w < n_windows; ++w) {
      kacc += slots[w * n_methods + mi].kld_sum;
      jacc += slots[w * n_methods + mi].jsd_sum;
    }
    kacc *= 100.0 / static_cast<double>(n_windows);
    jacc *= 100.0 / static_cast<double>(n_windows);
    for (Gender g : kGenders) {
      const int gi = static_cast<int>(g);
      double mean_kld = 0.0, mean_jsd = 0.0;
      for (int h = 1; h <= H; ++h) {
        table.rows.push_back(
            ErrorRow{config.methods[mi], g, h, kacc(gi, h - 1), jacc(gi, h - 1)});
        mean_kld += kacc(gi, h - 1);
        mean_jsd += jacc(gi, h - 1);
      }
      table.means.push_back(
          ErrorMeanRow{config.methods[mi], g, mean_kld / H, mean_jsd / H});
    }
  }

  if (diag) {
    diag->windows.clear();
    for (Index w = 0; w < n_windows; ++w) {
      WindowDiag wd;
      wd.first_train_year = panel.years()[w];
      wd.last_train_year = panel.years()[w + m - 1];
      for (int mi = 0; mi < n_methods; ++mi) {
        const std::string& method = config.methods[mi];
        if (method == "fm" || method == "fmp")
          wd.pipelines[method] = slots[w * n_methods + mi].diag;
      }
      diag->windows.push_back(std::move(wd));
    }
  }
  return table;
}

void write_error_table(std::ostream& out, const ErrorTable& table) {
  out << "method,gender,horizon,kld_x100,jsd_x100\n";
  char buf[96];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", r.kld_x100, r.jsd_x100);
    out << r.method << ',' << gender_code(r.gender) << ',' << r.horizon << ',' << buf << '\n';
  }
  for (const auto& r : table.means) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", r.kld_x100, r.jsd_x100);
    out << r.method << ',' << gender_code(r.gender) << ",mean," << buf << '\n';
  }
}

}  // namespace dfp

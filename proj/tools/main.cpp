#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfp/backtest.hpp"
#include "dfp/coda.hpp"
#include "dfp/config.hpp"
#include "dfp/divergence.hpp"
#include "dfp/ingest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dfp;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string age_header(const AgeGrid& grid) {
  std::string out;
  for (Index i = 0; i < grid.size(); ++i) out += ",a" + fmt(grid.ages()(i));
  return out;
}

std::string row_values(const Eigen::Ref<const VectorXd>& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) out += "," + fmt(v(i));
  return out;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
  return out;
}

std::string kernel_name(LagKernel k) { return k == LagKernel::Bartlett ? "bartlett" : "flat_top"; }

json config_echo(const RunConfig& cfg) {
  json j;
  j["train_window"] = cfg.train_window;
  j["horizon"] = cfg.horizon;
  j["decomposition"] = cfg.decomposition == AnovaMethod::FM ? "fm" : "fmp";
  j["k_rule"] = cfg.k_rule.is_fixed ? "fixed:" + std::to_string(cfg.k_rule.k) : "evr";
  j["kernel"] = kernel_name(cfg.kernel);
  j["bandwidth"] = cfg.bandwidth ? "fixed:" + fmt(*cfg.bandwidth) : "plugin";
  j["clr"] = cfg.clr_on ? "on" : "off";
  j["methods"] = cfg.methods;
  j["seed"] = cfg.seed;
  return j;
}

json diag_to_json(const PipelineDiag& diag) {
  json arr = json::array();
  for (const auto& st : diag.states) {
    json s;
    s["state"] = st.state;
    s["K"] = st.K;
    s["retained"] = static_cast<int>(st.retained);
    s["bandwidth"] = st.bandwidth;
    json orders = json::array();
    for (const auto& sc : st.scores) {
      std::string o = std::to_string(sc.p) + "," + std::to_string(sc.d) + "," +
                      std::to_string(sc.q);
      if (sc.fallback) o += ",fallback";
      orders.push_back(o);
    }
    s["arima_orders"] = orders;
    arr.push_back(s);
  }
  return arr;
}

struct CommonArgs {
  std::string input;
  std::string outdir;
  std::string config_path;
  int parallel = 0;  // 0 = all available cores
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = parse_run_config_file(args.config_path);
  return cfg;
}

json base_manifest(const char* subcommand, const CommonArgs& args, const RunConfig& cfg) {
  json m;
  m["tool"] = "dfp";
  m["subcommand"] = subcommand;
  m["input"] = args.input;
  m["parallel"] = args.parallel;
  m["config"] = config_echo(cfg);
  return m;
}

void write_manifest(const fs::path& dir, const json& m) {
  auto out = open_out(dir, "manifest.json");
  out << m.dump(2) << '\n';
}

fs::path ensure_outdir(const CommonArgs& args) {
  if (args.outdir.empty()) throw std::invalid_argument("an output directory is required (--outdir)");
  fs::create_directories(args.outdir);
  return args.outdir;
}

PipelineConfig pipeline_config(const RunConfig& cfg, int horizon, int threads) {
  PipelineConfig pc;
  pc.decomposition = cfg.decomposition;
  pc.k_rule = cfg.k_rule;
  pc.kernel = cfg.kernel;
  pc.bandwidth = cfg.bandwidth;
  pc.horizon = horizon;
  pc.threads = threads;
  return pc;
}

ForecastSet forecast_by_name(const DensityPanel& panel, const std::string& method,
                             const RunConfig& cfg, int threads, PipelineDiag* diag) {
  if (method == "fm" || method == "fmp") {
    PipelineConfig pc = pipeline_config(cfg, cfg.horizon, threads);
    pc.decomposition = method == "fm" ? AnovaMethod::FM : AnovaMethod::FMP;
    return forecast_panel(panel, pc, diag);
  }
  if (method == "gsy") {
    GsyConfig gc;
    gc.kernel = cfg.kernel;
    gc.bandwidth = cfg.bandwidth;
    gc.horizon = cfg.horizon;
    gc.use_clr = cfg.clr_on;
    gc.threads = threads;
    return gsy_two_stage(panel, gc);
  }
  if (method == "naive") return naive_benchmark(panel, cfg.horizon);
  throw std::invalid_argument("unknown method '" + method + "'");
}

int cmd_validate(const CommonArgs& args, const RunConfig& cfg) {
  const LoadedPanel loaded = load_panel_file(args.input);
  const DensityPanel panel = repair_panel(loaded);
  std::cout << "ok: n_s=" << panel.n_states() << " T=" << panel.n_years()
            << " p=" << panel.n_ages() << " years=" << panel.years().front() << ".."
            << panel.years().back() << (loaded.has_qx ? " qx=present" : " qx=absent") << '\n';
  if (!args.outdir.empty()) {
    const fs::path dir = ensure_outdir(args);
    auto gini = open_out(dir, "gini.csv");
    write_gini_summary(gini, panel);
    json m = base_manifest("validate", args, cfg);
    m["outputs"] = {"gini.csv"};
    write_manifest(dir, m);
  }
  return 0;
}

int cmd_transform(const CommonArgs& args, const RunConfig& cfg) {
  const DensityPanel panel = repair_panel(load_panel_file(args.input));
  const ClrPanel clrp = clr_panel(panel);
  const fs::path dir = ensure_outdir(args);
  auto out = open_out(dir, "clr.csv");
  out << "state,gender,year" << age_header(panel.grid()) << '\n';
  for (Index s = 0; s < clrp.n_states(); ++s)
    for (Gender g : kGenders)
      for (Index t = 0; t < clrp.n_years(); ++t)
        out << clrp.states()[s] << ',' << gender_code(g) << ',' << clrp.years()[t]
            << row_values(clrp.block(s, g).row(t).transpose()) << '\n';
  json m = base_manifest("transform", args, cfg);
  m["outputs"] = {"clr.csv"};
  write_manifest(dir, m);
  return 0;
}

int cmd_decompose(const CommonArgs& args, const RunConfig& cfg) {
  const DensityPanel panel = repair_panel(load_panel_file(args.input));
  const ClrPanel clrp = clr_panel(panel);
  const AnovaFit fit =
      cfg.decomposition == AnovaMethod::FM ? fm_anova(clrp) : fmp_anova(clrp);
  const fs::path dir = ensure_outdir(args);

  auto mu = open_out(dir, "mu.csv");
  mu << "age,value\n";
  for (Index i = 0; i < panel.n_ages(); ++i)
    mu << fmt(panel.grid().ages()(i)) << ',' << fmt(fit.mu(i)) << '\n';

  auto alpha = open_out(dir, "alpha.csv");
  alpha << "state" << age_header(panel.grid()) << '\n';
  for (Index s = 0; s < panel.n_states(); ++s)
    alpha << panel.states()[s] << row_values(fit.alpha.row(s).transpose()) << '\n';

  auto beta = open_out(dir, "beta.csv");
  beta << "gender" << age_header(panel.grid()) << '\n';
  for (Gender g : kGenders)
    beta << gender_code(g) << row_values(fit.beta.row(static_cast<int>(g)).transpose()) << '\n';

  auto resid = open_out(dir, "residuals.csv");
  resid << "state,gender,year" << age_header(panel.grid()) << '\n';
  for (Index s = 0; s < panel.n_states(); ++s)
    for (Gender g : kGenders)
      for (Index t = 0; t < panel.n_years(); ++t)
        resid << panel.states()[s] << ',' << gender_code(g) << ',' << panel.years()[t]
              << row_values(fit.residuals.block(s, g).row(t).transpose()) << '\n';

  json m = base_manifest("decompose", args, cfg);
  m["outputs"] = {"mu.csv", "alpha.csv", "beta.csv", "residuals.csv"};
  if (fit.method == AnovaMethod::FMP) {
    m["iterations"] = fit.iterations;
    m["converged"] = fit.converged;
  }
  write_manifest(dir, m);
  return 0;
}

int cmd_fpca(const CommonArgs& args, const RunConfig& cfg) {
  const DensityPanel panel = repair_panel(load_panel_file(args.input));
  const ClrPanel clrp = clr_panel(panel);
  const AnovaFit fit =
      cfg.decomposition == AnovaMethod::FM ? fm_anova(clrp) : fmp_anova(clrp);
  const fs::path dir = ensure_outdir(args);

  auto vals = open_out(dir, "fpca_eigenvalues.csv");
  vals << "state,component,eigenvalue\n";
  auto basis = open_out(dir, "fpca_basis.csv");
  basis << "state,component,block" << age_header(panel.grid()) << '\n';
  auto summary = open_out(dir, "fpca_summary.csv");
  summary << "state,K,retained,bandwidth\n";

  const Index p = panel.n_ages();
  for (Index s = 0; s < panel.n_states(); ++s) {
    const FpcaModel model =
        mfpca_stack(panel.grid(), fit.residuals.block(s, Gender::Female),
                    fit.residuals.block(s, Gender::Male), cfg.k_rule, cfg.kernel, cfg.bandwidth);
    for (Index r = 0; r < model.eigenvalues.size(); ++r)
      vals << panel.states()[s] << ',' << r + 1 << ',' << fmt(model.eigenvalues(r)) << '\n';
    for (Index r = 0; r < model.retained(); ++r) {
      basis << panel.states()[s] << ',' << r + 1 << ",F"
            << row_values(model.basis.col(r).head(p)) << '\n';
      basis << panel.states()[s] << ',' << r + 1 << ",M"
            << row_values(model.basis.col(r).tail(p)) << '\n';
    }
    summary << panel.states()[s] << ',' << model.K << ',' << model.retained() << ','
            << fmt(model.bandwidth) << '\n';
  }
  json m = base_manifest("fpca", args, cfg);
  m["outputs"] = {"fpca_eigenvalues.csv", "fpca_basis.csv", "fpca_summary.csv"};
  write_manifest(dir, m);
  return 0;
}

int cmd_forecast(const CommonArgs& args, const RunConfig& cfg) {
  const DensityPanel panel = repair_panel(load_panel_file(args.input));
  const fs::path dir = ensure_outdir(args);
  auto den = open_out(dir, "forecast_density.csv");
  den << "method,state,gender,horizon" << age_header(panel.grid()) << '\n';
  auto clr_out = open_out(dir, "forecast_clr.csv");
  clr_out << "method,state,gender,horizon" << age_header(panel.grid()) << '\n';

  json m = base_manifest("forecast", args, cfg);
  json diags;
  for (const auto& method : cfg.methods) {
    PipelineDiag diag;
    const bool with_diag = method == "fm" || method == "fmp";
    const ForecastSet fc =
        forecast_by_name(panel, method, cfg, args.parallel, with_diag ? &diag : nullptr);
    for (Index s = 0; s < panel.n_states(); ++s)
      for (Gender g : kGenders)
        for (int h = 1; h <= fc.horizon; ++h) {
          den << method << ',' << panel.states()[s] << ',' << gender_code(g) << ',' << h
              << row_values(fc.density(s, g).row(h - 1).transpose()) << '\n';
          clr_out << method << ',' << panel.states()[s] << ',' << gender_code(g) << ',' << h
                  << row_values(fc.clr(s, g).row(h - 1).transpose()) << '\n';
        }
    if (with_diag) diags[method] = diag_to_json(diag);
  }
  m["outputs"] = {"forecast_density.csv", "forecast_clr.csv"};
  if (!diags.is_null()) m["diagnostics"] = diags;
  write_manifest(dir, m);
  return 0;
}

int cmd_backtest(const CommonArgs& args, const RunConfig& cfg) {
  const DensityPanel panel = repair_panel(load_panel_file(args.input));
  BacktestConfig bc;
  bc.train_window = cfg.train_window;
  bc.horizon = cfg.horizon;
  bc.methods = cfg.methods;
  bc.k_rule = cfg.k_rule;
  bc.kernel = cfg.kernel;
  bc.bandwidth = cfg.bandwidth;
  bc.gsy_clr = cfg.clr_on;
  bc.threads = args.parallel;
  BacktestDiag diag;
  const ErrorTable table = rolling_backtest(panel, bc, &diag);

  const fs::path dir = ensure_outdir(args);
  auto out = open_out(dir, "errors.csv");
  write_error_table(out, table);

  json m = base_manifest("backtest", args, cfg);
  m["outputs"] = {"errors.csv"};
  json windows = json::array();
  for (const auto& w : diag.windows) {
    json jw;
    jw["first_train_year"] = w.first_train_year;
    jw["last_train_year"] = w.last_train_year;
    for (const auto& [method, pd] : w.pipelines) jw[method] = diag_to_json(pd);
    windows.push_back(jw);
  }
  m["windows"] = windows;
  write_manifest(dir, m);
  return 0;
}

int cmd_report(const CommonArgs& args, const RunConfig& cfg) {
  const DensityPanel panel = repair_panel(load_panel_file(args.input));
  const Index T = panel.n_years();
  const int m_train = cfg.train_window, H = cfg.horizon;
  if (T < m_train + H)
    throw std::invalid_argument("report: panel has " + std::to_string(T) +
                                " years, need train_window + horizon = " +
                                std::to_string(m_train + H));
  // Latest window whose holdout still lies inside the panel.
  const Index start = T - m_train - H;
  const DensityPanel train = subset_years(panel, start, m_train);

  const fs::path dir = ensure_outdir(args);
  auto out = open_out(dir, "plotdata.csv");
  out << "series,state,gender,horizon,year" << age_header(panel.grid()) << '\n';
  for (int h = 1; h <= H; ++h) {
    const Index t_obs = start + m_train + h - 1;
    for (Index s = 0; s < panel.n_states(); ++s)
      for (Gender g : kGenders)
        out << "observed," << panel.states()[s] << ',' << gender_code(g) << ',' << h << ','
            << panel.years()[t_obs] << row_values(panel.block(s, g).row(t_obs).transpose())
            << '\n';
  }
  for (const auto& method : cfg.methods) {
    const ForecastSet fc = forecast_by_name(train, method, cfg, args.parallel, nullptr);
    for (int h = 1; h <= H; ++h) {
      const Index t_obs = start + m_train + h - 1;
      for (Index s = 0; s < panel.n_states(); ++s)
        for (Gender g : kGenders)
          out << method << ',' << panel.states()[s] << ',' << gender_code(g) << ',' << h << ','
              << panel.years()[t_obs] << row_values(fc.density(s, g).row(h - 1).transpose())
              << '\n';
    }
  }
  json m = base_manifest("report", args, cfg);
  m["outputs"] = {"plotdata.csv"};
  m["train_years"] = {train.years().front(), train.years().back()};
  write_manifest(dir, m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecasting panels of age-at-death distributions"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--config", args.config_path, "key = value settings file");
  app.add_option("--input", args.input, "input CSV (state,gender,year,age,dx[,qx])");
  app.add_option("--outdir", args.outdir, "directory for result files");
  app.add_option("--parallel", args.parallel, "worker threads (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
  app.fallthrough();

  int (*handler)(const CommonArgs&, const RunConfig&) = nullptr;
  app.add_subcommand("validate", "load the panel, check rectangularity, summarise")
      ->callback([&] { handler = cmd_validate; });
  app.add_subcommand("transform", "write the clr transform of every curve")
      ->callback([&] { handler = cmd_transform; });
  app.add_subcommand("decompose", "fit the additive decomposition and write its parts")
      ->callback([&] { handler = cmd_decompose; });
  app.add_subcommand("fpca", "write principal components of the residual panel")
      ->callback([&] { handler = cmd_fpca; });
  app.add_subcommand("forecast", "forecast every cell over the configured horizon")
      ->callback([&] { handler = cmd_forecast; });
  app.add_subcommand("backtest", "rolling-origin evaluation of the configured methods")
      ->callback([&] { handler = cmd_backtest; });
  app.add_subcommand("report", "observed versus forecast curves for the last window")
      ->callback([&] { handler = cmd_report; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (args.input.empty()) throw std::invalid_argument("an input CSV is required (--input)");
    const RunConfig cfg = load_config(args);
    return handler(args, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

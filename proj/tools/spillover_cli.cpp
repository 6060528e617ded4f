#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "spillover/connectedness.hpp"
#include "spillover/correlation.hpp"
#include "spillover/diagnostics.hpp"
#include "spillover/error.hpp"
#include "spillover/fevd.hpp"
#include "spillover/io.hpp"
#include "spillover/panel.hpp"
#include "spillover/pipeline.hpp"
#include "spillover/tvp.hpp"
#include "spillover/var.hpp"

namespace {

using namespace spillover;

struct InputFlags {
  std::string path;
  std::string date_column = "date";
  std::vector<std::string> columns;
  std::string delimiter = ",";
  std::string date_format = "%Y-%m-%d";
  std::string transform = "identity";
  std::string output;

  void attach(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("-i,--input", path, "Input CSV panel");
    if (required) opt->required();
    app->add_option("--date-column", date_column, "Name of the date column")->capture_default_str();
    app->add_option("--columns", columns, "Columns to keep, comma separated")->delimiter(',');
    app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    app->add_option("--date-format", date_format, "Date format (%Y %m %d)")->capture_default_str();
    app->add_option("--transform", transform,
                    "identity | cumulative-return | first-difference | log-level, applied to every column")
        ->capture_default_str();
    app->add_option("-o,--output", output, "Output file (default stdout)");
  }

  PanelSeries load() const {
    if (delimiter.size() != 1) throw ParameterError("--delimiter must be a single character");
    CsvOptions opt;
    opt.date_column = date_column;
    opt.columns = columns;
    opt.delimiter = delimiter[0];
    opt.date_format = date_format;
    PanelSeries panel = load_csv(path, opt);
    return apply_transforms(panel, TransformSpec::uniform(panel.names, parse_transform_kind(transform)));
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

std::span<const double> column_span(const PanelSeries& panel, Eigen::Index j, Eigen::VectorXd& storage) {
  storage = panel.values.col(j);
  return {storage.data(), static_cast<std::size_t>(storage.size())};
}

int resolve_lag(const std::string& text, int max_lag, const PanelSeries& panel) {
  if (text == "auto" || text == "bic") return select_lag(panel, max_lag, LagCriterion::bic);
  if (text == "aic") return select_lag(panel, max_lag, LagCriterion::aic);
  try {
    std::size_t used = 0;
    const int p = std::stoi(text, &used);
    if (used != text.size() || p < 1) throw std::invalid_argument(text);
    return p;
  } catch (const std::logic_error&) {
    throw ParameterError("--lag must be a positive integer, auto, bic or aic (got '" + text + "')");
  }
}

void warn_if_unstable(const VarModel& model) {
  const double rho = spectral_radius(model);
  if (rho >= 1.0)
    std::cerr << "warning: fitted VAR is not stable (spectral radius " << format_fixed(rho, 4)
              << "); variance decompositions are not meaningful\n";
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json with_variable(json record, const std::string& name) {
  json out{{"variable", name}};
  for (auto& [k, v] : record.items()) out[k] = v;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation, cointegration and connectedness analysis of multivariate time series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spillover 0.1.0");

  // describe
  InputFlags describe_in;
  int lb_lags = 20;
  double describe_level = 0.05;
  bool describe_stars = false;
  std::string describe_format = "csv";
  auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics with Jarque-Bera and Ljung-Box Q2");
  describe_in.attach(describe_cmd);
  describe_cmd->add_option("--lb-lags", lb_lags, "Ljung-Box lags on squared series")->capture_default_str();
  describe_cmd->add_option("--level", describe_level, "Significance level")->capture_default_str();
  describe_cmd->add_flag("--stars", describe_stars, "Append significance stars");
  describe_cmd->add_option("--format", describe_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // test-adf
  InputFlags adf_in;
  std::optional<int> adf_max_lags;
  std::string adf_det = "c";
  double adf_level = 0.05;
  bool adf_stars = false, adf_difference = false;
  auto* adf_cmd = app.add_subcommand("test-adf", "Augmented Dickey-Fuller unit-root test per column");
  adf_in.attach(adf_cmd);
  adf_cmd->add_option("--max-lags", adf_max_lags, "Maximum augmentation lags (default 12(T/100)^0.25)");
  adf_cmd->add_option("--deterministic", adf_det, "n | c | ct")->capture_default_str();
  adf_cmd->add_option("--level", adf_level, "Significance level")->capture_default_str();
  adf_cmd->add_flag("--difference", adf_difference, "Test first differences instead of levels");
  adf_cmd->add_flag("--stars", adf_stars, "Append significance stars");

  // test-coint
  InputFlags coint_in;
  std::string coint_x, coint_y;
  std::optional<int> coint_max_lags;
  std::string coint_det = "c";
  double coint_level = 0.05;
  bool coint_stars = false, bidirectional = false;
  auto* coint_cmd = app.add_subcommand("test-coint", "Engle-Granger two-step cointegration test");
  coint_in.attach(coint_cmd);
  coint_cmd->add_option("-x,--x", coint_x, "Regressand column")->required();
  coint_cmd->add_option("-y,--y", coint_y, "Regressor column")->required();
  coint_cmd->add_flag("--bidirectional", bidirectional, "Also run with the roles swapped");
  coint_cmd->add_option("--max-lags", coint_max_lags, "Maximum augmentation lags of the residual ADF");
  coint_cmd->add_option("--deterministic", coint_det, "n | c | ct")->capture_default_str();
  coint_cmd->add_option("--level", coint_level, "Significance level")->capture_default_str();
  coint_cmd->add_flag("--stars", coint_stars, "Append significance stars");

  // test-chow
  InputFlags chow_in;
  ChowOptions chow;
  std::optional<long long> chow_break;
  std::string chow_break_date, chow_variant = "break-point";
  bool chow_stars = false;
  auto* chow_cmd = app.add_subcommand("test-chow", "Chow stability test for a VAR with bootstrap p-value");
  chow_in.attach(chow_cmd);
  chow_cmd->add_option("--lag", chow.lag, "VAR lag order")->capture_default_str();
  auto* break_opt = chow_cmd->add_option("--break", chow_break, "Break row index (default midpoint)");
  chow_cmd->add_option("--break-date", chow_break_date, "Break date, first row of the second regime")
      ->excludes(break_opt);
  chow_cmd->add_option("--variant", chow_variant, "break-point | sample-split")->capture_default_str();
  chow_cmd->add_option("--reps", chow.bootstrap_reps, "Bootstrap replications")->capture_default_str();
  chow_cmd->add_option("--seed", chow.seed, "Random seed")->capture_default_str();
  chow_cmd->add_option("--threads", chow.threads, "Worker threads")->capture_default_str();
  chow_cmd->add_option("--level", chow.level, "Significance level")->capture_default_str();
  chow_cmd->add_flag("--stars", chow_stars, "Append significance stars");

  // corr
  InputFlags corr_in;
  std::string corr_kind = "pearson", corr_format = "csv", corr_lag = "1";
  int corr_max_lag = 4;
  bool corr_upper = false;
  auto* corr_cmd = app.add_subcommand("corr", "Static or VAR-residual correlation matrix");
  corr_in.attach(corr_cmd);
  corr_cmd->add_option("--kind", corr_kind, "pearson | spearman | kendall | var-conditional | var-partial")
      ->capture_default_str();
  corr_cmd->add_option("--lag", corr_lag, "VAR lag for the var-* kinds (integer or auto)")->capture_default_str();
  corr_cmd->add_option("--max-lag", corr_max_lag, "Largest lag considered by auto")->capture_default_str();
  corr_cmd->add_flag("--upper", corr_upper, "Render the upper triangle only");
  corr_cmd->add_option("--format", corr_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // static-conn
  InputFlags static_in;
  std::string static_lag = "1", static_format = "table";
  int static_max_lag = 4, static_horizon = 10;
  std::vector<std::string> cholesky_order;
  bool static_raw = false;
  auto* static_cmd = app.add_subcommand("static-conn", "Full-sample VAR connectedness table");
  static_in.attach(static_cmd);
  static_cmd->add_option("--lag", static_lag, "VAR lag (integer or auto)")->capture_default_str();
  static_cmd->add_option("--max-lag", static_max_lag, "Largest lag considered by auto")->capture_default_str();
  static_cmd->add_option("--horizon", static_horizon, "Forecast horizon")->capture_default_str();
  static_cmd->add_option("--cholesky", cholesky_order, "Use a Cholesky FEVD with this ordering")->delimiter(',');
  static_cmd->add_flag("--npdc-raw", static_raw, "Report NPDC as l_ij - l_ji");
  static_cmd->add_option("--format", static_format, "table | json | fevd")
      ->check(CLI::IsMember({"table", "json", "fevd"}))
      ->capture_default_str();

  // dynamic-conn
  InputFlags dyn_in;
  std::string dyn_lag = "1", dyn_measure = "npdc", dyn_format = "long", dyn_trajectory;
  int dyn_max_lag = 4, dyn_horizon = 10, dyn_threads = 1;
  std::optional<int> dyn_window;
  std::vector<std::string> dyn_pair;
  TvpConfig tvp;
  bool dyn_raw = false, dyn_net = false, dyn_tci = false;
  auto* dyn_cmd = app.add_subcommand("dynamic-conn", "TVP-VAR (or rolling VAR) dynamic connectedness");
  dyn_in.attach(dyn_cmd);
  dyn_cmd->add_option("--lag", dyn_lag, "VAR lag (integer or auto)")->capture_default_str();
  dyn_cmd->add_option("--max-lag", dyn_max_lag, "Largest lag considered by auto")->capture_default_str();
  dyn_cmd->add_option("--horizon", dyn_horizon, "Forecast horizon")->capture_default_str();
  dyn_cmd->add_option("--window", dyn_window, "Rolling-window length; replaces the TVP filter");
  dyn_cmd->add_option("--kappa1", tvp.kappa1, "Coefficient forgetting factor")->capture_default_str();
  dyn_cmd->add_option("--kappa2", tvp.kappa2, "Covariance decay factor")->capture_default_str();
  dyn_cmd->add_option("--prior-scale", tvp.prior_scale, "Scale of the initial state covariance")
      ->capture_default_str();
  dyn_cmd->add_option("--burn-in", tvp.burn_in, "Observations used for the OLS prior");
  auto* pair_opt = dyn_cmd->add_option("--pair", dyn_pair, "Pair A,B for a two-column series")
                       ->delimiter(',')
                       ->expected(2);
  dyn_cmd->add_option("--measure", dyn_measure, "npdc | pci | pii")->capture_default_str();
  dyn_cmd->add_flag("--net", dyn_net, "Emit the NET series of every variable")->excludes(pair_opt);
  dyn_cmd->add_flag("--tci", dyn_tci, "Emit the TCI series")->excludes(pair_opt);
  dyn_cmd->add_flag("--npdc-raw", dyn_raw, "Report NPDC as l_ij - l_ji");
  dyn_cmd->add_option("--format", dyn_format, "long | json")
      ->check(CLI::IsMember({"long", "json"}))
      ->capture_default_str();
  dyn_cmd->add_option("--trajectory", dyn_trajectory, "Also write filtered coefficients to this CSV");
  dyn_cmd->add_option("--threads", dyn_threads, "Worker threads")->capture_default_str();

  // export-net
  InputFlags net_in;
  std::string net_fevd, net_lag = "1";
  int net_max_lag = 4, net_horizon = 10;
  double net_threshold = 0.0;
  bool net_raw = false;
  auto* net_cmd = app.add_subcommand("export-net", "Directed NPDC network in Graphviz DOT");
  net_in.attach(net_cmd, false);
  auto* fevd_opt =
      net_cmd->add_option("--fevd", net_fevd, "FEVD table CSV (as written by static-conn --format fevd)");
  net_cmd->get_option("--input")->excludes(fevd_opt);
  net_cmd->add_option("--lag", net_lag, "VAR lag when fitting from --input")->capture_default_str();
  net_cmd->add_option("--max-lag", net_max_lag, "Largest lag considered by auto")->capture_default_str();
  net_cmd->add_option("--horizon", net_horizon, "Forecast horizon when fitting from --input")->capture_default_str();
  net_cmd->add_option("--threshold", net_threshold, "Drop edges with |NPDC| at or below this value")
      ->capture_default_str();
  net_cmd->add_flag("--npdc-raw", net_raw, "Report NPDC as l_ij - l_ji");

  // run
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run the whole workflow from a JSON config");
  run_cmd->add_option("-c,--config", config_path, "Pipeline config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*describe_cmd) {
      const auto panel = describe_in.load();
      json records = json::array();
      std::ostringstream out;
      out << "variable,mean,median,sd,skewness,excess_kurtosis,q1,q3,jarque_bera,jarque_bera_p,q2,q2_p\n";
      Eigen::VectorXd buf;
      for (Eigen::Index j = 0; j < panel.cols(); ++j) {
        const auto& name = panel.names[static_cast<std::size_t>(j)];
        auto x = column_span(panel, j, buf);
        const auto d = describe(x, name);
        const auto jb = jarque_bera(x, describe_level);
        const auto lb = ljung_box_squared(x, lb_lags, describe_level);
        const auto star = [&](const TestResult& r) {
          return describe_stars ? significance_stars(r.p_value) : std::string{};
        };
        out << name << ',' << format_double(d.mean) << ',' << format_double(d.median) << ','
            << format_double(d.sd) << ',' << format_double(d.skewness) << ',' << format_double(d.excess_kurtosis)
            << ',' << format_double(d.q1) << ',' << format_double(d.q3) << ',' << format_double(jb.statistic)
            << star(jb) << ',' << format_double(jb.p_value) << ',' << format_double(lb.statistic) << star(lb)
            << ',' << format_double(lb.p_value) << '\n';
        json rec = to_json(d);
        rec["jarque_bera"] = to_json(jb, describe_stars);
        rec["ljung_box_squared"] = to_json(lb, describe_stars);
        records.push_back(rec);
      }
      emit(describe_in.output, describe_format == "json" ? dump(records) : out.str());
    } else if (*adf_cmd) {
      auto panel = adf_in.load();
      if (adf_difference) panel = first_difference(panel);
      const auto det = parse_deterministic(adf_det);
      json records = json::array();
      Eigen::VectorXd buf;
      for (Eigen::Index j = 0; j < panel.cols(); ++j)
        records.push_back(with_variable(
            to_json(adf_test(column_span(panel, j, buf), adf_max_lags, det, adf_level), adf_stars),
            panel.names[static_cast<std::size_t>(j)]));
      emit(adf_in.output, dump(records));
    } else if (*coint_cmd) {
      const auto panel = coint_in.load();
      const auto det = parse_deterministic(coint_det);
      Eigen::VectorXd a, b;
      const auto run = [&](const std::string& x, const std::string& y) {
        auto rec = to_json(engle_granger(column_span(panel, panel.column(x), a), column_span(panel, panel.column(y), b),
                                         det, coint_max_lags, coint_level),
                           coint_stars);
        json out{{"regressand", x}, {"regressor", y}};
        for (auto& [k, v] : rec.items()) out[k] = v;
        return out;
      };
      json records = json::array({run(coint_x, coint_y)});
      if (bidirectional) records.push_back(run(coint_y, coint_x));
      emit(coint_in.output, dump(records));
    } else if (*chow_cmd) {
      const auto panel = chow_in.load();
      chow.variant = parse_chow_variant(chow_variant);
      if (!chow_break_date.empty()) {
        const Date d = parse_date(chow_break_date, chow_in.date_format);
        const auto it = std::lower_bound(panel.dates.begin(), panel.dates.end(), d);
        if (it == panel.dates.end()) throw ParameterError("break outside sample");
        chow.break_index = it - panel.dates.begin();
      } else {
        chow.break_index = chow_break ? static_cast<Eigen::Index>(*chow_break) : panel.rows() / 2;
      }
      auto rec = to_json(chow_test(panel, chow), chow_stars);
      rec["break_index"] = chow.break_index;
      if (chow.break_index >= 0 && chow.break_index < panel.rows())
        rec["break_date"] = format_date(panel.dates[static_cast<std::size_t>(chow.break_index)]);
      emit(chow_in.output, dump(rec));
    } else if (*corr_cmd) {
      const auto panel = corr_in.load();
      const auto kind = parse_correlation_kind(corr_kind);
      CorrelationMatrix m;
      if (kind == CorrelationKind::var_conditional || kind == CorrelationKind::var_partial) {
        const auto model = fit_var(panel, resolve_lag(corr_lag, corr_max_lag, panel));
        m = kind == CorrelationKind::var_conditional ? var_conditional_correlation(model)
                                                      : var_partial_correlation(model);
      } else {
        m = static_correlation(panel, kind);
      }
      if (corr_format == "json") {
        emit(corr_in.output, dump(to_json(m, corr_upper)));
      } else {
        std::ostringstream out;
        write_csv(out, m, corr_upper);
        emit(corr_in.output, out.str());
      }
    } else if (*static_cmd) {
      const auto panel = static_in.load();
      const auto model = fit_var(panel, resolve_lag(static_lag, static_max_lag, panel));
      warn_if_unstable(model);
      const auto fevd = cholesky_order.empty() ? gfevd(model, static_horizon)
                                               : cholesky_fevd(model, static_horizon, cholesky_order);
      std::ostringstream out;
      if (static_format == "fevd") {
        write_fevd_csv(out, fevd);
      } else {
        const auto report = connectedness_report(fevd, static_raw ? NpdcSign::literal : NpdcSign::dominance);
        if (static_format == "json")
          out << dump(to_json(report));
        else
          write_report_table(out, report);
      }
      emit(static_in.output, out.str());
    } else if (*dyn_cmd) {
      const auto panel = dyn_in.load();
      const int lag = resolve_lag(dyn_lag, dyn_max_lag, panel);
      FevdSeries series;
      if (dyn_window) {
        series = rolling_var_fevd(panel, *dyn_window, lag, dyn_horizon, dyn_threads);
      } else {
        tvp.lag = lag;
        const auto trajectory = tvp_filter(panel, tvp);
        if (!dyn_trajectory.empty()) {
          std::ostringstream traj;
          write_trajectory_csv(traj, trajectory);
          emit(dyn_trajectory, traj.str());
        }
        series = trajectory_fevd(trajectory, dyn_horizon, dyn_threads);
      }
      const auto dynamic = dynamic_report(series, dyn_raw ? NpdcSign::literal : NpdcSign::dominance, dyn_threads);
      std::ostringstream out;
      if (!dyn_pair.empty()) {
        write_pair_csv(out, dynamic, dyn_pair[0], dyn_pair[1], parse_pair_measure(dyn_measure));
      } else if (dyn_net) {
        write_net_csv(out, dynamic);
      } else if (dyn_tci) {
        out << "date,tci\n";
        const auto tci = dynamic.tci_series();
        for (std::size_t t = 0; t < tci.size(); ++t)
          out << format_date(dynamic.dates[t]) << ',' << format_double(tci[t]) << '\n';
      } else if (dyn_format == "json") {
        out << dump(to_json(dynamic));
      } else {
        write_dynamic_long_csv(out, dynamic);
      }
      emit(dyn_in.output, out.str());
    } else if (*net_cmd) {
      const NpdcSign sign = net_raw ? NpdcSign::literal : NpdcSign::dominance;
      FevdTable fevd;
      if (!net_fevd.empty()) {
        std::ifstream in(net_fevd);
        if (!in) throw DataError("cannot open '" + net_fevd + "'");
        fevd = read_fevd_csv(in, net_fevd);
      } else if (!net_in.path.empty()) {
        const auto panel = net_in.load();
        const auto model = fit_var(panel, resolve_lag(net_lag, net_max_lag, panel));
        warn_if_unstable(model);
        fevd = gfevd(model, net_horizon);
      } else {
        throw ParameterError("export-net needs --fevd or --input");
      }
      emit(net_in.output, export_network(connectedness_report(fevd, sign), net_threshold));
    } else if (*run_cmd) {
      const auto result = run_pipeline(load_pipeline_config(config_path));
      std::cout << result.artifact_dir.string() << '\n';
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    if (app.get_subcommands().empty())
      std::cerr << app.help();
    else
      std::cerr << app.get_subcommands().front()->help();
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

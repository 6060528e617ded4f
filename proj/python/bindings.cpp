#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

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

namespace py = pybind11;
using namespace spillover;

namespace {

std::vector<std::string> date_strings(const std::vector<Date>& dates) {
  std::vector<std::string> out;
  out.reserve(dates.size());
  for (const auto& d : dates) out.push_back(format_date(d));
  return out;
}

std::vector<Date> parse_dates(const std::vector<std::string>& text) {
  std::vector<Date> out;
  out.reserve(text.size());
  for (const auto& t : text) out.push_back(parse_date(t));
  return out;
}

std::span<const double> as_span(const Eigen::VectorXd& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

std::optional<Eigen::Index> to_index(std::optional<long long> v) {
  if (!v) return std::nullopt;
  return static_cast<Eigen::Index>(*v);
}

NpdcSign parse_sign(const std::string& s) {
  if (s == "dominance") return NpdcSign::dominance;
  if (s == "literal") return NpdcSign::literal;
  throw ParameterError("npdc sign must be 'dominance' or 'literal'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the spillover package";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

  py::class_<PanelSeries>(m, "Panel")
      .def(py::init([](std::vector<std::string> names, const std::vector<std::string>& dates, Eigen::MatrixXd values) {
             PanelSeries p{std::move(names), parse_dates(dates), std::move(values)};
             p.validate();
             return p;
           }),
           py::arg("names"), py::arg("dates"), py::arg("values"))
      .def_readonly("names", &PanelSeries::names)
      .def_property_readonly("dates", [](const PanelSeries& p) { return date_strings(p.dates); })
      .def_readonly("values", &PanelSeries::values)
      .def("column", [](const PanelSeries& p, const std::string& name) -> Eigen::VectorXd {
        return p.values.col(p.column(name));
      })
      .def("select", [](const PanelSeries& p, const std::vector<std::string>& cols) { return p.select(cols); })
      .def("slice", &PanelSeries::slice, py::arg("first"), py::arg("count"))
      .def("__len__", [](const PanelSeries& p) { return p.rows(); })
      .def("__eq__", [](const PanelSeries& a, const PanelSeries& b) { return a == b; })
      .def("__repr__", [](const PanelSeries& p) {
        return "<Panel " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + ">";
      });

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const std::string& date_column, std::vector<std::string> columns,
         const std::string& delimiter, const std::string& date_format) {
        if (delimiter.size() != 1) throw ParameterError("delimiter must be a single character");
        return load_csv(path, CsvOptions{date_column, std::move(columns), delimiter[0], date_format});
      },
      py::arg("path"), py::arg("date_column") = "date", py::arg("columns") = std::vector<std::string>{},
      py::arg("delimiter") = ",", py::arg("date_format") = "%Y-%m-%d");
  m.def("align", [](const std::vector<PanelSeries>& panels) { return align(panels); }, py::arg("panels"));
  m.def("cumulative_return", &cumulative_return, py::arg("prices"));
  m.def("first_difference", &first_difference, py::arg("panel"));

  py::class_<DescriptiveStats>(m, "DescriptiveStats")
      .def_readonly("name", &DescriptiveStats::name)
      .def_readonly("mean", &DescriptiveStats::mean)
      .def_readonly("median", &DescriptiveStats::median)
      .def_readonly("sd", &DescriptiveStats::sd)
      .def_readonly("skewness", &DescriptiveStats::skewness)
      .def_readonly("excess_kurtosis", &DescriptiveStats::excess_kurtosis)
      .def_readonly("q1", &DescriptiveStats::q1)
      .def_readonly("q3", &DescriptiveStats::q3);

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("test", &TestResult::test)
      .def_readonly("statistic", &TestResult::statistic)
      .def_readonly("p_value", &TestResult::p_value)
      .def_readonly("p_value_bound", &TestResult::p_value_bound)
      .def_readonly("lags", &TestResult::lags)
      .def_readonly("level", &TestResult::level)
      .def_readonly("reject", &TestResult::reject)
      .def_readonly("critical_value", &TestResult::critical_value)
      .def("to_json", [](const TestResult& r, bool stars) { return to_json(r, stars).dump(); },
           py::arg("stars") = false)
      .def("__repr__", [](const TestResult& r) {
        return "<TestResult " + r.test + " stat=" + format_double(r.statistic) + " p=" + format_double(r.p_value) +
               ">";
      });

  m.def("describe", [](const Eigen::VectorXd& x, const std::string& name) { return describe(as_span(x), name); },
        py::arg("x"), py::arg("name") = "");
  m.def("jarque_bera", [](const Eigen::VectorXd& x, double level) { return jarque_bera(as_span(x), level); },
        py::arg("x"), py::arg("level") = 0.05);
  m.def(
      "ljung_box_squared",
      [](const Eigen::VectorXd& x, int lags, double level) { return ljung_box_squared(as_span(x), lags, level); },
      py::arg("x"), py::arg("lags") = 20, py::arg("level") = 0.05);
  m.def(
      "adf_test",
      [](const Eigen::VectorXd& x, std::optional<int> max_lags, const std::string& det, double level) {
        return adf_test(as_span(x), max_lags, parse_deterministic(det), level);
      },
      py::arg("x"), py::arg("max_lags") = py::none(), py::arg("deterministic") = "c", py::arg("level") = 0.05);
  m.def(
      "engle_granger",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& det, std::optional<int> max_lags,
         double level) { return engle_granger(as_span(x), as_span(y), parse_deterministic(det), max_lags, level); },
      py::arg("x"), py::arg("y"), py::arg("deterministic") = "c", py::arg("max_lags") = py::none(),
      py::arg("level") = 0.05);
  m.def(
      "chow_test",
      [](const PanelSeries& panel, int lag, std::optional<long long> break_index, const std::string& variant,
         int reps, std::uint64_t seed, int threads, double level) {
        ChowOptions o;
        o.lag = lag;
        o.break_index = to_index(break_index).value_or(panel.rows() / 2);
        o.variant = parse_chow_variant(variant);
        o.bootstrap_reps = reps;
        o.seed = seed;
        o.threads = threads;
        o.level = level;
        return chow_test(panel, o);
      },
      py::arg("panel"), py::arg("lag") = 1, py::arg("break_index") = py::none(), py::arg("variant") = "break-point",
      py::arg("reps") = 399, py::arg("seed") = 1, py::arg("threads") = 1, py::arg("level") = 0.05);

  py::class_<VarModel>(m, "VarModel")
      .def_readonly("names", &VarModel::names)
      .def_readonly("lag", &VarModel::lag)
      .def_readonly("intercept", &VarModel::intercept)
      .def_readonly("coeffs", &VarModel::coeffs)
      .def_readonly("sigma", &VarModel::sigma)
      .def_readonly("residuals", &VarModel::residuals)
      .def("spectral_radius", &spectral_radius);
  m.def("fit_var", py::overload_cast<const PanelSeries&, int, bool>(&fit_var), py::arg("panel"), py::arg("lag"),
        py::arg("intercept") = true);
  m.def(
      "select_lag",
      [](const PanelSeries& panel, int p_max, const std::string& criterion) {
        if (criterion != "bic" && criterion != "aic") throw ParameterError("criterion must be 'bic' or 'aic'");
        return select_lag(panel, p_max, criterion == "bic" ? LagCriterion::bic : LagCriterion::aic);
      },
      py::arg("panel"), py::arg("p_max") = 4, py::arg("criterion") = "bic");

  m.def(
      "correlation",
      [](const PanelSeries& panel, const std::string& kind_text, int lag) -> Eigen::MatrixXd {
        const auto kind = parse_correlation_kind(kind_text);
        if (kind == CorrelationKind::var_conditional) return var_conditional_correlation(fit_var(panel, lag)).values;
        if (kind == CorrelationKind::var_partial) return var_partial_correlation(fit_var(panel, lag)).values;
        return static_correlation(panel, kind).values;
      },
      py::arg("panel"), py::arg("kind") = "pearson", py::arg("lag") = 1);

  py::class_<FevdTable>(m, "FevdTable")
      .def_readonly("names", &FevdTable::names)
      .def_readonly("horizon", &FevdTable::horizon)
      .def_readonly("raw", &FevdTable::raw)
      .def_readonly("shares", &FevdTable::shares);
  m.def("gfevd", py::overload_cast<const VarModel&, int>(&gfevd), py::arg("model"), py::arg("horizon") = 10);
  m.def(
      "cholesky_fevd",
      [](const VarModel& model, int horizon, const std::vector<std::string>& order) {
        return cholesky_fevd(model, horizon, order);
      },
      py::arg("model"), py::arg("horizon"), py::arg("order"));
  m.def(
      "fevd_from_shares",
      [](std::vector<std::string> names, Eigen::MatrixXd shares, int horizon) {
        return fevd_from_shares(std::move(names), std::move(shares), horizon);
      },
      py::arg("names"), py::arg("shares"), py::arg("horizon") = 0);

  py::class_<ConnectednessReport>(m, "ConnectednessReport")
      .def_readonly("names", &ConnectednessReport::names)
      .def_readonly("shares", &ConnectednessReport::shares)
      .def_readonly("receiver", &ConnectednessReport::receiver)
      .def_readonly("giver", &ConnectednessReport::giver)
      .def_readonly("inc_own", &ConnectednessReport::inc_own)
      .def_readonly("net", &ConnectednessReport::net)
      .def_readonly("npt", &ConnectednessReport::npt)
      .def_readonly("tci", &ConnectednessReport::tci)
      .def_readonly("npdc", &ConnectednessReport::npdc)
      .def_readonly("pci", &ConnectednessReport::pci)
      .def_readonly("pii", &ConnectednessReport::pii)
      .def("table", [](const ConnectednessReport& r) {
        std::ostringstream out;
        write_report_table(out, r);
        return out.str();
      });
  m.def(
      "connectedness",
      [](const FevdTable& fevd, const std::string& sign) { return connectedness_report(fevd, parse_sign(sign)); },
      py::arg("fevd"), py::arg("npdc_sign") = "dominance");
  m.def("export_network", &export_network, py::arg("report"), py::arg("threshold") = 0.0);

  py::class_<TvpTrajectory>(m, "TvpTrajectory")
      .def_readonly("names", &TvpTrajectory::names)
      .def_property_readonly("dates", [](const TvpTrajectory& t) { return date_strings(t.dates); })
      .def_readonly("coeffs", &TvpTrajectory::coeffs)
      .def_readonly("covariances", &TvpTrajectory::covariances)
      .def("__len__", &TvpTrajectory::size);
  m.def(
      "tvp_filter",
      [](const PanelSeries& panel, int lag, double kappa1, double kappa2, double prior_scale,
         std::optional<int> burn_in) { return tvp_filter(panel, TvpConfig{lag, kappa1, kappa2, prior_scale, burn_in}); },
      py::arg("panel"), py::arg("lag") = 1, py::arg("kappa1") = 0.99, py::arg("kappa2") = 0.99,
      py::arg("prior_scale") = 1.0, py::arg("burn_in") = py::none());

  py::class_<DynamicConnectedness>(m, "DynamicConnectedness")
      .def_property_readonly("dates", [](const DynamicConnectedness& d) { return date_strings(d.dates); })
      .def_readonly("reports", &DynamicConnectedness::reports)
      .def("tci", &DynamicConnectedness::tci_series)
      .def("net", &DynamicConnectedness::net_series, py::arg("name"))
      .def(
          "pair",
          [](const DynamicConnectedness& d, const std::string& a, const std::string& b, const std::string& measure) {
            return d.pair_series(a, b, parse_pair_measure(measure));
          },
          py::arg("a"), py::arg("b"), py::arg("measure") = "npdc")
      .def("__len__", [](const DynamicConnectedness& d) { return d.dates.size(); });
  m.def(
      "dynamic_connectedness",
      [](const PanelSeries& panel, int lag, int horizon, double kappa1, double kappa2, double prior_scale,
         std::optional<int> burn_in, std::optional<int> window, int threads, const std::string& sign) {
        py::gil_scoped_release release;
        const FevdSeries series =
            window ? rolling_var_fevd(panel, *window, lag, horizon, threads)
                   : trajectory_fevd(tvp_filter(panel, TvpConfig{lag, kappa1, kappa2, prior_scale, burn_in}),
                                     horizon, threads);
        return dynamic_report(series, parse_sign(sign), threads);
      },
      py::arg("panel"), py::arg("lag") = 1, py::arg("horizon") = 10, py::arg("kappa1") = 0.99,
      py::arg("kappa2") = 0.99, py::arg("prior_scale") = 1.0, py::arg("burn_in") = py::none(),
      py::arg("window") = py::none(), py::arg("threads") = 1, py::arg("npdc_sign") = "dominance");

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config_path, std::optional<int> threads) {
        auto config = load_pipeline_config(config_path);
        if (threads) config.threads = *threads;
        const auto result = run_pipeline(config);
        py::dict out;
        out["artifact_dir"] = result.artifact_dir;
        out["config_hash"] = result.config_hash;
        out["manifest"] = result.manifest.dump();
        return out;
      },
      py::arg("config"), py::arg("threads") = py::none());
}

#include "spillover/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "spillover/correlation.hpp"
#include "spillover/var.hpp"

namespace spillover {

namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("input file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a(ss.str()));
}

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!object.is_object()) throw ParameterError("config: '" + std::string(where) + "' must be an object");
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ParameterError("config: unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
void read_if(const json& object, const char* key, T& target) {
  if (object.contains(key) && !object.at(key).is_null()) target = object.at(key).get<T>();
}

template <class T>
void read_optional(const json& object, const char* key, std::optional<T>& target) {
  if (object.contains(key) && !object.at(key).is_null()) target = object.at(key).get<T>();
}

}  // namespace

PipelineConfig parse_pipeline_config(const json& doc, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  try {
    reject_unknown_keys(doc, {"inputs", "transforms", "difference", "var", "tvp", "tests", "network", "output", "seed", "threads"},
                        "top level");
    if (!doc.contains("inputs") || !doc.at("inputs").is_array() || doc.at("inputs").empty())
      throw ParameterError("config: 'inputs' must be a nonempty array");
    for (const auto& in : doc.at("inputs")) {
      reject_unknown_keys(in, {"path", "date_column", "columns", "delimiter", "date_format"}, "inputs[]");
      PipelineInput input;
      std::filesystem::path p = in.at("path").get<std::string>();
      input.path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).lexically_normal();
      read_if(in, "date_column", input.csv.date_column);
      read_if(in, "columns", input.csv.columns);
      read_if(in, "date_format", input.csv.date_format);
      if (in.contains("delimiter")) {
        const auto d = in.at("delimiter").get<std::string>();
        if (d.size() != 1) throw ParameterError("config: delimiter must be a single character");
        input.csv.delimiter = d[0];
      }
      if (!std::filesystem::exists(input.path)) throw DataError("input file not found: " + input.path.string());
      c.inputs.push_back(std::move(input));
    }
    if (doc.contains("transforms")) {
      const auto& t = doc.at("transforms");
      reject_unknown_keys(t, {"default", "columns"}, "transforms");
      if (t.contains("default")) c.default_transform = parse_transform_kind(t.at("default").get<std::string>());
      if (t.contains("columns"))
        for (const auto& [name, kind] : t.at("columns").items())
          c.column_transforms.emplace_back(name, parse_transform_kind(kind.get<std::string>()));
    }
    read_if(doc, "difference", c.difference);
    if (doc.contains("var")) {
      const auto& v = doc.at("var");
      reject_unknown_keys(v, {"lag", "max_lag", "horizon", "npdc_sign"}, "var");
      if (v.contains("lag")) {
        if (v.at("lag").is_string()) {
          if (v.at("lag").get<std::string>() != "bic") throw ParameterError("config: var.lag must be an integer or \"bic\"");
        } else {
          c.lag = v.at("lag").get<int>();
        }
      }
      read_if(v, "max_lag", c.max_lag);
      read_if(v, "horizon", c.horizon);
      if (v.contains("npdc_sign")) {
        const auto s = v.at("npdc_sign").get<std::string>();
        if (s != "dominance" && s != "literal") throw ParameterError("config: var.npdc_sign must be dominance or literal");
        c.npdc_sign = s == "dominance" ? NpdcSign::dominance : NpdcSign::literal;
      }
    }
    if (doc.contains("tvp")) {
      const auto& t = doc.at("tvp");
      reject_unknown_keys(t, {"kappa1", "kappa2", "prior_scale", "burn_in", "rolling_window"}, "tvp");
      read_if(t, "kappa1", c.tvp.kappa1);
      read_if(t, "kappa2", c.tvp.kappa2);
      read_if(t, "prior_scale", c.tvp.prior_scale);
      read_optional(t, "burn_in", c.tvp.burn_in);
      read_optional(t, "rolling_window", c.rolling_window);
    }
    if (doc.contains("tests")) {
      const auto& t = doc.at("tests");
      reject_unknown_keys(t, {"adf_max_lags", "deterministic", "ljung_box_lags", "level", "chow"}, "tests");
      read_optional(t, "adf_max_lags", c.adf_max_lags);
      if (t.contains("deterministic")) c.deterministic = parse_deterministic(t.at("deterministic").get<std::string>());
      read_if(t, "ljung_box_lags", c.ljung_box_lags);
      read_if(t, "level", c.level);
      if (t.contains("chow")) {
        const auto& ch = t.at("chow");
        reject_unknown_keys(ch, {"break_index", "bootstrap_reps"}, "tests.chow");
        std::optional<long long> b;
        read_optional(ch, "break_index", b);
        if (b) c.chow_break_index = static_cast<Eigen::Index>(*b);
        read_if(ch, "bootstrap_reps", c.chow_bootstrap_reps);
      }
    }
    if (doc.contains("network")) {
      reject_unknown_keys(doc.at("network"), {"threshold"}, "network");
      read_if(doc.at("network"), "threshold", c.network_threshold);
    }
    if (doc.contains("output")) {
      const auto& o = doc.at("output");
      reject_unknown_keys(o, {"directory", "timings"}, "output");
      if (o.contains("directory")) {
        std::filesystem::path d = o.at("directory").get<std::string>();
        c.output_directory = (d.is_relative() && !base_dir.empty() ? base_dir / d : d).lexically_normal();
      }
      read_if(o, "timings", c.record_timings);
    }
    read_if(doc, "seed", c.seed);
    read_if(doc, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }

  if (c.lag && *c.lag < 1) throw ParameterError("config: var.lag must be at least 1");
  if (c.max_lag < 1) throw ParameterError("config: var.max_lag must be at least 1");
  if (c.horizon < 1) throw ParameterError("config: var.horizon must be at least 1");
  if (!(c.level > 0.0 && c.level < 1.0)) throw ParameterError("config: tests.level must lie in (0, 1)");
  if (c.chow_bootstrap_reps < 99) throw ParameterError("config: tests.chow.bootstrap_reps must be at least 99");
  if (c.ljung_box_lags < 1) throw ParameterError("config: tests.ljung_box_lags must be at least 1");
  if (!(c.network_threshold >= 0.0)) throw ParameterError("config: network.threshold must be nonnegative");
  if (c.threads < 1) throw ParameterError("config: threads must be at least 1");
  if (!(c.tvp.kappa1 > 0.9 && c.tvp.kappa1 <= 1.0) || !(c.tvp.kappa2 > 0.9 && c.tvp.kappa2 <= 1.0))
    throw ParameterError("config: tvp.kappa1 and tvp.kappa2 must lie in (0.9, 1]");
  if (!(c.tvp.prior_scale >= 0.0)) throw ParameterError("config: tvp.prior_scale must be nonnegative");
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParameterError("config: " + path.string() + ": " + e.what());
  }
  return parse_pipeline_config(doc, path.parent_path());
}

json canonical_config(const PipelineConfig& c) {
  json inputs = json::array();
  for (const auto& in : c.inputs)
    inputs.push_back(json{{"file", in.path.filename().generic_string()},
                          {"digest", file_digest(in.path)},
                          {"date_column", in.csv.date_column},
                          {"columns", in.csv.columns},
                          {"delimiter", std::string(1, in.csv.delimiter)},
                          {"date_format", in.csv.date_format}});
  json columns = json::object();
  for (const auto& [name, kind] : c.column_transforms) columns[name] = to_string(kind);
  return json{
      {"inputs", inputs},
      {"transforms", {{"default", to_string(c.default_transform)}, {"columns", columns}}},
      {"difference", c.difference},
      {"var",
       {{"lag", c.lag ? json(*c.lag) : json("bic")},
        {"max_lag", c.max_lag},
        {"horizon", c.horizon},
        {"npdc_sign", c.npdc_sign == NpdcSign::dominance ? "dominance" : "literal"}}},
      {"tvp",
       {{"kappa1", c.tvp.kappa1},
        {"kappa2", c.tvp.kappa2},
        {"prior_scale", c.tvp.prior_scale},
        {"burn_in", c.tvp.burn_in ? json(*c.tvp.burn_in) : json()},
        {"rolling_window", c.rolling_window ? json(*c.rolling_window) : json()}}},
      {"tests",
       {{"adf_max_lags", c.adf_max_lags ? json(*c.adf_max_lags) : json()},
        {"deterministic", to_string(c.deterministic)},
        {"ljung_box_lags", c.ljung_box_lags},
        {"level", c.level},
        {"chow",
         {{"break_index", c.chow_break_index ? json(*c.chow_break_index) : json()},
          {"bootstrap_reps", c.chow_bootstrap_reps}}}}},
      {"network", {{"threshold", c.network_threshold}}},
      {"seed", c.seed}};
}

std::string config_hash(const PipelineConfig& config) { return hex64(fnv1a(canonical_config(config).dump())); }

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

std::span<const double> column_span(const Eigen::MatrixXd& m, Eigen::Index j, Eigen::VectorXd& storage) {
  storage = m.col(j);
  return {storage.data(), static_cast<std::size_t>(storage.size())};
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  result.config_hash = config_hash(config);
  result.artifact_dir = config.output_directory / result.config_hash;
  std::filesystem::create_directories(result.artifact_dir);
  result.manifest = json{{"config_hash", result.config_hash}, {"stages", json::array()}};
  const auto& dir = result.artifact_dir;

  auto stage = [&](const std::string& name, const std::function<std::vector<std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> artifacts;
    try {
      artifacts = body();
    } catch (const NumericalError& e) {
      throw StageError(name, e.what(), 3);
    } catch (const ParameterError& e) {
      throw StageError(name, e.what(), 1);
    } catch (const std::exception& e) {
      throw StageError(name, e.what(), 2);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.manifest["stages"].push_back(
        json{{"name", name}, {"artifacts", artifacts}, {"seconds", config.record_timings ? json(seconds) : json()}});
    write_text(dir / "manifest.json", result.manifest.dump(2) + "\n");
  };

  PanelSeries levels, analysis;
  stage("ingest", [&] {
    std::vector<PanelSeries> panels;
    for (const auto& in : config.inputs) panels.push_back(load_csv(in.path, in.csv));
    PanelSeries merged = align(panels);
    TransformSpec spec = TransformSpec::uniform(merged.names, config.default_transform);
    for (const auto& [name, kind] : config.column_transforms) {
      merged.column(name);
      for (auto& [n, k] : spec.assignments)
        if (n == name) k = kind;
    }
    levels = apply_transforms(merged, spec);
    analysis = config.difference ? first_difference(levels) : levels;
    std::ostringstream out;
    write_csv(out, analysis);
    write_text(dir / "panel.csv", out.str());
    return std::vector<std::string>{"panel.csv"};
  });

  stage("diagnostics", [&] {
    std::ostringstream desc;
    desc << "variable,mean,median,sd,skewness,excess_kurtosis,q1,q3,jarque_bera,jarque_bera_p,q2_lags,q2,q2_p\n";
    Eigen::VectorXd buf;
    for (Eigen::Index j = 0; j < analysis.cols(); ++j) {
      const auto& name = analysis.names[static_cast<std::size_t>(j)];
      auto x = column_span(analysis.values, j, buf);
      const auto d = describe(x, name);
      const auto jb = jarque_bera(x, config.level);
      const auto lb = ljung_box_squared(x, config.ljung_box_lags, config.level);
      desc << name << ',' << format_double(d.mean) << ',' << format_double(d.median) << ',' << format_double(d.sd)
           << ',' << format_double(d.skewness) << ',' << format_double(d.excess_kurtosis) << ','
           << format_double(d.q1) << ',' << format_double(d.q3) << ',' << format_double(jb.statistic) << ','
           << format_double(jb.p_value) << ',' << config.ljung_box_lags << ',' << format_double(lb.statistic) << ','
           << format_double(lb.p_value) << '\n';
    }
    write_text(dir / "descriptive.csv", desc.str());

    std::ostringstream adf;
    adf << "variable,level_statistic,level_p_value,level_lags,difference_statistic,difference_p_value,difference_lags\n";
    const PanelSeries diffs = first_difference(levels);
    Eigen::VectorXd buf2;
    for (Eigen::Index j = 0; j < levels.cols(); ++j) {
      const auto a = adf_test(column_span(levels.values, j, buf), config.adf_max_lags, config.deterministic, config.level);
      const auto b = adf_test(column_span(diffs.values, j, buf2), config.adf_max_lags, config.deterministic, config.level);
      adf << levels.names[static_cast<std::size_t>(j)] << ',' << format_double(a.statistic) << ','
          << format_double(a.p_value) << ',' << *a.lags << ',' << format_double(b.statistic) << ','
          << format_double(b.p_value) << ',' << *b.lags << '\n';
    }
    write_text(dir / "adf.csv", adf.str());
    return std::vector<std::string>{"descriptive.csv", "adf.csv"};
  });

  int lag = 1;
  stage("correlation", [&] {
    lag = config.lag ? *config.lag : select_lag(analysis, config.max_lag, LagCriterion::bic);
    const VarModel model = fit_var(analysis, lag, true);
    json doc{{"lag", lag}};
    for (auto kind : {CorrelationKind::pearson, CorrelationKind::spearman, CorrelationKind::kendall})
      doc[std::string(to_string(kind))] = to_json(static_correlation(analysis, kind));
    doc["var-conditional"] = to_json(var_conditional_correlation(model));
    doc["var-partial"] = to_json(var_partial_correlation(model));
    write_text(dir / "correlation.json", doc.dump(2) + "\n");
    return std::vector<std::string>{"correlation.json"};
  });

  stage("cointegration", [&] {
    std::ostringstream out;
    out << "regressand,regressor,statistic,p_value,lags,decision,stars\n";
    Eigen::VectorXd a, b;
    const Eigen::Index N = levels.cols();
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) {
        if (i == j) continue;
        const auto r = engle_granger(column_span(levels.values, i, a), column_span(levels.values, j, b),
                                     config.deterministic, config.adf_max_lags, config.level);
        out << levels.names[static_cast<std::size_t>(i)] << ',' << levels.names[static_cast<std::size_t>(j)] << ','
            << format_double(r.statistic) << ',' << format_double(r.p_value) << ',' << *r.lags << ','
            << (r.reject ? "reject" : "fail-to-reject") << ',' << significance_stars(r.p_value) << '\n';
      }
    write_text(dir / "cointegration.csv", out.str());
    return std::vector<std::string>{"cointegration.csv"};
  });

  stage("chow", [&] {
    ChowOptions opt;
    opt.lag = lag;
    opt.break_index = config.chow_break_index.value_or(analysis.rows() / 2);
    opt.bootstrap_reps = config.chow_bootstrap_reps;
    opt.seed = config.seed;
    opt.level = config.level;
    opt.threads = config.threads;
    if (opt.break_index <= 0 || opt.break_index >= analysis.rows()) throw ParameterError("break outside sample");
    json doc{{"lag", lag},
             {"break_index", opt.break_index},
             {"break_date", format_date(analysis.dates[static_cast<std::size_t>(opt.break_index)])},
             {"tests", json::array()}};
    for (auto variant : {ChowVariant::break_point, ChowVariant::sample_split}) {
      opt.variant = variant;
      doc["tests"].push_back(to_json(chow_test(analysis, opt), true));
    }
    write_text(dir / "chow.json", doc.dump(2) + "\n");
    return std::vector<std::string>{"chow.json"};
  });

  stage("static-connectedness", [&] {
    const VarModel model = fit_var(analysis, lag, true);
    const auto report = connectedness_report(gfevd(model, config.horizon), config.npdc_sign);
    std::ostringstream out;
    write_report_table(out, report);
    write_text(dir / "static_connectedness.csv", out.str());
    return std::vector<std::string>{"static_connectedness.csv"};
  });

  DynamicConnectedness dynamic;
  FevdSeries fevds;
  stage("dynamic-connectedness", [&] {
    if (config.rolling_window) {
      fevds = rolling_var_fevd(analysis, *config.rolling_window, lag, config.horizon, config.threads);
    } else {
      TvpConfig tvp = config.tvp;
      tvp.lag = lag;
      fevds = trajectory_fevd(tvp_filter(analysis, tvp), config.horizon, config.threads);
    }
    dynamic = dynamic_report(fevds, config.npdc_sign, config.threads);
    std::ostringstream out;
    write_dynamic_long_csv(out, dynamic);
    write_text(dir / "dynamic_connectedness.csv", out.str());
    return std::vector<std::string>{"dynamic_connectedness.csv"};
  });

  stage("network", [&] {
    Eigen::MatrixXd mean_shares = Eigen::MatrixXd::Zero(fevds.tables.front().dim(), fevds.tables.front().dim());
    for (const auto& t : fevds.tables) mean_shares += t.shares;
    mean_shares /= static_cast<double>(fevds.tables.size());
    const auto averaged = fevd_from_shares(analysis.names, mean_shares, config.horizon, 1e-8);
    write_text(dir / "network.dot",
               export_network(connectedness_report(averaged, config.npdc_sign), config.network_threshold));
    return std::vector<std::string>{"network.dot"};
  });

  return result;
}

}  // namespace spillover

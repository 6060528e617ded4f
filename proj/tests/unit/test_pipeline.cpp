#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "spillover/error.hpp"
#include "spillover/pipeline.hpp"

using namespace spillover;
namespace fs = std::filesystem;

namespace {

json base_config(const fs::path& out) {
  return json{{"inputs", json::array({json{{"path", "synthetic3.csv"}}})},
              {"transforms", json{{"default", "cumulative-return"}}},
              {"difference", true},
              {"var", json{{"lag", "bic"}, {"max_lag", 3}, {"horizon", 10}}},
              {"tests", json{{"chow", json{{"bootstrap_reps", 99}}}}},
              {"output", json{{"directory", out.string()}}},
              {"seed", 7},
              {"threads", 1}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(SPILLOVER_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::vector<std::string> k_artifacts{"panel.csv",
                                           "descriptive.csv",
                                           "adf.csv",
                                           "correlation.json",
                                           "cointegration.csv",
                                           "chow.json",
                                           "static_connectedness.csv",
                                           "dynamic_connectedness.csv",
                                           "network.dot"};

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("end-to-end run writes every artifact and a manifest") {
    const auto out = fresh_dir("pipeline_full");
    const auto cfg = parse_pipeline_config(base_config(out), SPILLOVER_DATA_DIR);
    const auto result = run_pipeline(cfg);
    CHECK(result.artifact_dir == out / result.config_hash);
    CHECK(result.config_hash.size() == 16);
    for (const auto& a : k_artifacts) {
      CAPTURE(a);
      CHECK(fs::file_size(result.artifact_dir / a) > 0);
    }
    const auto manifest = json::parse(slurp(result.artifact_dir / "manifest.json"));
    CHECK(manifest.at("config_hash") == result.config_hash);
    CHECK(manifest.at("stages").size() == 8);
    CHECK(manifest.at("stages")[0].at("name") == "ingest");
    CHECK(manifest.at("stages")[0].at("seconds").is_null());
    CHECK(manifest == result.manifest);
    CHECK(slurp(result.artifact_dir / "network.dot").rfind("digraph", 0) == 0);
    CHECK(slurp(result.artifact_dir / "static_connectedness.csv").find("TCI") != std::string::npos);
  }

  TEST_CASE("reruns and thread counts give identical bytes") {
    const auto out = fresh_dir("pipeline_repeat");
    auto doc = base_config(out);
    const auto first = run_pipeline(parse_pipeline_config(doc, SPILLOVER_DATA_DIR));
    std::map<std::string, std::string> bytes;
    for (const auto& a : k_artifacts) bytes[a] = slurp(first.artifact_dir / a);
    const auto manifest = slurp(first.artifact_dir / "manifest.json");

    const auto second = run_pipeline(parse_pipeline_config(doc, SPILLOVER_DATA_DIR));
    CHECK(second.config_hash == first.config_hash);
    for (const auto& a : k_artifacts) CHECK(slurp(second.artifact_dir / a) == bytes[a]);
    CHECK(slurp(second.artifact_dir / "manifest.json") == manifest);

    doc["threads"] = 4;
    const auto parallel = run_pipeline(parse_pipeline_config(doc, SPILLOVER_DATA_DIR));
    CHECK(parallel.config_hash == first.config_hash);
    for (const auto& a : k_artifacts) {
      CAPTURE(a);
      CHECK(slurp(parallel.artifact_dir / a) == bytes[a]);
    }
  }

  TEST_CASE("results-relevant settings change the hash") {
    const auto out = fresh_dir("pipeline_hash");
    auto doc = base_config(out);
    const auto h = config_hash(parse_pipeline_config(doc, SPILLOVER_DATA_DIR));
    doc["seed"] = 8;
    CHECK(config_hash(parse_pipeline_config(doc, SPILLOVER_DATA_DIR)) != h);
    doc["seed"] = 7;
    doc["output"]["timings"] = true;
    CHECK(config_hash(parse_pipeline_config(doc, SPILLOVER_DATA_DIR)) == h);
    doc["var"]["horizon"] = 12;
    CHECK(config_hash(parse_pipeline_config(doc, SPILLOVER_DATA_DIR)) != h);
  }

  TEST_CASE("rolling windows replace the filter when configured") {
    const auto out = fresh_dir("pipeline_rolling");
    auto doc = base_config(out);
    doc["var"]["lag"] = 1;
    doc["tvp"] = json{{"rolling_window", 200}};
    const auto result = run_pipeline(parse_pipeline_config(doc, SPILLOVER_DATA_DIR));
    const auto text = slurp(result.artifact_dir / "dynamic_connectedness.csv");
    // 749 differenced rows give 550 windows of 200.
    std::size_t tci_rows = 0;
    for (auto pos = text.find(",tci,"); pos != std::string::npos; pos = text.find(",tci,", pos + 1)) ++tci_rows;
    CHECK(tci_rows == 550);
  }

  TEST_CASE("missing input names the path") {
    auto doc = base_config(fresh_dir("pipeline_missing"));
    doc["inputs"][0]["path"] = "no_such_file.csv";
    CHECK_THROWS_WITH_AS(parse_pipeline_config(doc, SPILLOVER_DATA_DIR), doctest::Contains("no_such_file.csv"),
                         DataError);
  }

  TEST_CASE("config validation") {
    const auto out = fresh_dir("pipeline_invalid");
    auto doc = base_config(out);
    doc["colour"] = "blue";
    CHECK_THROWS_WITH_AS(parse_pipeline_config(doc, SPILLOVER_DATA_DIR), doctest::Contains("colour"), ParameterError);
    doc = base_config(out);
    doc["var"]["horizon"] = 0;
    CHECK_THROWS_AS(parse_pipeline_config(doc, SPILLOVER_DATA_DIR), ParameterError);
    doc = base_config(out);
    doc["var"]["npdc_sign"] = "sideways";
    CHECK_THROWS_AS(parse_pipeline_config(doc, SPILLOVER_DATA_DIR), ParameterError);
    doc = base_config(out);
    doc["inputs"] = json::array();
    CHECK_THROWS_AS(parse_pipeline_config(doc, SPILLOVER_DATA_DIR), ParameterError);
    doc = base_config(out);
    doc["tests"]["level"] = "five percent";
    CHECK_THROWS_AS(parse_pipeline_config(doc, SPILLOVER_DATA_DIR), ParameterError);
  }

  TEST_CASE("a failing stage reports its name and keeps earlier artifacts") {
    const auto out = fresh_dir("pipeline_stage_failure");
    auto doc = base_config(out);
    doc["tests"]["chow"]["break_index"] = 5;
    const auto cfg = parse_pipeline_config(doc, SPILLOVER_DATA_DIR);
    try {
      run_pipeline(cfg);
      FAIL("expected a stage failure");
    } catch (const StageError& e) {
      CHECK(e.stage() == "chow");
      CHECK(e.exit_code() == 2);
      const auto dir = out / config_hash(cfg);
      CHECK(fs::exists(dir / "cointegration.csv"));
      CHECK_FALSE(fs::exists(dir / "chow.json"));
      CHECK(json::parse(slurp(dir / "manifest.json")).at("stages").size() == 4);
    }
  }

  TEST_CASE("shipped example config loads") {
    const auto cfg = load_pipeline_config(fs::path(SPILLOVER_DATA_DIR) / "synthetic3.json");
    CHECK(cfg.inputs.size() == 1);
    CHECK(cfg.inputs[0].path == fs::path(SPILLOVER_DATA_DIR) / "synthetic3.csv");
    CHECK_FALSE(cfg.lag.has_value());
    CHECK(cfg.tvp.kappa1 == 0.99);
  }
}

#include "evidence/bench/bench.hpp"
#include "evidence/numkit/parallel.hpp"
#include "evidence/numkit/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace evidence::bench {

using nlohmann::ordered_json;

Summary summarize(const std::vector<Replication>& reps) {
  std::vector<double> values;
  for (const auto& r : reps) {
    if (r.estimate) values.push_back(r.estimate->log_ml);
  }
  Summary s;
  s.ok = values.size();
  if (values.empty()) return s;
  s.mean = numkit::mean(values);
  s.sd = values.size() > 1 ? numkit::stddev(values) : 0.0;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

bool any_failed(const std::vector<ScenarioResult>& results) {
  for (const auto& r : results) {
    for (const auto& rep : r.replications) {
      if (!rep.estimate) return true;
    }
  }
  return false;
}

std::string result_json_line(const ScenarioResult& r, const Replication& rep) {
  const Scenario& s = r.scenario;
  ordered_json j;
  j["scenario"] = s.id;
  j["replication"] = rep.index;
  j["model"] = s.model;
  j["dataset"] = s.dataset;
  j["estimator"] = s.estimator;
  j["seed"] = s.config.seed;
  j["table"] = s.table;
  j["row"] = s.row;
  j["column"] = s.column;
  j["group"] = s.group;
  if (s.model == "toy") j["toy"] = {{"y", s.y}, {"sigma0", s.sigma0}, {"sigma1", s.sigma1}};
  if (rep.estimate) {
    const auto& e = *rep.estimate;
    j["status"] = "ok";
    j["log_ml"] = e.log_ml;
    j["mc_se"] = e.mc_se ? ordered_json(*e.mc_se) : ordered_json(nullptr);
    j["iterations"] = e.n_iterations;
    ordered_json diag = ordered_json::object();
    for (const auto& [k, v] : e.diagnostics) diag[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    j["diagnostics"] = diag;
    ordered_json notes = ordered_json::object();
    for (const auto& [k, v] : e.notes) notes[k] = v;
    j["notes"] = notes;
  } else {
    j["status"] = "failed";
    j["error"] = rep.error;
  }
  return j.dump();
}

std::vector<ScenarioResult> run_suite(const Suite& suite, std::size_t jobs, const std::filesystem::path& out_dir) {
  // Resolve every reference before any work starts.
  std::vector<modelzoo::ModelSpec> models;
  models.reserve(suite.scenarios.size());
  std::vector<std::string> seen;
  for (const auto& s : suite.scenarios) {
    if (std::find(seen.begin(), seen.end(), s.id) != seen.end()) throw ReferenceError("duplicate scenario id '" + s.id + "'");
    seen.push_back(s.id);
    models.push_back(build_model(s, suite.data_dir));
  }

  struct Task {
    std::size_t scenario;
    std::size_t replication;
  };
  std::vector<Task> tasks;
  std::vector<ScenarioResult> results(suite.scenarios.size());
  for (std::size_t i = 0; i < suite.scenarios.size(); ++i) {
    results[i].scenario = suite.scenarios[i];
    results[i].scenario.config.jobs = 1;
    results[i].replications.resize(suite.scenarios[i].config.replications);
    for (std::size_t r = 0; r < suite.scenarios[i].config.replications; ++r) tasks.push_back({i, r});
  }

  std::vector<double> wall(tasks.size(), 0.0);
  numkit::parallel_for(tasks.size(), std::max<std::size_t>(1, jobs), [&](std::size_t t) {
    const auto [i, r] = tasks[t];
    Replication& rep = results[i].replications[r];
    rep.index = r;
    const Stopwatch clock;
    try {
      rep.estimate = run_estimator(results[i].scenario, models[i], r);
      check_estimate(*rep.estimate);
    } catch (const std::exception& e) {
      rep.estimate.reset();
      rep.error = e.what();
    }
    wall[t] = clock.seconds();
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) results[tasks[t].scenario].wall_time += wall[t];
  for (auto& r : results) r.summary = summarize(r.replications);

  std::filesystem::create_directories(out_dir);
  std::ofstream jsonl(out_dir / "results.jsonl", std::ios::binary);
  std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
  std::ofstream timings(out_dir / "timings.csv", std::ios::binary);
  if (!jsonl || !summary || !timings) throw Error("cannot write outputs into " + out_dir.string());
  summary << "scenario,model,estimator,replications,ok,mean,sd,min,max\n" << std::setprecision(17);
  timings << "scenario,replication,wall_time_s\n";
  std::size_t t = 0;
  for (const auto& r : results) {
    for (const auto& rep : r.replications) {
      jsonl << result_json_line(r, rep) << '\n';
      timings << r.scenario.id << ',' << rep.index << ',' << wall[t++] << '\n';
    }
    summary << r.scenario.id << ',' << r.scenario.model << ',' << r.scenario.estimator << ','
            << r.replications.size() << ',' << r.summary.ok << ',' << r.summary.mean << ',' << r.summary.sd << ','
            << r.summary.min << ',' << r.summary.max << '\n';
  }
  return results;
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ResultRow r;
      r.scenario = j.at("scenario").get<std::string>();
      r.replication = j.at("replication").get<std::size_t>();
      r.model = j.at("model").get<std::string>();
      r.estimator = j.at("estimator").get<std::string>();
      r.table = j.value("table", "");
      r.row = j.value("row", "");
      r.column = j.value("column", "");
      r.group = j.value("group", "");
      r.ok = j.at("status").get<std::string>() == "ok";
      if (r.ok) {
        r.log_ml = j.at("log_ml").get<double>();
        if (!j.at("mc_se").is_null()) r.mc_se = j.at("mc_se").get<double>();
        r.iterations = j.value("iterations", std::size_t{0});
      }
      if (j.contains("toy")) {
        r.y = j["toy"].at("y").get<double>();
        r.sigma0 = j["toy"].at("sigma0").get<double>();
        r.sigma1 = j["toy"].at("sigma1").get<double>();
      }
      rows.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace evidence::bench

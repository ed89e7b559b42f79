// evbench: run evidence scenario suites and render comparison tables.
#include "evidence/bench/bench.hpp"
#include "evidence/numkit/parallel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace evidence;

namespace {

int cmd_run(const fs::path& config, const fs::path& out, std::size_t jobs, std::optional<std::uint64_t> seed) {
  const bench::Suite suite = bench::load_suite(config, seed);
  const auto results = bench::run_suite(suite, jobs, out);
  int failures = 0;
  for (const auto& r : results) {
    for (const auto& rep : r.replications) {
      if (!rep.estimate) {
        ++failures;
        std::cerr << "evbench: " << r.scenario.id << " replication " << rep.index << " failed: " << rep.error << '\n';
      }
    }
    std::cout << std::left << std::setw(32) << r.scenario.id << ' ' << std::setw(16) << r.scenario.estimator
              << " mean " << std::fixed << std::setprecision(4) << r.summary.mean << "  sd " << r.summary.sd << "  ("
              << r.summary.ok << '/' << r.replications.size() << ")\n";
  }
  return failures == 0 ? 0 : 1;
}

int cmd_table(const std::string& layout, const fs::path& in) {
  const auto rows = bench::read_results(in / "results.jsonl");
  const auto table = bench::emit_table(rows, layout);
  std::cout << table.markdown;
  std::ofstream(in / (layout + ".csv"), std::ios::binary) << table.csv;
  std::ofstream(in / (layout + ".md"), std::ios::binary) << table.markdown;
  if (table.missing_cells > 0) {
    std::cerr << "evbench: " << table.missing_cells << " cell(s) missing from layout " << layout << '\n';
    return 1;
  }
  return 0;
}

// Prior weights from a CSV with header scenario,prior.
std::map<std::string, double> read_priors(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw bench::ReferenceError("cannot open prior file " + file.string());
  std::map<std::string, double> priors;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw bench::ReferenceError("prior file line without a comma: " + line);
    priors[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return priors;
}

int cmd_posteriors(const fs::path& in, const std::string& prior) {
  const auto rows = bench::read_results(in / "results.jsonl");
  std::map<std::string, double> weights;
  if (prior != "equal") weights = read_priors(prior);

  // mean log evidence per scenario, grouped
  std::map<std::string, std::vector<std::string>> groups;
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& r : rows) {
    if (r.group.empty() || !r.ok) continue;
    auto& g = groups[r.group];
    if (std::find(g.begin(), g.end(), r.scenario) == g.end()) g.push_back(r.scenario);
    sums[r.scenario].first += r.log_ml;
    sums[r.scenario].second += 1;
  }
  if (groups.empty()) {
    std::cerr << "evbench: no scenarios carry a group label\n";
    return 1;
  }
  std::cout << "| group | scenario | log_ml | prior | posterior |\n| --- | --- | ---: | ---: | ---: |\n";
  for (const auto& [name, members] : groups) {
    std::vector<double> logml, pri;
    for (const auto& s : members) {
      logml.push_back(sums[s].first / sums[s].second);
      if (prior == "equal") {
        pri.push_back(1.0);
      } else {
        const auto it = weights.find(s);
        if (it == weights.end()) throw bench::ReferenceError("no prior weight for scenario '" + s + "'");
        pri.push_back(it->second);
      }
    }
    const auto post = bench::model_posteriors(logml, pri);
    double total = 0.0;
    for (double p : pri) total += p;
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::cout << "| " << name << " | " << members[i] << " | " << std::fixed << std::setprecision(4) << logml[i]
                << " | " << pri[i] / total << " | " << post.probabilities[i] << " |\n";
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        std::cout << "log BF(" << members[i] << " : " << members[j] << ") = " << post.log_bayes_factors[i][j] << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marginal-likelihood benchmark runner"};
  app.require_subcommand(1);

  fs::path config, out, in;
  std::size_t jobs = numkit::default_jobs();
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Execute a scenario suite");
  run->add_option("--config", config, "TOML suite file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--jobs", jobs, "Worker threads (default: EVIDENCE_JOBS or 1)")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override every scenario seed");

  std::string layout;
  auto* table = app.add_subcommand("table", "Render a comparison table from results.jsonl");
  table->add_option("--layout", layout, "Layout name")->required()->check(CLI::IsMember(bench::known_layouts()));
  table->add_option("--in", in, "Directory holding results.jsonl")->required()->check(CLI::ExistingDirectory);

  std::string prior = "equal";
  auto* posteriors = app.add_subcommand("posteriors", "Posterior model probabilities per group");
  posteriors->add_option("--in", in, "Directory holding results.jsonl")->required()->check(CLI::ExistingDirectory);
  posteriors->add_option("--prior", prior, "'equal' or a CSV file of scenario,prior");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, jobs, seed);
    if (*table) return cmd_table(layout, in);
    if (*posteriors) return cmd_posteriors(in, prior);
  } catch (const bench::ReferenceError& e) {
    std::cerr << "evbench: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "evbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

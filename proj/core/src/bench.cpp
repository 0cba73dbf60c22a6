// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "agentee/errors.hpp"

namespace agentee {

double median(std::vector<double> values) {
  if (values.empty()) raise(Errc::empty_list, "median of nothing");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double compute_overhead(double subject_seconds, double baseline_seconds) {
  if (baseline_seconds <= 0.0)
    raise(Errc::nonpositive_baseline,
          "baseline must be positive, got " +
              std::to_string(baseline_seconds));
  double percent =
      (subject_seconds - baseline_seconds) / baseline_seconds * 100.0;
  return std::floor(percent * 100.0 + 0.5) / 100.0;
}

BenchResult run_bench(
    const BenchPlan& plan,
    const std::function<TurnOutcome(IsolationMode, int, const std::string&)>&
        run) {
  if (plan.configs.size() < 2)
    raise(Errc::insufficient_configs,
          "need at least two configs to compare, got " +
              std::to_string(plan.configs.size()));
  if (plan.queries.empty()) raise(Errc::empty_list, "no queries");

  BenchResult result;
  for (IsolationMode config : plan.configs) {
    for (size_t i = 0; i < plan.queries.size(); ++i) {
      TurnOutcome outcome =
          run(config, static_cast<int>(i), plan.queries[i]);
      if (outcome.inference_seconds > outcome.e2e_seconds + 1e-9)
        raise(Errc::validation,
              "inference exceeds end-to-end on " +
                  std::string(mode_name(config)) + " query " +
                  std::to_string(i));
      BenchRecord record;
      record.config = mode_name(config);
      record.agent = plan.agent;
      record.model_label = plan.model_label;
      record.query_index = static_cast<int>(i);
      record.inference_seconds = outcome.inference_seconds;
      record.e2e_seconds = outcome.e2e_seconds;
      result.records.push_back(std::move(record));
    }
  }
  result.report = render_report(result.records);
  return result;
}

namespace {

// Weakest to strongest; the report compares the strongest present config
// against every weaker one.
int config_rank(const std::string& config) {
  if (config == "in-process") return 0;
  if (config == "process-shm") return 1;
  if (config == "realm-csm") return 2;
  return 3;
}

struct ConfigStats {
  std::vector<double> inference;
  std::vector<double> e2e;
};

}  // namespace

std::string render_report(const std::vector<BenchRecord>& records) {
  if (records.empty()) raise(Errc::empty_list, "no records to report");

  // (agent, model) -> config -> samples
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, ConfigStats>>
      groups;
  for (const BenchRecord& r : records) {
    ConfigStats& stats = groups[{r.agent, r.model_label}][r.config];
    stats.inference.push_back(r.inference_seconds);
    stats.e2e.push_back(r.e2e_seconds);
  }

  std::ostringstream out;
  char buf[160];
  for (const auto& [key, by_config] : groups) {
    if (by_config.size() < 2)
      raise(Errc::insufficient_configs,
            "group " + key.first + "/" + key.second +
                " has fewer than two configs");

    std::vector<std::string> order;
    for (const auto& [config, stats] : by_config) order.push_back(config);
    std::sort(order.begin(), order.end(),
              [](const std::string& a, const std::string& b) {
                return config_rank(a) < config_rank(b);
              });

    out << "agent=" << key.first << " model=" << key.second << "\n";
    std::snprintf(buf, sizeof(buf), "%-14s %18s %18s\n", "config",
                  "inference-med-s", "end-to-end-med-s");
    out << buf;
    std::map<std::string, std::pair<double, double>> medians;
    for (const std::string& config : order) {
      const ConfigStats& stats = by_config.at(config);
      double mi = median(stats.inference);
      double me = median(stats.e2e);
      medians[config] = {mi, me};
      std::snprintf(buf, sizeof(buf), "%-14s %18.6f %18.6f\n",
                    config.c_str(), mi, me);
      out << buf;
    }

    const std::string& subject = order.back();
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      const std::string& baseline = order[i];
      double oi = compute_overhead(medians[subject].first,
                                   medians[baseline].first);
      double oe = compute_overhead(medians[subject].second,
                                   medians[baseline].second);
      std::snprintf(buf, sizeof(buf),
                    "overhead %s vs %s: inference %.2f%% end-to-end %.2f%%\n",
                    subject.c_str(), baseline.c_str(), oi, oe);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string records_tsv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "config\tagent\tmodel-label\tquery-index\tinference-seconds\t"
         "end-to-end-seconds\n";
  char buf[64];
  for (const BenchRecord& r : records) {
    out << r.config << '\t' << r.agent << '\t' << r.model_label << '\t'
        << r.query_index << '\t';
    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\n", r.inference_seconds,
                  r.e2e_seconds);
    out << buf;
  }
  return out.str();
}

std::vector<std::string> load_queries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open queries: " + path);
  std::vector<std::string> queries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    queries.push_back(line);
  }
  if (queries.empty()) raise(Errc::empty_list, "queries file is empty");
  return queries;
}

}  // namespace agentee

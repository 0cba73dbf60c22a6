// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "agentee/pipeline.hpp"

namespace agentee {

// One measured query under one isolation config.
struct BenchRecord {
  std::string config;
  std::string agent;
  std::string model_label;
  int query_index = 0;
  double inference_seconds = 0.0;
  double e2e_seconds = 0.0;
};

// Median of the values; an even count averages the middle two.
// Throws Errc::empty_list.
double median(std::vector<double> values);

// Percent slowdown of subject over baseline, rounded half-up to two
// decimals. Throws Errc::nonpositive_baseline.
double compute_overhead(double subject_seconds, double baseline_seconds);

struct BenchPlan {
  std::vector<IsolationMode> configs;
  std::vector<std::string> queries;
  std::string agent;
  std::string model_label;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::string report;
};

// Runs every (config, query) cell through `run` — one fresh pipeline per
// cell — and renders the summary. Enforces inference <= end-to-end on
// every record (Errc::validation). Throws Errc::insufficient_configs with
// fewer than two configs, Errc::empty_list without queries.
BenchResult run_bench(
    const BenchPlan& plan,
    const std::function<TurnOutcome(IsolationMode, int, const std::string&)>&
        run);

// Latency table + overhead lines for the records of one run.
std::string render_report(const std::vector<BenchRecord>& records);

// One record per line: config, agent, model label, query index, inference
// seconds, end-to-end seconds. Tab-separated, header line first.
std::string records_tsv(const std::vector<BenchRecord>& records);

// Query files: one query per line, blank lines and '#' comments skipped.
std::vector<std::string> load_queries(const std::string& path);

}  // namespace agentee

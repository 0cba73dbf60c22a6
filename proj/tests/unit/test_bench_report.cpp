// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/bench.hpp"
#include "agentee/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agentee;
using testutil::thrown_code;

TEST_CASE("median handles odd, even and degenerate inputs") {
  CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK(median({5.0}) == doctest::Approx(5.0));
  CHECK(median({2.0, 2.0, 2.0, 9.0}) == doctest::Approx(2.0));
  CHECK(thrown_code([] { median({}); }) == Errc::empty_list);
}

TEST_CASE("overhead is percent slowdown rounded half-up to two decimals") {
  CHECK(compute_overhead(105.0, 100.0) == doctest::Approx(5.00));
  CHECK(compute_overhead(100.0, 100.0) == doctest::Approx(0.00));
  CHECK(compute_overhead(100.155, 100.0) == doctest::Approx(0.16));
  CHECK(compute_overhead(100.154, 100.0) == doctest::Approx(0.15));
  CHECK(compute_overhead(98.0, 100.0) == doctest::Approx(-2.00));
  // Cells of the published-shape data reproduce from raw medians.
  CHECK(compute_overhead(98.22, 92.16) == doctest::Approx(6.58));
  CHECK(compute_overhead(289.55, 284.90) == doctest::Approx(1.63));
  CHECK(thrown_code([] { compute_overhead(1.0, 0.0); }) ==
        Errc::nonpositive_baseline);
  CHECK(thrown_code([] { compute_overhead(1.0, -3.0); }) ==
        Errc::nonpositive_baseline);
}

TEST_CASE("run_bench sweeps configs x queries and validates spans") {
  BenchPlan plan;
  plan.configs = {IsolationMode::in_process, IsolationMode::realm_csm};
  plan.queries = {"q0", "q1"};
  plan.agent = "chatbot";
  plan.model_label = "m";

  std::vector<std::string> seen;
  BenchResult result = run_bench(
      plan, [&](IsolationMode mode, int index, const std::string& query) {
        seen.push_back(std::string(mode_name(mode)) + "/" +
                       std::to_string(index) + "/" + query);
        TurnOutcome out;
        out.inference_seconds = mode == IsolationMode::in_process ? 0.10
                                                                  : 0.11;
        out.e2e_seconds = mode == IsolationMode::in_process ? 0.20 : 0.21;
        return out;
      });

  CHECK(seen == std::vector<std::string>{"in-process/0/q0", "in-process/1/q1",
                                         "realm-csm/0/q0", "realm-csm/1/q1"});
  REQUIRE(result.records.size() == 4);
  CHECK(result.records[0].config == "in-process");
  CHECK(result.records[3].config == "realm-csm");
  CHECK(result.records[1].query_index == 1);
  CHECK(result.records[0].agent == "chatbot");

  // 0.11/0.10 -> 10.00%, 0.21/0.20 -> 5.00%
  CHECK(result.report.find("agent=chatbot model=m") != std::string::npos);
  CHECK(result.report.find("overhead realm-csm vs in-process: "
                           "inference 10.00% end-to-end 5.00%") !=
        std::string::npos);
}

TEST_CASE("run_bench rejects degenerate plans and inverted spans") {
  BenchPlan plan;
  plan.configs = {IsolationMode::in_process};
  plan.queries = {"q"};
  plan.agent = "chatbot";
  plan.model_label = "m";
  auto noop = [](IsolationMode, int, const std::string&) {
    return TurnOutcome{};
  };
  CHECK(thrown_code([&] { run_bench(plan, noop); }) ==
        Errc::insufficient_configs);

  plan.configs = {IsolationMode::in_process, IsolationMode::realm_csm};
  plan.queries = {};
  CHECK(thrown_code([&] { run_bench(plan, noop); }) == Errc::empty_list);

  plan.queries = {"q"};
  CHECK(thrown_code([&] {
          run_bench(plan, [](IsolationMode, int, const std::string&) {
            TurnOutcome out;
            out.inference_seconds = 0.3;  // decode longer than the turn
            out.e2e_seconds = 0.2;
            return out;
          });
        }) == Errc::validation);
}

TEST_CASE("reports group by agent/model and order configs by strength") {
  std::vector<BenchRecord> records;
  auto add = [&](const char* config, double inf, double e2e) {
    BenchRecord r;
    r.config = config;
    r.agent = "chatbot";
    r.model_label = "m";
    r.inference_seconds = inf;
    r.e2e_seconds = e2e;
    records.push_back(r);
  };
  add("realm-csm", 1.05, 2.10);
  add("process-shm", 1.02, 2.04);
  add("in-process", 1.00, 2.00);

  std::string report = render_report(records);
  size_t pos_in = report.find("in-process");
  size_t pos_shm = report.find("process-shm");
  size_t pos_csm = report.find("realm-csm");
  REQUIRE(pos_in != std::string::npos);
  REQUIRE(pos_shm != std::string::npos);
  REQUIRE(pos_csm != std::string::npos);
  CHECK(pos_in < pos_shm);
  CHECK(pos_shm < pos_csm);
  // The strongest config is compared against both weaker ones.
  CHECK(report.find("overhead realm-csm vs in-process: "
                    "inference 5.00% end-to-end 5.00%") != std::string::npos);
  CHECK(report.find("overhead realm-csm vs process-shm: "
                    "inference 2.94% end-to-end 2.94%") != std::string::npos);

  CHECK(thrown_code([] { render_report({}); }) == Errc::empty_list);

  std::vector<BenchRecord> lonely(records.begin(), records.begin() + 1);
  CHECK(thrown_code([&] { render_report(lonely); }) ==
        Errc::insufficient_configs);
}

TEST_CASE("records serialize to a stable tsv") {
  BenchRecord r;
  r.config = "in-process";
  r.agent = "chatbot";
  r.model_label = "m";
  r.query_index = 0;
  r.inference_seconds = 0.1;
  r.e2e_seconds = 0.2;
  CHECK(records_tsv({r}) ==
        "config\tagent\tmodel-label\tquery-index\tinference-seconds\t"
        "end-to-end-seconds\n"
        "in-process\tchatbot\tm\t0\t0.100000\t0.200000\n");
}

TEST_CASE("query files load one query per line") {
  auto chatbot = load_queries(testutil::fixture_path("queries_chatbot.txt"));
  REQUIRE(chatbot.size() == 9);
  CHECK(chatbot[0] == "Hello there, how are you today?");

  auto itinerary =
      load_queries(testutil::fixture_path("queries_itinerary.txt"));
  REQUIRE(itinerary.size() == 9);
  CHECK(itinerary[0] == "Paris|3|1200 USD|museums, food|walkable days");

  CHECK(thrown_code([] { load_queries("/nonexistent/queries.txt"); }) ==
        Errc::io);

  std::string empty_path = "/tmp/agentee-test-empty-queries.txt";
  testutil::write_file(empty_path, "# only a comment\n\n");
  CHECK(thrown_code([&] { load_queries(empty_path); }) == Errc::empty_list);
  ::unlink(empty_path.c_str());
}

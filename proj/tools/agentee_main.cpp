// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "agentee/bench.hpp"
#include "agentee/errors.hpp"
#include "agentee/observer.hpp"
#include "agentee/pipeline.hpp"

namespace fs = std::filesystem;
using namespace agentee;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io, "cannot write: " + path.string());
  out << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Self-contained pipeline setup for benchmark runs that do not bring their
// own manifest: realm images, specs and owner assets under <out>/setup.
std::string make_default_manifest(const fs::path& out_dir,
                                  const std::string& agent_kind,
                                  const std::string& model_config_path) {
  fs::path setup = out_dir / "setup";
  fs::create_directories(setup);

  write_text(setup / "agent.image", "agentee agent realm image v1\n");
  write_text(setup / "model.image", "agentee model realm image v1\n");
  write_text(setup / "tool.image", "agentee tool realm image v1\n");

  write_text(setup / "agent.conf",
             "role = agent\nimage_path = agent.image\npeer = model\n"
             "peer = tool\nregion_size = 65536\nready_timeout_ms = 20000\n");
  write_text(setup / "model.conf",
             "role = model\nimage_path = model.image\npeer = agent\n"
             "region_size = 65536\nready_timeout_ms = 20000\n");
  write_text(setup / "tool.conf",
             "role = tool\nimage_path = tool.image\npeer = agent\n"
             "region_size = 65536\nready_timeout_ms = 20000\n");

  write_text(setup / "system_prompt.txt",
             "You are a concise assistant; answer in one short paragraph.\n");
  write_text(setup / "agent_policy.conf",
             "max_tokens = 20\ntool = currency-mock\ntool = weather-mock\n"
             "tool = echo-args\n");
  write_text(setup / "tool_credential.txt", "demo-credential-0001\n");
  write_text(setup / "rates.tsv",
             "USD\tEUR\t0.92\nEUR\tUSD\t1.0870\nUSD\tJPY\t147.20\n");
  write_text(setup / "model.conf.kv", read_text(model_config_path));

  write_text(setup / "pipeline.conf",
             "mode = realm-csm\n"
             "agent_kind = " + agent_kind + "\n" +
             "agent_spec = agent.conf\n"
             "model_spec = model.conf\n"
             "tool_spec = tool.conf\n"
             "system_prompt = system_prompt.txt\n"
             "agent_policy = agent_policy.conf\n"
             "model_config = model.conf.kv\n"
             "tool_credential = tool_credential.txt\n"
             "rates = rates.tsv\n");
  return (setup / "pipeline.conf").string();
}

int cmd_launch(const std::string& config_path, int64_t hold_ms) {
  PipelineManifest manifest = PipelineManifest::load(config_path);
  Pipeline pipeline = Pipeline::start(manifest);
  std::cout << "pipeline " << pipeline.run_id() << " ready ("
            << mode_name(pipeline.mode()) << ")" << std::endl;
  if (hold_ms > 0)
    std::this_thread::sleep_for(std::chrono::milliseconds(hold_ms));
  pipeline.shutdown();
  std::cout << "pipeline stopped" << std::endl;
  return 0;
}

int cmd_chat(const std::string& config_path) {
  PipelineManifest manifest = PipelineManifest::load(config_path);
  Pipeline pipeline = Pipeline::start(manifest);
  std::cerr << "pipeline " << pipeline.run_id() << " ready ("
            << mode_name(pipeline.mode()) << "); EOF ends the chat\n";

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    std::cout << "> " << line << "\n";
    try {
      TurnOutcome outcome = pipeline.query(line);
      std::cout << outcome.reply << "\n";
      std::cerr << "(inference " << outcome.inference_seconds << "s, turn "
                << outcome.e2e_seconds << "s)\n";
    } catch (const Error& e) {
      std::cout << "! " << errc_name(e.code()) << "\n";
      std::cerr << e.what() << "\n";
    }
    std::cout.flush();
  }
  pipeline.shutdown();
  return 0;
}

int cmd_bench(const std::string& agent_kind,
              const std::string& model_config_path,
              const std::string& configs_csv,
              const std::string& queries_path, const std::string& out_dir,
              const std::string& manifest_path) {
  fs::create_directories(out_dir);
  std::string config_file = manifest_path.empty()
                                ? make_default_manifest(
                                      out_dir, agent_kind, model_config_path)
                                : manifest_path;
  PipelineManifest base = PipelineManifest::load(config_file);
  base.agent_kind = agent_kind_from_name(agent_kind);
  base.assets.model_config = read_text(model_config_path);

  BenchPlan plan;
  std::stringstream css(configs_csv);
  std::string item;
  while (std::getline(css, item, ','))
    if (!item.empty()) plan.configs.push_back(mode_from_name(item));
  plan.queries = load_queries(queries_path);
  plan.agent = agent_kind;
  plan.model_label =
      ModelConfig::parse(base.assets.model_config).model_name;

  BenchResult result = run_bench(
      plan, [&](IsolationMode mode, int index, const std::string& query) {
        PipelineManifest manifest = base;
        manifest.mode = mode;
        Pipeline pipeline = Pipeline::start(manifest);
        TurnOutcome outcome = pipeline.query(query);
        pipeline.shutdown();
        std::cerr << mode_name(mode) << " query " << index << ": inference "
                  << outcome.inference_seconds << "s, end-to-end "
                  << outcome.e2e_seconds << "s\n";
        return outcome;
      });

  write_text(fs::path(out_dir) / "records.tsv", records_tsv(result.records));
  write_text(fs::path(out_dir) / "report.txt", result.report);
  std::cout << result.report;
  return 0;
}

int cmd_observe(const std::string& probes_path, const std::string& run_id) {
  std::vector<std::string> probes = load_probes(probes_path);
  ObserverReport report = scan_regions(run_id, probes);
  std::cout << "regions scanned: " << report.regions_scanned << "\n";
  for (const std::string& probe : probes)
    std::cout << "probe " << probe << ": " << report.counts.at(probe)
              << " hit(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agentee: isolated LLM-agent pipelines on shared memory"};
  app.require_subcommand(1);

  std::string config_path;
  int64_t hold_ms = 0;
  CLI::App* launch = app.add_subcommand(
      "launch", "start a pipeline, wait, then stop it");
  launch->add_option("--config", config_path, "pipeline manifest")
      ->required();
  launch->add_option("--hold-ms", hold_ms, "keep the pipeline up this long");

  std::string chat_config;
  CLI::App* chat =
      app.add_subcommand("chat", "interactive chat over a pipeline");
  chat->add_option("--config", chat_config, "pipeline manifest")->required();

  std::string bench_agent = "chatbot";
  std::string bench_model_config;
  std::string bench_configs = "in-process,process-shm,realm-csm";
  std::string bench_queries;
  std::string bench_out;
  std::string bench_manifest;
  CLI::App* bench = app.add_subcommand(
      "bench", "latency comparison across isolation configs");
  bench->add_option("--agent", bench_agent, "chatbot | itinerary")
      ->check(CLI::IsMember({"chatbot", "itinerary"}));
  bench->add_option("--model-config", bench_model_config,
                    "model config file")
      ->required();
  bench->add_option("--configs", bench_configs,
                    "comma-separated isolation modes");
  bench->add_option("--queries", bench_queries, "queries file")->required();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--config", bench_manifest,
                    "pipeline manifest (default: generated setup)");

  std::string observe_probes;
  std::string observe_run;
  CLI::App* observe = app.add_subcommand(
      "observe", "scan a run's shared regions for probe strings");
  observe->add_option("--probes", observe_probes, "probe strings file")
      ->required();
  observe->add_option("--run-id", observe_run, "run to scan")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (launch->parsed()) return cmd_launch(config_path, hold_ms);
    if (chat->parsed()) return cmd_chat(chat_config);
    if (bench->parsed())
      return cmd_bench(bench_agent, bench_model_config, bench_configs,
                       bench_queries, bench_out, bench_manifest);
    if (observe->parsed()) return cmd_observe(observe_probes, observe_run);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

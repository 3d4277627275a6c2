// Copyright 2026 The Migrant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point: serve | simulate | analyze | replay | game.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "migrant/dialogue.hpp"
#include "migrant/error.hpp"
#include "migrant/harness.hpp"
#include "migrant/nlu.hpp"
#include "migrant/orchestrator.hpp"
#include "migrant/server.hpp"
#include "migrant/service.hpp"
#include "migrant/store.hpp"
#include "migrant/trustgame.hpp"

namespace {

using migrant::Json;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw migrant::Error(migrant::ErrorCode::kIoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw migrant::Error(migrant::ErrorCode::kConfigError, path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw migrant::Error(migrant::ErrorCode::kIoError, "cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent migration across embodiments: orchestrator, simulator and analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string data_dir = env_or("MIGRANT_DATA_DIR", "data");
  std::string grammar_path;
  std::string script_dir;
  std::string log_level = "info";
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--data-dir", data_dir, "data directory (env MIGRANT_DATA_DIR)");
  app.add_option("--grammar", grammar_path, "NLU grammar (JSON)")->check(CLI::ExistingFile);
  app.add_option("--script-dir", script_dir, "dialogue scripts directory")
      ->check(CLI::ExistingDirectory);
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  auto* serve = app.add_subcommand("serve", "run the WebSocket orchestrator");
  int port = std::atoi(env_or("MIGRANT_PORT", "8700").c_str());
  std::string address = "127.0.0.1";
  serve->add_option("--port", port, "listen port (env MIGRANT_PORT)")->check(CLI::Range(0, 65535));
  serve->add_option("--address", address, "listen address");

  auto* simulate = app.add_subcommand("simulate", "simulate a full experiment");
  std::optional<int> participants;
  std::optional<int> parallelism;
  std::string out_dir;
  simulate->add_option("--participants", participants, "number of participants");
  simulate->add_option("--parallelism", parallelism, "concurrent participants");
  simulate->add_option("--out", out_dir, "output directory (defaults to --data-dir)");

  auto* analyze = app.add_subcommand("analyze", "analyze a data directory or summary stats");
  std::string in_dir;
  std::string report_path;
  std::string summary_path;
  analyze->add_option("--in", in_dir, "data directory (defaults to --data-dir)");
  analyze->add_option("--report", report_path, "write the markdown report here");
  analyze->add_option("--summary-stats", summary_path, "group summaries (JSON) instead of raw data")
      ->check(CLI::ExistingFile);

  auto* replay = app.add_subcommand("replay", "rebuild a session from its event log");
  std::string session_id;
  bool verify = false;
  replay->add_option("--session", session_id, "session id")->required();
  replay->add_flag("--verify", verify, "compare against the stored snapshot");

  auto* game = app.add_subcommand("game", "score one Give-Some game");
  int give = 0;
  int predict = 0;
  int agent_give = 4;
  game->add_option("--give", give, "tokens given")->required();
  game->add_option("--predict", predict, "tokens predicted back")->required();
  game->add_option("--agent-give", agent_give, "tokens the agent gives");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    const migrant::nlu::Grammar grammar = grammar_path.empty()
                                              ? migrant::nlu::Grammar::bundled()
                                              : migrant::nlu::Grammar::load_file(grammar_path);
    auto scripts = [&] {
      return script_dir.empty() ? migrant::dialogue::ScriptLibrary::bundled()
                                : migrant::dialogue::ScriptLibrary::from_directory(script_dir);
    };

    if (*serve) {
      // Block termination signals before any thread starts; sigwait below.
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);

      auto store = std::make_shared<migrant::FileStore>(data_dir);
      migrant::Orchestrator orchestrator(store, std::make_shared<migrant::SystemClock>());
      const auto deployment = migrant::Deployment::bundled();
      deployment.install(orchestrator);
      migrant::ServiceConfig config;
      config.default_identity = deployment.home_identity;
      migrant::AgentService service(orchestrator, grammar, scripts(), config);
      migrant::Server server(service, address, static_cast<std::uint16_t>(port));
      server.start();
      std::cout << "listening on " << address << ":" << server.port() << std::endl;
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
      return 0;
    }

    if (*simulate) {
      auto config = config_path.empty() ? migrant::harness::ExperimentConfig::defaults()
                                        : migrant::harness::ExperimentConfig::from_json(
                                              read_json_file(config_path));
      if (participants) config.participants = *participants;
      if (parallelism) config.parallelism = *parallelism;
      if (seed) config.seed = *seed;
      const std::string dir = out_dir.empty() ? data_dir : out_dir;
      const auto summary = migrant::harness::run_experiment(config, dir);
      std::cout << "participants " << summary.participants << ", transcripts "
                << summary.transcripts << ", games " << summary.games << ", failures "
                << summary.failures.size() << " -> " << dir << "\n";
      return summary.failures.empty() ? 0 : 1;
    }

    if (*analyze) {
      if (!summary_path.empty()) {
        const Json results = migrant::harness::analyze_summary_stats(read_json_file(summary_path));
        const std::string md = migrant::harness::summary_stats_markdown(results);
        if (!report_path.empty()) write_file(report_path, md);
        std::cout << md;
        return 0;
      }
      const std::string dir = in_dir.empty() ? data_dir : in_dir;
      const auto report = migrant::harness::analyze(dir);
      migrant::harness::write_report(report, dir);
      const std::string md = report.to_markdown();
      if (!report_path.empty()) write_file(report_path, md);
      std::cout << md;
      return 0;
    }

    if (*replay) {
      migrant::FileStore store(data_dir);
      const auto state = migrant::replay_session(store, session_id);
      const std::string doc = migrant::snapshot_document(state);
      std::cout << doc;
      if (verify) {
        const auto stored = store.get("sessions", session_id + ".snapshot.json");
        if (!stored) {
          std::cerr << "no stored snapshot for " << session_id << "\n";
          return 1;
        }
        if (*stored != doc) {
          std::cerr << "replay differs from stored snapshot\n";
          return 1;
        }
        std::cerr << "replay matches stored snapshot\n";
      }
      return 0;
    }

    if (*game) {
      const auto outcome = migrant::trustgame::play(give, predict, agent_give);
      std::cout << migrant::trustgame::to_json(outcome).dump(2) << "\n";
      return 0;
    }
  } catch (const migrant::Error& e) {
    std::cerr << "error: " << migrant::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

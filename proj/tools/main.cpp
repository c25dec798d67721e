// Copyright 2026 The qstpinn Authors
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


#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qstpinn/classical.hpp"
#include "qstpinn/config.hpp"
#include "qstpinn/errors.hpp"
#include "qstpinn/experiments.hpp"
#include "qstpinn/pinn.hpp"
#include "qstpinn/report.hpp"

namespace fs = std::filesystem;
using namespace qst;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> threads;
  bool paper_scale = false;
  bool single_thread = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

ExperimentConfig resolve_config(const Globals& g, ExperimentKind kind) {
  ExperimentConfig cfg = g.config.empty() ? default_config(kind) : load_config(g.config);
  cfg.experiment = kind;
  if (g.seed) cfg.seeds = {*g.seed};
  if (!g.out.empty()) cfg.out_dir = g.out;
  if (g.threads) cfg.threads = *g.threads;
  if (g.paper_scale) cfg.paper_scale = true;
  if (g.single_thread) {
    cfg.single_thread = true;
    cfg.threads = 1;
  }
  cfg.validate();
  return cfg;
}

void run_and_emit(const ExperimentConfig& cfg) {
  ExperimentReport rep = run_experiment(cfg);
  fs::create_directories(cfg.out_dir);
  // Wall times vary between runs; keep them out of the deterministic CSV/JSON outputs.
  if (cfg.single_thread) write_text(cfg.out_dir / "timings.log", extract_timings(rep));
  emit_report(rep, cfg.out_dir);
  write_text(cfg.out_dir / "config.json", config_to_json(cfg));
  std::cout << report_summary(rep);
}

void cmd_generate(const ExperimentConfig& cfg) {
  for (auto dim : experiment_dims(cfg)) {
    const auto n = qubit_count(dim);
    const auto [n_train, n_test] = default_split(cfg, n ? *n : 3);
    for (auto seed : cfg.seeds) {
      const auto data = generate_datasets(cfg, dim, cfg.data.noise_grid, cfg.data.noise_kinds, n_train, n_test,
                                          stream_seed(seed, 1000 * dim));
      const fs::path dir = cfg.out_dir / ("dim" + std::to_string(dim)) / ("seed" + std::to_string(seed));
      fs::create_directories(dir);
      save_dataset_pair(data, dir);
      std::cout << "wrote " << dir.string() << " (" << n_train << " train, " << n_test << " test)\n";
    }
  }
}

void print_eval(const EvalSummary& ev, const fs::path& out) {
  nlohmann::json j;
  j["n_test"] = ev.n;
  j["fidelity_mean"] = ev.fidelity_mean;
  j["fidelity_std"] = ev.fidelity_std;
  j["violation_mean"] = ev.violation_mean;
  j["raw_violation_mean"] = ev.raw_violation_mean;
  j["mse"] = ev.mse;
  j["severity_mae"] = ev.severity_mae;
  j["mean_lambda"] = ev.mean_lambda;
  for (const auto& [lvl, s] : ev.per_level) {
    j["per_level"][format_double(lvl)] = {{"n", s.n}, {"fidelity_mean", s.fidelity_mean},
                                          {"fidelity_std", s.fidelity_std}, {"mean_lambda", s.mean_lambda}};
  }
  fs::create_directories(out);
  write_text(out / "eval.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

void cmd_train(const ExperimentConfig& cfg, const fs::path& data_dir, bool nn, const std::string& resume) {
  const Dataset tr = load_dataset(data_dir / "train");
  const Dataset te = load_dataset(data_dir / "test");
  const ModelOptions opts = nn ? baseline_options(cfg.model) : cfg.model;
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seeds.front();
  if (nn) tc.lr = cfg.baseline_lr;
  tc.lr_min = std::min(tc.lr_min, tc.lr);
  fs::create_directories(cfg.out_dir);
  tc.checkpoint_path = cfg.out_dir / (nn ? "nn.ckpt" : "pinn.ckpt");
  PinnModel model(tr.dim, tr.feature_dim(), opts);
  std::optional<fs::path> resume_path;
  if (!resume.empty()) resume_path = resume;
  const History h = train(model, tr, &te, tc, resume_path);
  write_text(cfg.out_dir / (nn ? "nn_history.csv" : "pinn_history.csv"), h.to_csv());
  print_eval(evaluate(model, te), cfg.out_dir);
}

void cmd_classical(const ExperimentConfig& cfg, const fs::path& data_dir, Method m) {
  DatasetPair data{load_dataset(data_dir / "train"), load_dataset(data_dir / "test")};
  const MethodResult r = run_method(m, cfg, data, cfg.model, cfg.seeds.front());
  nlohmann::json j = {{"method", to_string(m)},         {"n_test", r.n_test},
                      {"fidelity_mean", r.fidelity_mean}, {"fidelity_std", r.fidelity_std},
                      {"violation_mean", r.violation_mean}, {"mse", r.mse}};
  fs::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "eval.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed quantum state tomography toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Replace the seed list with a single seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)");
  app.add_flag("--paper-scale", g.paper_scale, "Use the full sample counts");
  app.add_flag("--single-thread", g.single_thread, "One worker; wall times go to timings.log");

  auto* gen = app.add_subcommand("generate", "Write train/test datasets");
  std::string data_dir, resume, checkpoint, method = "nn", report_in;
  auto* trn = app.add_subcommand("train", "Train the PINN on a generated dataset");
  trn->add_option("--data", data_dir, "Directory holding train.* and test.*")->required();
  trn->add_option("--resume", resume, "Checkpoint to resume from");
  auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint on a test split");
  ev->add_option("--checkpoint", checkpoint)->required();
  ev->add_option("--data", data_dir, "Directory holding test.*")->required();
  auto* base = app.add_subcommand("baseline", "Train or run a baseline method");
  base->add_option("--data", data_dir, "Directory holding train.* and test.*")->required();
  base->add_option("--method", method, "nn, ls or mle")->check(CLI::IsMember({"nn", "ls", "mle"}));
  base->add_option("--resume", resume, "Checkpoint to resume from (nn only)");
  auto* rob = app.add_subcommand("robustness", "Noise robustness sweep");
  auto* sca = app.add_subcommand("scalability", "Multi-qubit scalability comparison");
  auto* abl = app.add_subcommand("ablate", "Component ablation");
  auto* mon = app.add_subcommand("monitor", "Link monitoring with alarm replay");
  auto* rep = app.add_subcommand("report", "Re-render a saved report");
  rep->add_option("--in", report_in, "report.json to read")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) {
      cmd_generate(resolve_config(g, ExperimentKind::Scalability));
    } else if (*trn) {
      cmd_train(resolve_config(g, ExperimentKind::Scalability), data_dir, false, resume);
    } else if (*ev) {
      const auto cfg = resolve_config(g, ExperimentKind::Scalability);
      PinnModel model = load_model(checkpoint);
      print_eval(evaluate(model, load_dataset(fs::path(data_dir) / "test")), cfg.out_dir);
    } else if (*base) {
      const auto cfg = resolve_config(g, ExperimentKind::Scalability);
      if (method == "nn") {
        cmd_train(cfg, data_dir, true, resume);
      } else {
        cmd_classical(cfg, data_dir, method_from_string(method));
      }
    } else if (*rob) {
      run_and_emit(resolve_config(g, ExperimentKind::NoiseRobustness));
    } else if (*sca) {
      run_and_emit(resolve_config(g, ExperimentKind::Scalability));
    } else if (*abl) {
      run_and_emit(resolve_config(g, ExperimentKind::Ablation));
    } else if (*mon) {
      run_and_emit(resolve_config(g, ExperimentKind::Monitor));
    } else if (*rep) {
      const ExperimentReport r = report_from_json(read_text(report_in));
      if (!g.out.empty()) emit_report(r, g.out);
      std::cout << report_summary(r);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

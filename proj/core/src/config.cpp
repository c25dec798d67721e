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


#include "qstpinn/config.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "qstpinn/errors.hpp"

namespace qst {

using json = nlohmann::json;

namespace {

template <typename E, std::size_t N>
E enum_from(const std::string& s, const E (&all)[N], const char* what) {
  for (E e : all) {
    if (to_string(e) == s) return e;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
}

constexpr ExperimentKind kKinds[] = {ExperimentKind::Monitor, ExperimentKind::NoiseRobustness,
                                     ExperimentKind::Scalability, ExperimentKind::Ablation};
constexpr Method kMethods[] = {Method::PINN, Method::NN, Method::LS, Method::MLE};
constexpr NoiseMode kModes[] = {NoiseMode::AllChannels, NoiseMode::PerChannel};

std::string to_string(AttentionPlacement a) {
  switch (a) {
    case AttentionPlacement::None: return "none";
    case AttentionPlacement::Final: return "final";
    case AttentionPlacement::PerBlock: return "per_block";
  }
  return "unknown";
}

AttentionPlacement attention_from_string(const std::string& s) {
  for (auto a : {AttentionPlacement::None, AttentionPlacement::Final, AttentionPlacement::PerBlock}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown attention placement '" + s + "'");
}

// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Monitor: return "monitor";
    case ExperimentKind::NoiseRobustness: return "robustness";
    case ExperimentKind::Scalability: return "scalability";
    case ExperimentKind::Ablation: return "ablation";
  }
  return "unknown";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::PINN: return "pinn";
    case Method::NN: return "nn";
    case Method::LS: return "ls";
    case Method::MLE: return "mle";
  }
  return "unknown";
}

std::string to_string(NoiseMode m) {
  return m == NoiseMode::AllChannels ? "all_channels" : "per_channel";
}

ExperimentKind experiment_kind_from_string(const std::string& s) { return enum_from(s, kKinds, "experiment"); }
Method method_from_string(const std::string& s) { return enum_from(s, kMethods, "method"); }
NoiseMode noise_mode_from_string(const std::string& s) { return enum_from(s, kModes, "noise mode"); }

std::size_t default_settings(std::size_t n_qubits) {
  std::size_t want = 256;
  if (n_qubits == 3) want = 128;
  if (n_qubits == 4) want = 64;
  if (n_qubits >= 5) want = 32;
  const std::size_t full = (std::size_t{1} << (2 * n_qubits)) - 1;
  return std::min(want, full);
}

std::pair<std::size_t, std::size_t> paper_split(ExperimentKind kind, std::size_t n_qubits) {
  switch (kind) {
    case ExperimentKind::Monitor:
    case ExperimentKind::NoiseRobustness: return {5000, 1200};
    case ExperimentKind::Ablation: return {3000, 800};
    case ExperimentKind::Scalability:
      if (n_qubits <= 2) return {8000, 2000};
      if (n_qubits == 3) return {6000, 1500};
      if (n_qubits == 4) return {8000, 1500};
      return {3000, 800};
  }
  return {1000, 250};
}

std::pair<std::size_t, std::size_t> default_split(const ExperimentConfig& cfg, std::size_t n_qubits) {
  auto [tr, te] = paper_split(cfg.experiment, n_qubits);
  if (!cfg.paper_scale) {
    tr /= 5;
    te /= 5;
  }
  return {cfg.data.n_train ? cfg.data.n_train : tr, cfg.data.n_test ? cfg.data.n_test : te};
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  switch (kind) {
    case ExperimentKind::NoiseRobustness:
      cfg.data.noise_mode = NoiseMode::PerChannel;
      [[fallthrough]];
    case ExperimentKind::Monitor:
      cfg.qubit_grid = {3};
      cfg.methods = {Method::PINN, Method::NN};
      break;
    case ExperimentKind::Scalability:
      cfg.qubit_grid = {2, 3, 4};
      cfg.methods = {Method::PINN, Method::NN, Method::LS, Method::MLE};
      break;
    case ExperimentKind::Ablation:
      cfg.qubit_grid = {3};
      cfg.methods = {Method::PINN};
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (qubit_grid.empty() && dim_grid.empty()) throw ConfigError("qubit_grid or dim_grid must be nonempty");
  for (auto n : qubit_grid) {
    if (n < 1 || n > 5) throw ConfigError("qubit counts must lie in [1, 5]");
  }
  for (auto d : dim_grid) {
    if (d < 2 || d > 32) throw ConfigError("generalized dimensions must lie in [2, 32]");
  }
  if (data.noise_grid.empty()) throw ConfigError("noise_grid must be nonempty");
  for (double v : data.noise_grid) {
    if (!(v >= 0.0 && v <= kMaxNoiseLevel)) throw ConfigError("noise levels must lie in [0, 0.19]");
  }
  if (methods.empty()) throw ConfigError("methods must be nonempty");
  if (data.shots < 1) throw ConfigError("shots must be >= 1");
  if (!(data.gauss_sigma >= 0.0)) throw ConfigError("gauss_sigma must be nonnegative");
  if (!(baseline_lr > 0.0)) throw ConfigError("baseline_lr must be positive");
  if (!(memory_cap_gb > 0.0)) throw ConfigError("memory_cap_gb must be positive");
  train.validate();
  mle.validate();
  model.weights.validate();
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["qubits"] = c.qubit_grid;
  j["dims"] = c.dim_grid;
  json kinds = json::array();
  for (auto k : c.data.noise_kinds) kinds.push_back(to_string(k));
  j["data"] = {{"settings", c.data.settings},
               {"shots", c.data.shots},
               {"gauss_sigma", c.data.gauss_sigma},
               {"n_train", c.data.n_train},
               {"n_test", c.data.n_test},
               {"noise_grid", c.data.noise_grid},
               {"noise_kinds", kinds},
               {"noise_mode", to_string(c.data.noise_mode)},
               {"exact", c.data.exact}};
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["seeds"] = c.seeds;
  const auto& t = c.train;
  j["train"] = {{"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"lr", t.lr},
                {"lr_min", t.lr_min},
                {"warmup_epochs", t.warmup_epochs},
                {"aux_weight", t.aux_weight},
                {"weight_decay", t.adam.weight_decay},
                {"clip_norm", t.adam.clip_norm},
                {"eval_every", t.eval_every},
                {"lambda_flow_through", t.lambda_flow_through},
                {"physics_on_raw", t.physics_on_raw}};
  j["baseline_lr"] = c.baseline_lr;
  j["model"] = {{"hidden_widths", c.model.hidden_widths},
                {"activation", to_string(c.model.activation)},
                {"residual", c.model.residual},
                {"attention", to_string(c.model.attention)},
                {"dropout", c.model.dropout},
                {"lambda0", c.model.weights.lambda0},
                {"alpha", c.model.weights.alpha}};
  j["mle"] = {{"max_iters", c.mle.max_iters},
              {"convergence_eps", c.mle.convergence_eps},
              {"dilution", c.mle.dilution}};
  j["monitor"] = {{"severity_threshold", c.severity_threshold},
                  {"fidelity_threshold", c.fidelity_threshold}};
  j["ablation_configs"] = c.ablation_configs;
  j["threads"] = c.threads;
  j["single_thread"] = c.single_thread;
  j["paper_scale"] = c.paper_scale;
  j["memory_cap_gb"] = c.memory_cap_gb;
  j["out_dir"] = c.out_dir.string();
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j,
               {"experiment", "qubits", "dims", "data", "methods", "seeds", "train", "baseline_lr", "model",
                "mle", "monitor", "ablation_configs", "threads", "single_thread", "paper_scale",
                "memory_cap_gb", "out_dir"},
               "config");
    ExperimentConfig c = default_config(
        experiment_kind_from_string(j.value("experiment", to_string(ExperimentKind::Scalability))));
    read(j, "qubits", c.qubit_grid);
    read(j, "dims", c.dim_grid);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      check_keys(d,
                 {"settings", "shots", "gauss_sigma", "n_train", "n_test", "noise_grid", "noise_kinds",
                  "noise_mode", "exact"},
                 "data");
      read(d, "settings", c.data.settings);
      read(d, "shots", c.data.shots);
      read(d, "gauss_sigma", c.data.gauss_sigma);
      read(d, "n_train", c.data.n_train);
      read(d, "n_test", c.data.n_test);
      read(d, "noise_grid", c.data.noise_grid);
      if (d.contains("noise_kinds")) {
        c.data.noise_kinds.clear();
        for (const auto& k : d.at("noise_kinds")) c.data.noise_kinds.push_back(noise_kind_from_string(k));
      }
      if (d.contains("noise_mode")) c.data.noise_mode = noise_mode_from_string(d.at("noise_mode"));
      read(d, "exact", c.data.exact);
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m));
    }
    read(j, "seeds", c.seeds);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      check_keys(t,
                 {"epochs", "batch_size", "lr", "lr_min", "warmup_epochs", "aux_weight", "weight_decay",
                  "clip_norm", "eval_every", "lambda_flow_through", "physics_on_raw"},
                 "train");
      read(t, "epochs", c.train.epochs);
      read(t, "batch_size", c.train.batch_size);
      read(t, "lr", c.train.lr);
      read(t, "lr_min", c.train.lr_min);
      read(t, "warmup_epochs", c.train.warmup_epochs);
      read(t, "aux_weight", c.train.aux_weight);
      read(t, "weight_decay", c.train.adam.weight_decay);
      read(t, "clip_norm", c.train.adam.clip_norm);
      read(t, "eval_every", c.train.eval_every);
      read(t, "lambda_flow_through", c.train.lambda_flow_through);
      read(t, "physics_on_raw", c.train.physics_on_raw);
    }
    read(j, "baseline_lr", c.baseline_lr);
    if (j.contains("model")) {
      const auto& m = j.at("model");
      check_keys(m, {"hidden_widths", "activation", "residual", "attention", "dropout", "lambda0", "alpha"},
                 "model");
      read(m, "hidden_widths", c.model.hidden_widths);
      if (m.contains("activation")) c.model.activation = activation_from_string(m.at("activation"));
      read(m, "residual", c.model.residual);
      if (m.contains("attention")) c.model.attention = attention_from_string(m.at("attention"));
      read(m, "dropout", c.model.dropout);
      read(m, "lambda0", c.model.weights.lambda0);
      read(m, "alpha", c.model.weights.alpha);
    }
    if (j.contains("mle")) {
      const auto& m = j.at("mle");
      check_keys(m, {"max_iters", "convergence_eps", "dilution"}, "mle");
      read(m, "max_iters", c.mle.max_iters);
      read(m, "convergence_eps", c.mle.convergence_eps);
      read(m, "dilution", c.mle.dilution);
    }
    if (j.contains("monitor")) {
      const auto& m = j.at("monitor");
      check_keys(m, {"severity_threshold", "fidelity_threshold"}, "monitor");
      read(m, "severity_threshold", c.severity_threshold);
      read(m, "fidelity_threshold", c.fidelity_threshold);
    }
    read(j, "ablation_configs", c.ablation_configs);
    read(j, "threads", c.threads);
    read(j, "single_thread", c.single_thread);
    read(j, "paper_scale", c.paper_scale);
    read(j, "memory_cap_gb", c.memory_cap_gb);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return config_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

}  // namespace qst

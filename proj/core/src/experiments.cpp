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


#include "qstpinn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "qstpinn/classical.hpp"
#include "qstpinn/errors.hpp"
#include "qstpinn/pinn.hpp"

namespace qst {

namespace {

constexpr std::uint64_t kTagSettings = 1;
constexpr std::uint64_t kTagTrain = 2;
constexpr std::uint64_t kTagTest = 3;
constexpr std::uint64_t kTagModel = 4;

const char* kGeneralizedLabel = "generalized_basis_qualitative";

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t worker_count(const ExperimentConfig& cfg) {
  if (cfg.single_thread) return 1;
  if (cfg.threads == 0) return std::max(1u, std::thread::hardware_concurrency());
  return cfg.threads;
}

ReportRow make_row(const ExperimentConfig& cfg, Method m, std::string config, std::size_t dim, double level,
                   std::uint64_t seed, const MethodResult& r) {
  ReportRow row;
  row.experiment = to_string(cfg.experiment);
  row.method = to_string(m);
  row.config = std::move(config);
  row.dim = dim;
  row.noise_level = level;
  row.seed = seed;
  row.fidelity_mean = r.fidelity_mean;
  row.fidelity_std = r.fidelity_std;
  row.violation_mean = r.violation_mean;
  row.raw_violation_mean = r.raw_violation_mean;
  row.mse = r.mse;
  row.mean_lambda = r.mean_lambda;
  row.wall_time_s = r.wall_time_s;
  row.n_test = r.n_test;
  if (!qubit_count(dim)) row.label = kGeneralizedLabel;
  return row;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string level_tag(double v) { return format_double(v); }

void guard_memory(const ExperimentConfig& cfg, std::size_t dim, std::size_t n_train) {
  ModelOptions opts = cfg.model;
  PinnModel probe(dim, settings_for(cfg, dim), opts);
  const double bytes = estimate_training_bytes(probe.spec(), n_train, cfg.train.batch_size);
  const double cap = cfg.memory_cap_gb * 1024.0 * 1024.0 * 1024.0;
  if (bytes > cap) {
    std::ostringstream os;
    os << "estimated training memory " << bytes / (1024.0 * 1024.0) << " MiB for dim " << dim << " ("
       << probe.net().parameter_count() << " parameters, " << n_train << " training samples) exceeds the cap of "
       << cfg.memory_cap_gb << " GiB";
    throw CapacityError(os.str());
  }
}

}  // namespace

std::vector<std::size_t> experiment_dims(const ExperimentConfig& cfg) {
  if (!cfg.dim_grid.empty()) return cfg.dim_grid;
  std::vector<std::size_t> dims;
  for (auto n : cfg.qubit_grid) dims.push_back(std::size_t{1} << n);
  return dims;
}

std::vector<NoiseKind> usable_kinds(const std::vector<NoiseKind>& kinds, std::size_t dim) {
  if (qubit_count(dim)) return kinds;
  std::vector<NoiseKind> out;
  for (auto k : kinds) {
    if (k == NoiseKind::Crosstalk) out.push_back(k);
  }
  return out;
}

std::size_t settings_for(const ExperimentConfig& cfg, std::size_t dim) {
  const std::size_t full = dim * dim - 1;
  if (cfg.data.settings > 0) return std::min(cfg.data.settings, full);
  if (auto n = qubit_count(dim)) return default_settings(*n);
  return full;
}

Dataset generate_split(const SplitRequest& req) {
  if (req.settings.empty()) throw DomainError("generate_split: no settings");
  if (req.levels.empty()) throw DomainError("generate_split: no noise levels");
  const auto n = qubit_count(req.dim);
  std::vector<StateKind> families;
  if (n && *n >= 2) {
    families = {StateKind::GHZ, StateKind::W, StateKind::RandomPure, StateKind::RandomMixed};
  } else if (n) {
    families = {StateKind::GHZ, StateKind::RandomPure, StateKind::RandomMixed};
  } else {
    families = {StateKind::RandomPure, StateKind::RandomMixed};
  }
  const auto kinds = usable_kinds(req.kinds, req.dim);

  Dataset ds;
  ds.dim = req.dim;
  ds.settings = req.settings;
  ds.meta.split = req.split;
  ds.meta.shots = req.shots;
  ds.meta.gauss_sigma = req.gauss_sigma;
  ds.meta.noise_grid = req.levels;
  ds.meta.noise_kinds = kinds;
  ds.meta.seed = req.seed;
  ds.meta.exact = req.exact;
  ds.meta.generalized = !n.has_value();
  ds.records.reserve(req.count);
  for (std::size_t i = 0; i < req.count; ++i) {
    Rng rng(derive_seed(req.seed, i));
    const StateKind family = families[i % families.size()];
    DensityMatrix clean = DensityMatrix::maximally_mixed(req.dim);
    switch (family) {
      case StateKind::GHZ: clean = make_ghz(*n); break;
      case StateKind::W: clean = make_w(*n); break;
      case StateKind::RandomPure: clean = random_pure(req.dim, rng); break;
      case StateKind::RandomMixed: {
        const std::size_t k = 2 + static_cast<std::size_t>(rng() % (req.dim - 1));
        clean = random_mixed(req.dim, k, rng);
        break;
      }
    }
    const double nu = req.levels.size() == 1 ? req.levels.front() : req.levels[rng() % req.levels.size()];
    const auto specs = severity_stack(nu, kinds);
    const DensityMatrix noisy = apply_noise_stack(clean, specs, rng);
    RecordParams params;
    params.shots = req.shots;
    params.gauss_sigma = systematic_sigma(req.gauss_sigma, nu);
    params.noise_level = nu;
    params.noise_kinds = kinds;
    params.family = family;
    params.exact = req.exact;
    ds.records.push_back(make_record(noisy, clean, req.settings, params, rng));
  }
  return ds;
}

DatasetPair generate_datasets(const ExperimentConfig& cfg, std::size_t dim, std::vector<double> levels,
                              std::vector<NoiseKind> kinds, std::size_t n_train, std::size_t n_test,
                              std::uint64_t seed) {
  Rng srng(stream_seed(seed, kTagSettings));
  const std::size_t d = settings_for(cfg, dim);
  const auto mode = d == dim * dim - 1 ? SettingMode::FullPauli : SettingMode::RandomSubset;
  SplitRequest req;
  req.dim = dim;
  req.settings = choose_settings(dim, d, srng, mode);
  req.levels = std::move(levels);
  req.kinds = std::move(kinds);
  req.shots = cfg.data.shots;
  req.gauss_sigma = cfg.data.gauss_sigma;
  req.exact = cfg.data.exact;

  DatasetPair out;
  req.count = n_train;
  req.seed = stream_seed(seed, kTagTrain);
  req.split = "train";
  out.train = generate_split(req);
  req.count = n_test;
  req.seed = stream_seed(seed, kTagTest);
  req.split = "test";
  out.test = generate_split(req);
  return out;
}

void save_dataset_pair(const DatasetPair& data, const std::filesystem::path& dir) {
  save_dataset(data.train, dir / "train");
  save_dataset(data.test, dir / "test");
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double estimate_training_bytes(const MlpSpec& spec, std::size_t n_train, std::size_t batch) {
  double params = 0.0, acts = 0.0;
  std::size_t in = spec.input_dim;
  for (auto w : spec.hidden_widths) {
    params += static_cast<double>(in * w + w);
    if (in != w) params += static_cast<double>(in * w);
    acts += static_cast<double>(w);
    in = w;
  }
  params += static_cast<double>(in * spec.output_dim + spec.output_dim);
  // value, grad, two moments, snapshot, tape copy
  const double param_bytes = 6.0 * 8.0 * params;
  const double act_bytes = 8.0 * 8.0 * acts * static_cast<double>(batch);
  const double data_bytes = 8.0 * static_cast<double>(n_train) *
                            static_cast<double>(spec.input_dim + spec.output_dim + 16);
  return param_bytes + act_bytes + data_bytes;
}

MethodResult run_method(Method method, const ExperimentConfig& cfg, const DatasetPair& data,
                        const ModelOptions& model, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  MethodResult out;
  const std::size_t dim = data.test.dim;
  out.n_test = data.test.size();
  if (out.n_test == 0) throw DomainError("run_method: empty test split");

  if (method == Method::PINN || method == Method::NN) {
    const ModelOptions opts = method == Method::NN ? baseline_options(model) : model;
    TrainConfig tc = cfg.train;
    tc.seed = stream_seed(seed, kTagModel);
    tc.checkpoint_path.reset();
    if (method == Method::NN) tc.lr = cfg.baseline_lr;
    tc.lr_min = std::min(tc.lr_min, tc.lr);
    PinnModel net(dim, data.train.feature_dim(), opts);
    train(net, data.train, nullptr, tc);
    const EvalSummary ev = evaluate(net, data.test);
    out.fidelity_mean = ev.fidelity_mean;
    out.fidelity_std = ev.fidelity_std;
    out.violation_mean = ev.violation_mean;
    out.raw_violation_mean = ev.raw_violation_mean;
    out.mse = ev.mse;
    out.mean_lambda = ev.mean_lambda;
    out.fidelities = ev.fidelities;
    if (net.has_severity_head()) {
      const Prediction pred = predict(net, make_batch(data.test).x);
      out.severities.assign(pred.severity.data(), pred.severity.data() + pred.severity.size());
    }
  } else {
    double viol = 0.0, se = 0.0;
    for (const auto& rec : data.test.records) {
      const DensityMatrix rho =
          method == Method::LS ? least_squares_reconstruct(rec) : mle_rhor_reconstruct(rec, cfg.mle);
      const DensityMatrix target = cholesky_to_rho(CholeskyFactor::unflatten(dim, rec.target_cholesky));
      out.fidelities.push_back(fidelity(rho, target));
      viol += constraint_violation(rho.matrix());
      const auto p = rho_to_cholesky(rho).flatten();
      for (std::size_t k = 0; k < p.size(); ++k) se += (p[k] - rec.target_cholesky[k]) * (p[k] - rec.target_cholesky[k]);
    }
    const double n = static_cast<double>(out.n_test);
    out.fidelity_mean = mean_of(out.fidelities);
    double var = 0.0;
    for (double f : out.fidelities) var += (f - out.fidelity_mean) * (f - out.fidelity_mean);
    out.fidelity_std = out.n_test > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    out.violation_mean = viol / n;
    out.raw_violation_mean = out.violation_mean;
    out.mse = se / (n * static_cast<double>(dim * dim));
  }
  out.wall_time_s = seconds_since(t0);
  return out;
}

SweepComparison compare_sweep(const std::vector<ReportRow>& rows, const std::string& a, const std::string& b) {
  // (level, seed) -> fidelity for each method
  std::map<std::pair<double, std::uint64_t>, double> fa, fb;
  for (const auto& r : rows) {
    if (r.method == a) fa[{r.noise_level, r.seed}] = r.fidelity_mean;
    if (r.method == b) fb[{r.noise_level, r.seed}] = r.fidelity_mean;
  }
  std::map<double, std::vector<std::pair<double, double>>> by_level;
  std::vector<double> xa, ya, xb, yb, all_a, all_b;
  for (const auto& [key, va] : fa) {
    auto it = fb.find(key);
    if (it == fb.end()) continue;
    by_level[key.first].push_back({va, it->second});
    xa.push_back(key.first);
    ya.push_back(va);
    xb.push_back(key.first);
    yb.push_back(it->second);
    all_a.push_back(va);
    all_b.push_back(it->second);
  }
  if (by_level.size() < 2) throw DomainError("compare_sweep: need at least two noise levels");

  SweepComparison out;
  for (const auto& [level, pairs] : by_level) {
    std::vector<double> da, db, diff;
    for (const auto& [x, y] : pairs) {
      da.push_back(x);
      db.push_back(y);
      diff.push_back(x - y);
    }
    out.levels.push_back(level);
    out.delta.push_back(mean_of(diff));
    out.delta_ci.push_back(mean_ci95(diff));
    out.p_values.push_back(pairs.size() >= 2 ? paired_t_test(da, db).p_value : 1.0);
    if (out.delta.back() >= 0.0) ++out.nonnegative_levels;
  }
  out.fit_a = ols(xa, ya);
  out.fit_b = ols(xb, yb);
  const double sa = std::abs(out.fit_a.slope), sb = std::abs(out.fit_b.slope);
  out.ratio = sa == sb ? 1.0 : sb / std::max(sa, 1e-15);
  out.p_overall = all_a.size() >= 2 ? paired_t_test(all_a, all_b).p_value : 1.0;
  return out;
}

namespace {

ExperimentReport run_level_sweep(const ExperimentConfig& cfg, bool monitor) {
  cfg.validate();
  const auto dims = experiment_dims(cfg);
  const auto& levels = cfg.data.noise_grid;

  struct Group {
    std::string name;
    std::vector<NoiseKind> kinds;
  };
  std::vector<Group> groups;
  if (cfg.data.noise_mode == NoiseMode::PerChannel) {
    for (auto k : cfg.data.noise_kinds) groups.push_back({to_string(k), {k}});
  } else {
    groups.push_back({to_string(NoiseMode::AllChannels), cfg.data.noise_kinds});
  }

  struct DataKey {
    std::size_t dim, group, level;
    std::uint64_t seed;
  };
  std::vector<DataKey> keys;
  for (std::size_t di = 0; di < dims.size(); ++di) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t l = 0; l < levels.size(); ++l) {
        for (auto s : cfg.seeds) keys.push_back({dims[di], g, l, s});
      }
    }
  }
  const std::size_t threads = worker_count(cfg);
  std::vector<DatasetPair> data(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    const auto& k = keys[i];
    const auto n = qubit_count(k.dim);
    const auto [n_train, n_test] = default_split(cfg, n ? *n : 3);
    const std::uint64_t seed = stream_seed(k.seed, 1000 * k.dim + 100 * k.group + k.level);
    data[i] = generate_datasets(cfg, k.dim, {levels[k.level]}, groups[k.group].kinds, n_train, n_test, seed);
  });

  const std::size_t n_methods = cfg.methods.size();
  std::vector<MethodResult> results(keys.size() * n_methods);
  parallel_for(results.size(), threads, [&](std::size_t c) {
    const auto& k = keys[c / n_methods];
    results[c] = run_method(cfg.methods[c % n_methods], cfg, data[c / n_methods], cfg.model, k.seed);
  });

  ExperimentReport rep;
  rep.experiment = to_string(cfg.experiment);
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto& k = keys[c / n_methods];
    rep.rows.push_back(make_row(cfg, cfg.methods[c % n_methods], groups[k.group].name, k.dim,
                                levels[k.level], k.seed, results[c]));
    if (monitor && cfg.methods[c % n_methods] == Method::PINN) {
      const auto& r = results[c];
      for (std::size_t i = 0; i < r.fidelities.size(); ++i) {
        const double sev = r.severities.empty() ? 0.0 : r.severities[i];
        const bool sev_alarm = sev > cfg.severity_threshold;
        const bool fid_alarm = r.fidelities[i] < cfg.fidelity_threshold;
        if (sev_alarm || fid_alarm) {
          rep.alarms.push_back({k.dim, levels[k.level], k.seed, i, sev, r.fidelities[i],
                                sev_alarm && fid_alarm ? "severity_and_fidelity"
                                : sev_alarm            ? "severity"
                                                       : "fidelity"});
        }
      }
    }
  }

  const bool has_pinn = std::count(cfg.methods.begin(), cfg.methods.end(), Method::PINN) > 0;
  const bool has_nn = std::count(cfg.methods.begin(), cfg.methods.end(), Method::NN) > 0;
  auto emit_stats = [&](const std::string& prefix, const std::vector<ReportRow>& sub) {
    for (auto m : cfg.methods) {
      std::vector<double> x, y;
      for (const auto& r : sub) {
        if (r.method == to_string(m)) {
          x.push_back(r.noise_level);
          y.push_back(r.fidelity_mean);
        }
      }
      if (levels.size() >= 2) {
        const auto fit = ols(x, y);
        rep.stats.push_back({prefix + "slope_" + to_string(m), fit.slope});
        rep.stats.push_back({prefix + "intercept_" + to_string(m), fit.intercept});
      }
      rep.stats.push_back({prefix + "mean_fidelity_" + to_string(m), mean_of(y)});
    }
    if (has_pinn) {
      for (double lvl : levels) {
        std::vector<double> lam;
        for (const auto& r : sub) {
          if (r.method == "pinn" && r.noise_level == lvl) lam.push_back(r.mean_lambda);
        }
        rep.stats.push_back({prefix + "mean_lambda@" + level_tag(lvl), mean_of(lam)});
      }
    }
    if (has_pinn && has_nn && levels.size() >= 2) {
      const auto cmp = compare_sweep(sub, "pinn", "nn");
      for (std::size_t i = 0; i < cmp.levels.size(); ++i) {
        const std::string tag = level_tag(cmp.levels[i]);
        rep.stats.push_back({prefix + "delta_f@" + tag, cmp.delta[i]});
        rep.stats.push_back({prefix + "delta_ci95_lo@" + tag, cmp.delta_ci[i].lo});
        rep.stats.push_back({prefix + "delta_ci95_hi@" + tag, cmp.delta_ci[i].hi});
        rep.stats.push_back({prefix + "p_value@" + tag, cmp.p_values[i]});
      }
      rep.stats.push_back({prefix + "nonnegative_delta_levels", static_cast<double>(cmp.nonnegative_levels)});
      rep.stats.push_back({prefix + "ratio_R", cmp.ratio});
      rep.stats.push_back({prefix + "p_value_overall", cmp.p_overall});
    }
  };

  for (auto dim : dims) {
    const std::string dim_prefix = dims.size() > 1 ? "dim" + std::to_string(dim) + "." : "";
    for (const auto& g : groups) {
      std::vector<ReportRow> sub;
      for (const auto& r : rep.rows) {
        if (r.dim == dim && r.config == g.name) sub.push_back(r);
      }
      emit_stats(groups.size() > 1 ? dim_prefix + g.name + "." : dim_prefix, sub);
    }
    if (groups.size() > 1) {
      // Per-channel mode: average each (method, level, seed) cell over channel
      // types, then analyze the averaged sweep without a group prefix.
      std::map<std::tuple<std::string, double, std::uint64_t>, std::vector<const ReportRow*>> cells;
      for (const auto& r : rep.rows) {
        if (r.dim == dim) cells[{r.method, r.noise_level, r.seed}].push_back(&r);
      }
      std::vector<ReportRow> avg;
      for (const auto& [key, rows] : cells) {
        ReportRow a = *rows.front();
        a.config = "mean_over_types";
        double f = 0.0, lam = 0.0;
        for (const auto* r : rows) {
          f += r->fidelity_mean;
          lam += r->mean_lambda;
        }
        a.fidelity_mean = f / static_cast<double>(rows.size());
        a.mean_lambda = lam / static_cast<double>(rows.size());
        avg.push_back(std::move(a));
      }
      emit_stats(dim_prefix, avg);
    }
  }
  if (monitor) rep.stats.push_back({"alarm_count", static_cast<double>(rep.alarms.size())});
  rep.validate();
  return rep;
}

}  // namespace

ExperimentReport run_monitoring(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::Monitor) throw ConfigError("run_monitoring: experiment must be monitor");
  return run_level_sweep(cfg, true);
}

ExperimentReport run_noise_robustness(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::NoiseRobustness) {
    throw ConfigError("run_noise_robustness: experiment must be robustness");
  }
  if (cfg.data.noise_grid.size() < 2) throw DomainError("noise robustness needs at least two noise levels");
  if (cfg.seeds.size() < 2) throw DomainError("noise robustness needs at least two seeds");
  return run_level_sweep(cfg, false);
}

ExperimentReport run_scalability(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::Scalability) {
    throw ConfigError("run_scalability: experiment must be scalability");
  }
  cfg.validate();
  const auto dims = experiment_dims(cfg);
  for (auto dim : dims) {
    const auto n = qubit_count(dim);
    if (n && (*n < 2 || *n > 5)) throw ConfigError("scalability qubit counts must lie in [2, 5]");
    const bool nets = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                  [](Method m) { return m == Method::PINN || m == Method::NN; });
    if (nets) guard_memory(cfg, dim, default_split(cfg, n ? *n : 3).first);
  }

  struct DataKey {
    std::size_t dim;
    std::uint64_t seed;
  };
  std::vector<DataKey> keys;
  for (auto dim : dims) {
    for (auto s : cfg.seeds) keys.push_back({dim, s});
  }
  const std::size_t threads = worker_count(cfg);
  std::vector<DatasetPair> data(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    const auto n = qubit_count(keys[i].dim);
    const auto [n_train, n_test] = default_split(cfg, n ? *n : 3);
    data[i] = generate_datasets(cfg, keys[i].dim, cfg.data.noise_grid, cfg.data.noise_kinds, n_train, n_test,
                                stream_seed(keys[i].seed, 1000 * keys[i].dim));
  });
  const std::size_t n_methods = cfg.methods.size();
  std::vector<MethodResult> results(keys.size() * n_methods);
  parallel_for(results.size(), threads, [&](std::size_t c) {
    results[c] = run_method(cfg.methods[c % n_methods], cfg, data[c / n_methods], cfg.model, keys[c / n_methods].seed);
  });

  ExperimentReport rep;
  rep.experiment = to_string(cfg.experiment);
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto& k = keys[c / n_methods];
    rep.rows.push_back(make_row(cfg, cfg.methods[c % n_methods], "", k.dim, kMixedNoiseLevel, k.seed, results[c]));
  }
  for (auto dim : dims) {
    std::map<std::string, std::vector<double>> fids;
    for (const auto& r : rep.rows) {
      if (r.dim == dim) fids[r.method].push_back(r.fidelity_mean);
    }
    const std::string prefix = "dim" + std::to_string(dim) + ".";
    for (auto m : cfg.methods) rep.stats.push_back({prefix + "mean_fidelity_" + to_string(m), mean_of(fids[to_string(m)])});
    if (!fids.contains("pinn")) continue;
    const double fp = mean_of(fids["pinn"]);
    for (auto m : cfg.methods) {
      if (m == Method::PINN) continue;
      const double fm = mean_of(fids[to_string(m)]);
      rep.stats.push_back({prefix + "delta_vs_" + to_string(m), fp - fm});
      rep.stats.push_back({prefix + "rel_improvement_vs_" + to_string(m), fm > 0.0 ? (fp - fm) / fm : 0.0});
      if (cfg.seeds.size() >= 2) {
        rep.stats.push_back({prefix + "p_value_vs_" + to_string(m), paired_t_test(fids["pinn"], fids[to_string(m)]).p_value});
      }
    }
  }
  rep.validate();
  return rep;
}

const std::vector<std::string>& ablation_names() {
  static const std::vector<std::string> names = {"full",           "no_residual",    "no_attention",
                                                 "fixed_lambda_0.05", "fixed_lambda_0.15", "fixed_lambda_0.30",
                                                 "baseline"};
  return names;
}

ExperimentReport run_ablation(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::Ablation) throw ConfigError("run_ablation: experiment must be ablation");
  cfg.validate();
  std::vector<std::string> configs = cfg.ablation_configs.empty() ? ablation_names() : cfg.ablation_configs;
  struct Variant {
    Method method;
    ModelOptions opts;
  };
  std::vector<Variant> variants;
  for (const auto& name : configs) {
    Variant v{Method::PINN, cfg.model};
    if (name == "full") {
    } else if (name == "no_residual") {
      v.opts.residual = false;
    } else if (name == "no_attention") {
      v.opts.attention = AttentionPlacement::None;
    } else if (name.starts_with("fixed_lambda_")) {
      v.opts.weights.lambda0 = std::stod(name.substr(13));
      v.opts.weights.alpha = 0.0;
    } else if (name == "baseline") {
      v.method = Method::NN;
    } else {
      throw ConfigError("unknown ablation configuration '" + name + "'");
    }
    variants.push_back(v);
  }

  const auto dims = experiment_dims(cfg);
  struct DataKey {
    std::size_t dim;
    std::uint64_t seed;
  };
  std::vector<DataKey> keys;
  for (auto dim : dims) {
    for (auto s : cfg.seeds) keys.push_back({dim, s});
  }
  const std::size_t threads = worker_count(cfg);
  std::vector<DatasetPair> data(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    const auto n = qubit_count(keys[i].dim);
    const auto [n_train, n_test] = default_split(cfg, n ? *n : 3);
    data[i] = generate_datasets(cfg, keys[i].dim, cfg.data.noise_grid, cfg.data.noise_kinds, n_train, n_test,
                                stream_seed(keys[i].seed, 1000 * keys[i].dim));
  });
  const std::size_t nv = variants.size();
  std::vector<MethodResult> results(keys.size() * nv);
  parallel_for(results.size(), threads, [&](std::size_t c) {
    const auto& v = variants[c % nv];
    results[c] = run_method(v.method, cfg, data[c / nv], v.opts, keys[c / nv].seed);
  });

  ExperimentReport rep;
  rep.experiment = to_string(cfg.experiment);
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto& k = keys[c / nv];
    rep.rows.push_back(make_row(cfg, variants[c % nv].method, configs[c % nv], k.dim, kMixedNoiseLevel, k.seed, results[c]));
  }
  for (auto dim : dims) {
    const std::string prefix = dims.size() > 1 ? "dim" + std::to_string(dim) + "." : "";
    std::map<std::string, std::vector<double>> fids;
    for (const auto& r : rep.rows) {
      if (r.dim == dim) fids[r.config].push_back(r.fidelity_mean);
    }
    for (const auto& name : configs) rep.stats.push_back({prefix + "mean_fidelity@" + name, mean_of(fids[name])});
    if (fids.contains("baseline")) {
      const double base = mean_of(fids["baseline"]);
      for (const auto& name : configs) {
        if (name != "baseline") rep.stats.push_back({prefix + "delta_vs_baseline@" + name, mean_of(fids[name]) - base});
      }
    }
  }
  rep.validate();
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Monitor: return run_monitoring(cfg);
    case ExperimentKind::NoiseRobustness: return run_noise_robustness(cfg);
    case ExperimentKind::Scalability: return run_scalability(cfg);
    case ExperimentKind::Ablation: return run_ablation(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

std::string extract_timings(ExperimentReport& report) {
  std::ostringstream os;
  os << "method,config,dim,noise_level,seed,wall_time_s\n";
  for (auto& r : report.rows) {
    os << r.method << ',' << r.config << ',' << r.dim << ',' << format_double(r.noise_level) << ',' << r.seed
       << ',' << format_double(r.wall_time_s) << '\n';
    r.wall_time_s = 0.0;
  }
  return os.str();
}

}  // namespace qst

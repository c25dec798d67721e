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


#include "qstpinn/pinn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "qstpinn/checkpoint.hpp"
#include "qstpinn/errors.hpp"
#include "qstpinn/noise.hpp"

namespace qst {

namespace {

constexpr double kDegenerateTrace = 1e-12;
constexpr double kDegenerateEigen = 1e-10;
constexpr Eigen::Index kEvalBatch = 256;

Eigen::Index sq(std::size_t dim) { return static_cast<Eigen::Index>(dim * dim); }

void check_cols(const Matrix& m, Eigen::Index cols, const char* op) {
  if (m.cols() != cols) {
    throw ShapeError(std::string(op) + ": expected " + std::to_string(cols) + " columns, got " +
                     std::to_string(m.cols()));
  }
}

ComplexMatrix lower_from_params(const Matrix& p, Eigen::Index row, std::size_t dim) {
  ComplexMatrix l(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) l(i, i) = p(row, static_cast<Eigen::Index>(i));
  Eigen::Index k = static_cast<Eigen::Index>(dim);
  for (std::size_t i = 1; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      l(i, j) = Complex(p(row, k), p(row, k + 1));
      k += 2;
    }
  }
  return l;
}

void store_complex(Matrix& m, Eigen::Index row, const ComplexMatrix& c) {
  const std::size_t n = c.rows() * c.cols();
  const auto entries = c.entries();
  for (std::size_t k = 0; k < n; ++k) {
    m(row, static_cast<Eigen::Index>(k)) = entries[k].real();
    m(row, static_cast<Eigen::Index>(n + k)) = entries[k].imag();
  }
}

}  // namespace

void AdaptiveWeightConfig::validate() const {
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0 must be nonnegative");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
}

double adaptive_lambda(double s, const AdaptiveWeightConfig& cfg) {
  return cfg.lambda0 * std::max(kLambdaFloor, 1.0 - cfg.alpha * s);
}

Var adaptive_lambda(Var s, const AdaptiveWeightConfig& cfg, bool flow_through) {
  Tape& t = *s.tape;
  check_cols(t.value(s), 1, "adaptive_lambda");
  Matrix out = t.value(s).unaryExpr([&cfg](double v) { return adaptive_lambda(v, cfg); });
  if (!flow_through) return t.constant(std::move(out));
  const double l0 = cfg.lambda0, a = cfg.alpha;
  return t.record(std::move(out), {s}, [s, l0, a](Tape& tape, const Matrix& g) {
    const Matrix d = tape.value(s).unaryExpr(
        [l0, a](double v) { return 1.0 - a * v > kLambdaFloor ? -l0 * a : 0.0; });
    tape.accumulate(s, g.cwiseProduct(d));
  });
}

ComplexMatrix unpack_complex(const Matrix& m, Eigen::Index row, std::size_t dim) {
  check_cols(m, 2 * sq(dim), "unpack_complex");
  ComplexMatrix c(dim, dim);
  const std::size_t n = dim * dim;
  auto entries = c.entries();
  for (std::size_t k = 0; k < n; ++k) {
    entries[k] = Complex(m(row, static_cast<Eigen::Index>(k)), m(row, static_cast<Eigen::Index>(n + k)));
  }
  return c;
}

Matrix pack_complex(const ComplexMatrix& c) {
  Matrix m(1, static_cast<Eigen::Index>(2 * c.rows() * c.cols()));
  store_complex(m, 0, c);
  return m;
}

Var cholesky_transform(Var y, std::size_t dim) {
  check_cols(y.value(), sq(dim), "cholesky_transform");
  return softplus_cols(y, static_cast<Eigen::Index>(dim));
}

Var gram(Var params, std::size_t dim) {
  Tape& t = *params.tape;
  const Matrix& p = t.value(params);
  check_cols(p, sq(dim), "gram");
  Matrix out(p.rows(), 2 * sq(dim));
  for (Eigen::Index b = 0; b < p.rows(); ++b) {
    const ComplexMatrix l = lower_from_params(p, b, dim);
    store_complex(out, b, matmul(l, l.adjoint()));
  }
  return t.record(std::move(out), {params}, [params, dim](Tape& tape, const Matrix& g) {
    const Matrix& p = tape.value(params);
    Matrix gp(p.rows(), p.cols());
    for (Eigen::Index b = 0; b < p.rows(); ++b) {
      const ComplexMatrix l = lower_from_params(p, b, dim);
      const ComplexMatrix gh = unpack_complex(g, b, dim);
      // d/dL Re<Gh, L L^dag> = (Gh + Gh^dag) L
      const ComplexMatrix m = matmul(gh + gh.adjoint(), l);
      for (std::size_t i = 0; i < dim; ++i) gp(b, static_cast<Eigen::Index>(i)) = m(i, i).real();
      Eigen::Index k = static_cast<Eigen::Index>(dim);
      for (std::size_t i = 1; i < dim; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          gp(b, k) = m(i, j).real();
          gp(b, k + 1) = m(i, j).imag();
          k += 2;
        }
      }
    }
    tape.accumulate(params, gp);
  });
}

Var trace_normalize(Var g, std::size_t dim) {
  Tape& t = *g.tape;
  const Matrix& gv = t.value(g);
  check_cols(gv, 2 * sq(dim), "trace_normalize");
  Matrix out(gv.rows(), gv.cols());
  for (Eigen::Index b = 0; b < gv.rows(); ++b) {
    double tr = 0.0;
    for (std::size_t i = 0; i < dim; ++i) tr += gv(b, static_cast<Eigen::Index>(i * dim + i));
    if (!(tr >= kDegenerateTrace)) {
      throw DegenerateFactorError("trace_normalize: Tr(L L^dagger) = " + std::to_string(tr));
    }
    out.row(b) = gv.row(b) / tr;
  }
  const Var rho{&t, t.size()};
  return t.record(std::move(out), {g}, [g, rho, dim](Tape& tape, const Matrix& up) {
    const Matrix& gv = tape.value(g);
    const Matrix& rv = tape.value(rho);
    Matrix gg(gv.rows(), gv.cols());
    for (Eigen::Index b = 0; b < gv.rows(); ++b) {
      double tr = 0.0;
      for (std::size_t i = 0; i < dim; ++i) tr += gv(b, static_cast<Eigen::Index>(i * dim + i));
      // d/dG of <up, G / t> with t = Re Tr G.
      const double proj = up.row(b).dot(rv.row(b));
      gg.row(b) = up.row(b) / tr;
      for (std::size_t i = 0; i < dim; ++i) gg(b, static_cast<Eigen::Index>(i * dim + i)) -= proj / tr;
    }
    tape.accumulate(g, gg);
  });
}

Var physics_loss(Var m, std::size_t dim) {
  Tape& t = *m.tape;
  const Matrix& mv = t.value(m);
  check_cols(mv, 2 * sq(dim), "physics_loss");
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix out(mv.rows(), 1);
  // Rows with a nonnegative spectrum skip the eigensolve on the backward pass.
  std::vector<bool> indefinite(static_cast<std::size_t>(mv.rows()));
  for (Eigen::Index b = 0; b < mv.rows(); ++b) {
    const ComplexMatrix a = unpack_complex(mv, b, dim);
    const auto v = state_violations(a);
    const double pos = std::max(0.0, -v.min_eigenvalue);
    out(b, 0) = (v.hermiticity * v.hermiticity + v.trace_error * v.trace_error + pos * pos) * norm;
    indefinite[static_cast<std::size_t>(b)] = v.min_eigenvalue < 0.0;
  }
  return t.record(std::move(out), {m}, [m, dim, norm, indefinite](Tape& tape, const Matrix& g) {
    const Matrix& mv = tape.value(m);
    Matrix gm(mv.rows(), mv.cols());
    for (Eigen::Index b = 0; b < mv.rows(); ++b) {
      const ComplexMatrix a = unpack_complex(mv, b, dim);
      const ComplexMatrix e = a - a.adjoint();
      ComplexMatrix grad = e * Complex(4.0);
      const Complex tr = trace(a);
      for (std::size_t i = 0; i < dim; ++i) grad(i, i) += 2.0 * (tr - 1.0);
      if (indefinite[static_cast<std::size_t>(b)]) {
        const ComplexMatrix h = (a + a.adjoint()) * Complex(0.5);
        const auto eig = hermitian_eig(h);
        const double lmin = eig.eigenvalues.front();
        // Average projector over the eigenspace of the smallest eigenvalue.
        ComplexMatrix proj(dim, dim);
        std::size_t mult = 0;
        for (std::size_t k = 0; k < dim && eig.eigenvalues[k] <= lmin + kDegenerateEigen; ++k) {
          ++mult;
          for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
              proj(i, j) += eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
            }
          }
        }
        if (lmin < 0.0) grad += proj * Complex(2.0 * lmin / static_cast<double>(mult));
      }
      grad *= Complex(g(b, 0) * norm);
      store_complex(gm, b, grad);
    }
    tape.accumulate(m, gm);
  });
}

Reconstruction reconstruct_differentiable(Var y, std::size_t dim) {
  Reconstruction r;
  r.params = cholesky_transform(y, dim);
  r.gram = gram(r.params, dim);
  r.rho = trace_normalize(r.gram, dim);
  return r;
}

ModelOptions baseline_options(ModelOptions base) {
  base.aux_head = false;
  base.weights.lambda0 = 0.0;
  return base;
}

PinnModel::PinnModel(std::size_t dim, std::size_t input_dim, const ModelOptions& opts)
    : dim_(dim), weights_(opts.weights) {
  weights_.validate();
  MlpSpec spec;
  spec.input_dim = input_dim;
  if (!opts.hidden_widths.empty()) {
    spec.hidden_widths = opts.hidden_widths;
  } else {
    const auto n = qubit_count(dim);
    spec.hidden_widths = default_hidden_widths(n ? *n : 2);
  }
  spec.output_dim = dim * dim;
  spec.aux_output = opts.aux_head;
  spec.activation = opts.activation;
  spec.residual = opts.residual;
  spec.attention = opts.attention;
  spec.dropout = opts.dropout;
  net_ = Mlp(std::move(spec));
}

PinnModel::PinnModel(std::size_t dim, MlpSpec spec, AdaptiveWeightConfig weights)
    : dim_(dim), net_(std::move(spec)), weights_(weights) {
  weights_.validate();
  if (net_.spec().output_dim != dim * dim) throw ConfigError("PinnModel: head width must be D^2");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(lr_min >= 0.0 && lr_min <= lr)) throw ConfigError("lr_min must lie in [0, lr]");
  if (!(aux_weight >= 0.0)) throw ConfigError("aux_weight must be nonnegative");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
}

TrainConfig baseline_train_config(TrainConfig base) {
  base.lr = 1e-3;
  return base;
}

Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices) {
  const auto d = static_cast<Eigen::Index>(ds.feature_dim());
  const auto p = static_cast<Eigen::Index>(ds.param_dim());
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b{Matrix(n, d), Matrix(n, p), Matrix(n, 1)};
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& rec = ds.records.at(indices[static_cast<std::size_t>(r)]);
    if (rec.target_cholesky.size() != static_cast<std::size_t>(p)) {
      throw DatasetError("record " + std::to_string(indices[static_cast<std::size_t>(r)]) +
                         " has no Cholesky target");
    }
    if (rec.estimates.size() != static_cast<std::size_t>(d)) throw DatasetError("record width mismatch");
    for (Eigen::Index c = 0; c < d; ++c) b.x(r, c) = rec.estimates[static_cast<std::size_t>(c)];
    for (Eigen::Index c = 0; c < p; ++c) b.y(r, c) = rec.target_cholesky[static_cast<std::size_t>(c)];
    b.severity(r, 0) = rec.true_severity;
  }
  return b;
}

Batch make_batch(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return make_batch(ds, idx);
}

LossTerms total_loss(Tape& tape, PinnModel& model, const Batch& batch, const TrainConfig& cfg,
                     bool train, Rng* rng) {
  const auto n = batch.x.rows();
  if (n == 0) throw DomainError("total_loss: empty batch");
  if (batch.y.cols() != sq(model.dim())) throw DatasetError("total_loss: missing Cholesky targets");
  const double inv_b = 1.0 / static_cast<double>(n);

  Var x = tape.constant(batch.x);
  auto out = model.net().forward(tape, x, train, rng);
  Var params = cholesky_transform(out.main, model.dim());

  LossTerms terms;
  Var data = scale(sum(square(sub(params, tape.constant(batch.y)))), inv_b);
  terms.data = data.value()(0, 0);
  Var total = data;

  if (model.physics_enabled()) {
    Var g = gram(params, model.dim());
    Var c = physics_loss(cfg.physics_on_raw ? g : trace_normalize(g, model.dim()), model.dim());
    Var lam;
    if (out.severity) {
      lam = adaptive_lambda(*out.severity, model.weights(), cfg.lambda_flow_through);
    } else {
      lam = tape.constant(Matrix::Constant(n, 1, model.weights().lambda0));
    }
    Var phys = scale(sum(mul(c, lam)), inv_b);
    terms.physics = phys.value()(0, 0);
    terms.mean_lambda = lam.value().mean();
    total = add(total, phys);
  }
  if (out.severity && cfg.aux_weight > 0.0) {
    Var aux = scale(sum(square(sub(*out.severity, tape.constant(batch.severity)))), inv_b);
    terms.aux = aux.value()(0, 0);
    total = add(total, scale(aux, cfg.aux_weight));
  }
  terms.total = total;
  return terms;
}

Prediction predict(PinnModel& model, const Matrix& features) {
  Prediction pred;
  const auto n = features.rows();
  pred.params.resize(n, sq(model.dim()));
  if (model.has_severity_head()) pred.severity.resize(n, 1);
  for (Eigen::Index start = 0; start < n; start += kEvalBatch) {
    const auto len = std::min(kEvalBatch, n - start);
    Tape tape;
    auto out = model.net().forward(tape, tape.constant(features.middleRows(start, len)), false, nullptr);
    pred.params.middleRows(start, len) = cholesky_transform(out.main, model.dim()).value();
    if (out.severity) pred.severity.middleRows(start, len) = out.severity->value();
  }
  return pred;
}

std::vector<DensityMatrix> reconstruct_states(const Prediction& pred, std::size_t dim) {
  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(pred.params.rows()));
  for (Eigen::Index r = 0; r < pred.params.rows(); ++r) {
    out.push_back(cholesky_to_rho(CholeskyFactor::from_lower(lower_from_params(pred.params, r, dim))));
  }
  return out;
}

EvalSummary evaluate(PinnModel& model, const Dataset& split) {
  if (split.size() == 0) throw DomainError("evaluate: empty split");
  if (split.dim != model.dim()) throw ShapeError("evaluate: dataset dimension differs from the model");
  const Batch all = make_batch(split);
  const Prediction pred = predict(model, all.x);
  const std::size_t dim = model.dim();

  EvalSummary s;
  s.n = split.size();
  std::map<double, std::vector<double>> fid_by_level;
  std::map<double, std::vector<double>> lam_by_level;
  double se = 0.0, sev_err = 0.0, lam_sum = 0.0, viol = 0.0, raw_viol = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto& rec = split.records[i];
    const ComplexMatrix l = lower_from_params(pred.params, r, dim);
    const ComplexMatrix g = matmul(l, l.adjoint());
    const DensityMatrix rho = cholesky_to_rho(CholeskyFactor::from_lower(l));
    const DensityMatrix target = cholesky_to_rho(CholeskyFactor::unflatten(dim, rec.target_cholesky));
    const double f = fidelity(rho, target);
    s.fidelities.push_back(f);
    viol += constraint_violation(rho.matrix());
    raw_viol += constraint_violation(g);
    se += (pred.params.row(r) - all.y.row(r)).squaredNorm();
    double lam = model.weights().lambda0;
    if (model.has_severity_head()) {
      const double sev = pred.severity(r, 0);
      sev_err += std::abs(sev - rec.true_severity);
      lam = adaptive_lambda(sev, model.weights());
    }
    lam_sum += lam;
    fid_by_level[rec.noise_level].push_back(f);
    lam_by_level[rec.noise_level].push_back(lam);
  }
  const double n = static_cast<double>(s.n);
  auto mean_std = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair{m, sd};
  };
  std::tie(s.fidelity_mean, s.fidelity_std) = mean_std(s.fidelities);
  s.violation_mean = viol / n;
  s.raw_violation_mean = raw_viol / n;
  s.mse = se / (n * static_cast<double>(dim * dim));
  s.severity_mae = model.has_severity_head() ? sev_err / n : 0.0;
  s.mean_lambda = lam_sum / n;
  for (const auto& [level, fids] : fid_by_level) {
    LevelStats ls;
    ls.n = fids.size();
    std::tie(ls.fidelity_mean, ls.fidelity_std) = mean_std(fids);
    const auto& lams = lam_by_level[level];
    ls.mean_lambda = std::accumulate(lams.begin(), lams.end(), 0.0) / static_cast<double>(lams.size());
    s.per_level[level] = ls;
  }
  return s;
}

std::string History::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,train_loss,val_loss,fidelity,violation,lr,mean_lambda\n";
  for (const auto& r : rows) {
    os << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.fidelity << ','
       << r.violation << ',' << r.lr << ',' << r.mean_lambda << '\n';
  }
  return os.str();
}

namespace {

nlohmann::json history_to_json(const History& h) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : h.rows) {
    rows.push_back({r.epoch, r.train_loss, r.val_loss, r.fidelity, r.violation, r.lr, r.mean_lambda});
  }
  return rows;
}

History history_from_json(const nlohmann::json& j) {
  History h;
  for (const auto& r : j) {
    h.rows.push_back(HistoryRow{r.at(0).get<std::size_t>(), r.at(1).get<double>(), r.at(2).get<double>(),
                                r.at(3).get<double>(), r.at(4).get<double>(), r.at(5).get<double>(),
                                r.at(6).get<double>()});
  }
  return h;
}

double dataset_loss(PinnModel& model, const Dataset& ds, const TrainConfig& cfg) {
  double total = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += static_cast<std::size_t>(kEvalBatch)) {
    const std::size_t end = std::min(ds.size(), start + static_cast<std::size_t>(kEvalBatch));
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    Tape tape;
    const auto terms = total_loss(tape, model, make_batch(ds, idx), cfg, false, nullptr);
    total += terms.total.value()(0, 0) * static_cast<double>(end - start);
  }
  return total / static_cast<double>(ds.size());
}

}  // namespace

PinnModel load_model(const std::filesystem::path& checkpoint) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  nlohmann::json extra;
  try {
    extra = nlohmann::json::parse(ck.extra);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(checkpoint.string() + ": bad metadata: " + e.what());
  }
  AdaptiveWeightConfig w;
  w.lambda0 = extra.value("lambda0", w.lambda0);
  w.alpha = extra.value("alpha", w.alpha);
  PinnModel model(extra.at("dim").get<std::size_t>(), ck.spec, w);
  AdamW opt(ck.adam, model.net().parameters());
  Rng rng;
  restore_checkpoint(ck, model.net(), opt, rng);
  return model;
}

History train(PinnModel& model, const Dataset& train_split, const Dataset* val, const TrainConfig& cfg,
              const std::optional<std::filesystem::path>& resume) {
  cfg.validate();
  if (train_split.size() == 0) throw DomainError("train: empty training split");
  if (train_split.dim != model.dim()) throw ShapeError("train: dataset dimension differs from the model");
  if (train_split.feature_dim() != model.spec().input_dim) {
    throw ShapeError("train: dataset has " + std::to_string(train_split.feature_dim()) +
                     " settings, model expects " + std::to_string(model.spec().input_dim));
  }

  Rng rng(cfg.seed);
  auto params = model.net().parameters();
  AdamW opt(cfg.adam, params);
  History history;
  std::size_t start_epoch = 0;

  const LrSchedule sched{cfg.lr, cfg.lr_min, cfg.warmup_epochs, cfg.epochs};
  const std::size_t n = train_split.size();
  const std::size_t steps = (n + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<std::size_t> order(n);
  // Snapshot of the last completed epoch whose parameters have since produced a
  // finite loss; `pending` waits for that check. Written out on divergence.
  std::optional<Checkpoint> last_good, pending;
  auto diverged = [&](const std::string& what) {
    std::string where;
    if (last_good && cfg.checkpoint_path) {
      auto path = *cfg.checkpoint_path;
      path += ".last_good";
      save_checkpoint(*last_good, path);
      where = "; last good checkpoint at " + path.string();
    }
    throw TrainingDivergedError(what + where);
  };
  if (resume) {
    Checkpoint ck = load_checkpoint(*resume);
    restore_checkpoint(ck, model.net(), opt, rng);
    history = history_from_json(nlohmann::json::parse(ck.extra).at("history"));
    start_epoch = static_cast<std::size_t>(ck.epoch);
    last_good = std::move(ck);
  } else {
    model.init(rng);
  }
  const std::size_t end_epoch = std::min(cfg.epochs, cfg.stop_after.value_or(cfg.epochs));

  for (std::size_t epoch = start_epoch; epoch < end_epoch; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    double loss_sum = 0.0, lam_sum = 0.0, lr = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t b0 = s * cfg.batch_size;
      const std::size_t b1 = std::min(n, b0 + cfg.batch_size);
      const Batch batch = make_batch(train_split, std::span(order).subspan(b0, b1 - b0));
      for (auto* p : params) p->zero_grad();
      lr = sched.at(epoch, static_cast<double>(s + 1) / static_cast<double>(steps));
      try {
        Tape tape;
        const LossTerms terms = total_loss(tape, model, batch, cfg, true, &rng);
        if (pending && std::isfinite(terms.total.value()(0, 0))) {
          last_good = std::move(pending);
          pending.reset();
        }
        tape.backward(terms.total);
        opt.step(params, lr);
        loss_sum += terms.total.value()(0, 0) * static_cast<double>(b1 - b0);
        lam_sum += terms.mean_lambda * static_cast<double>(b1 - b0);
      } catch (const Error& e) {
        diverged("training diverged at epoch " + std::to_string(epoch) + ", step " + std::to_string(s) + ": " +
                 e.what());
      }
    }

    HistoryRow row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(n);
    row.lr = lr;
    row.mean_lambda = lam_sum / static_cast<double>(n);
    row.val_loss = row.train_loss;
    if (val != nullptr && val->size() > 0) {
      row.val_loss = dataset_loss(model, *val, cfg);
      const bool due = (epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs;
      if (due || history.rows.empty()) {
        const EvalSummary ev = evaluate(model, *val);
        row.fidelity = ev.fidelity_mean;
        row.violation = ev.violation_mean;
      } else {
        row.fidelity = history.rows.back().fidelity;
        row.violation = history.rows.back().violation;
      }
    }
    if (!std::isfinite(row.train_loss) || !std::isfinite(row.val_loss)) {
      diverged("non-finite loss at epoch " + std::to_string(epoch));
    }
    history.rows.push_back(row);

    nlohmann::json extra;
    extra["dim"] = model.dim();
    extra["lambda0"] = model.weights().lambda0;
    extra["alpha"] = model.weights().alpha;
    extra["history"] = history_to_json(history);
    pending = capture_checkpoint(model.net(), opt, rng, epoch + 1, extra.dump());
    if (cfg.checkpoint_path) save_checkpoint(*pending, *cfg.checkpoint_path);
  }
  return history;
}

}  // namespace qst

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


#include "qstpinn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "qstpinn/errors.hpp"

namespace qst {

static_assert(std::endian::native == std::endian::little);

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'T', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

struct Out {
  std::string buf;
  template <typename T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf.append(p, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    buf.append(s);
  }
  void put_sizes(const std::vector<std::size_t>& v) {
    put<std::uint64_t>(v.size());
    for (auto x : v) put<std::uint64_t>(x);
  }
  void put_doubles(const std::vector<double>& v) {
    put<std::uint64_t>(v.size());
    for (auto x : v) put(x);
  }
  void put_matrix(const Matrix& m) {
    put<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    buf.append(reinterpret_cast<const char*>(m.data()), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
};

struct In {
  const std::string& buf;
  std::size_t pos = 0;
  template <typename T>
  T get() {
    if (pos + sizeof(T) > buf.size()) throw IoError("checkpoint: truncated file");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::uint64_t get_count() {
    const auto n = get<std::uint64_t>();
    if (n > buf.size()) throw IoError("checkpoint: corrupt length field");
    return n;
  }
  std::string get_string() {
    const auto n = get_count();
    if (pos + n > buf.size()) throw IoError("checkpoint: truncated string");
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  std::vector<std::size_t> get_sizes() {
    std::vector<std::size_t> v(get_count());
    for (auto& x : v) x = get<std::uint64_t>();
    return v;
  }
  std::vector<double> get_doubles() {
    std::vector<double> v(get_count());
    for (auto& x : v) x = get<double>();
    return v;
  }
  Matrix get_matrix() {
    const auto r = get_count();
    const auto c = get_count();
    const std::size_t bytes = sizeof(double) * r * c;
    if (pos + bytes > buf.size()) throw IoError("checkpoint: truncated matrix");
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    if (bytes) std::memcpy(m.data(), buf.data() + pos, bytes);
    pos += bytes;
    return m;
  }
};

}  // namespace

Checkpoint capture_checkpoint(Mlp& net, const AdamW& opt, const Rng& rng, std::uint64_t epoch,
                              std::string extra) {
  Checkpoint ck;
  ck.spec = net.spec();
  for (auto* p : net.parameters()) {
    ck.names.push_back(p->name);
    ck.params.push_back(p->value);
  }
  ck.adam = opt.config();
  ck.adam_steps = opt.steps();
  ck.first_moments = opt.first_moments();
  ck.second_moments = opt.second_moments();
  ck.rng = rng.state();
  ck.epoch = epoch;
  ck.extra = std::move(extra);
  return ck;
}

void restore_checkpoint(const Checkpoint& ck, Mlp& net, AdamW& opt, Rng& rng) {
  if (!(ck.spec == net.spec())) throw IoError("checkpoint: network spec differs");
  auto params = net.parameters();
  if (params.size() != ck.params.size()) throw IoError("checkpoint: parameter count differs");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->name != ck.names[i] || params[i]->value.rows() != ck.params[i].rows() ||
        params[i]->value.cols() != ck.params[i].cols()) {
      throw IoError("checkpoint: parameter '" + ck.names[i] + "' does not match the network");
    }
    params[i]->value = ck.params[i];
    params[i]->zero_grad();
  }
  opt = AdamW(ck.adam, params);
  if (ck.first_moments.size() != params.size() || ck.second_moments.size() != params.size()) {
    throw IoError("checkpoint: optimizer state size differs");
  }
  opt.first_moments() = ck.first_moments;
  opt.second_moments() = ck.second_moments;
  opt.set_steps(ck.adam_steps);
  rng.set_state(ck.rng);
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  Out o;
  for (char c : kMagic) o.put(c);
  o.put(kVersion);
  const MlpSpec& s = ck.spec;
  o.put<std::uint64_t>(s.input_dim);
  o.put_sizes(s.hidden_widths);
  o.put<std::uint64_t>(s.output_dim);
  o.put<std::uint8_t>(s.aux_output);
  o.put<std::uint8_t>(static_cast<std::uint8_t>(s.activation));
  o.put<std::uint8_t>(s.residual);
  o.put<std::uint8_t>(static_cast<std::uint8_t>(s.attention));
  o.put_doubles(s.dropout);

  o.put<std::uint64_t>(ck.params.size());
  for (std::size_t i = 0; i < ck.params.size(); ++i) {
    o.put_string(ck.names[i]);
    o.put_matrix(ck.params[i]);
    o.put_matrix(ck.first_moments.at(i));
    o.put_matrix(ck.second_moments.at(i));
  }
  o.put(ck.adam.beta1);
  o.put(ck.adam.beta2);
  o.put(ck.adam.eps);
  o.put(ck.adam.weight_decay);
  o.put(ck.adam.clip_norm);
  o.put(ck.adam_steps);
  for (auto w : ck.rng) o.put(w);
  o.put(ck.epoch);
  o.put_string(ck.extra);

  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write checkpoint " + path.string());
  f.write(o.buf.data(), static_cast<std::streamsize>(o.buf.size()));
  if (!f) throw IoError("write failed for checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(f), {}};
  In in{bytes};
  for (char c : kMagic) {
    if (in.get<char>() != c) throw IoError(path.string() + ": not a checkpoint");
  }
  if (in.get<std::uint32_t>() != kVersion) throw IoError(path.string() + ": unsupported version");

  Checkpoint ck;
  MlpSpec& s = ck.spec;
  s.input_dim = in.get<std::uint64_t>();
  s.hidden_widths = in.get_sizes();
  s.output_dim = in.get<std::uint64_t>();
  s.aux_output = in.get<std::uint8_t>() != 0;
  s.activation = static_cast<Activation>(in.get<std::uint8_t>());
  s.residual = in.get<std::uint8_t>() != 0;
  s.attention = static_cast<AttentionPlacement>(in.get<std::uint8_t>());
  s.dropout = in.get_doubles();

  const auto n = in.get_count();
  for (std::uint64_t i = 0; i < n; ++i) {
    ck.names.push_back(in.get_string());
    ck.params.push_back(in.get_matrix());
    ck.first_moments.push_back(in.get_matrix());
    ck.second_moments.push_back(in.get_matrix());
  }
  ck.adam.beta1 = in.get<double>();
  ck.adam.beta2 = in.get<double>();
  ck.adam.eps = in.get<double>();
  ck.adam.weight_decay = in.get<double>();
  ck.adam.clip_norm = in.get<double>();
  ck.adam_steps = in.get<std::uint64_t>();
  for (auto& w : ck.rng) w = in.get<std::uint64_t>();
  ck.epoch = in.get<std::uint64_t>();
  ck.extra = in.get_string();
  if (in.pos != bytes.size()) throw IoError(path.string() + ": trailing bytes");
  return ck;
}

}  // namespace qst

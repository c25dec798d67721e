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


#include "qstpinn/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "qstpinn/errors.hpp"

namespace qst {

static_assert(std::endian::native == std::endian::little,
              "dataset payloads are written in host order and assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'T', 'P', 'D', 'S', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;

using json = nlohmann::json;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_doubles(const std::vector<double>& v) {
    for (double x : v) put(x);
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::string where) : bytes_(bytes), where_(std::move(where)) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw DatasetError(where_ + ": truncated payload");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::vector<double> get_doubles(std::size_t n) {
    std::vector<double> out(n);
    for (auto& x : out) x = get<double>();
    return out;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::string where_;
  std::size_t pos_ = 0;
};

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void Dataset::validate() const {
  if (dim < 2) throw DatasetError("dataset: dim must be >= 2");
  if (settings.empty()) throw DatasetError("dataset: empty settings list");
  for (const auto& s : settings) {
    if (setting_dim(s) != dim) throw DatasetError("dataset: setting dimension mismatch");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string where = "dataset record " + std::to_string(i);
    if (r.settings != settings) throw DatasetError(where + ": settings differ from the manifest");
    if (r.estimates.size() != settings.size()) throw DatasetError(where + ": wrong estimate count");
    if (r.target_cholesky.size() != dim * dim) throw DatasetError(where + ": missing target");
    for (double e : r.estimates) {
      if (!(e >= -1.0 && e <= 1.0)) throw DatasetError(where + ": estimate outside [-1, 1]");
    }
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& stem) {
  ds.validate();
  const std::size_t d = ds.settings.size();
  const std::size_t p = ds.dim * ds.dim;

  Writer w;
  for (char c : kMagic) w.put(c);
  w.put(kFormatVersion);
  w.put<std::uint64_t>(ds.records.size());
  w.put<std::uint64_t>(d);
  w.put<std::uint64_t>(p);
  for (const auto& r : ds.records) {
    w.put_doubles(r.estimates);
    w.put<std::uint64_t>(r.shots);
    w.put(r.noise_level);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(r.noise_kinds.size()));
    for (auto k : r.noise_kinds) w.put(static_cast<std::uint8_t>(k));
    w.put_doubles(r.target_cholesky);
    w.put(r.true_severity);
    w.put(static_cast<std::uint8_t>(r.family));
  }

  json m;
  m["format"] = "qstpinn-dataset";
  m["version"] = kFormatVersion;
  m["dim"] = ds.dim;
  if (auto n = qubit_count(ds.dim)) m["n_qubits"] = *n;
  m["d"] = d;
  m["p"] = p;
  m["count"] = ds.records.size();
  m["split"] = ds.meta.split;
  m["shots"] = ds.meta.shots;
  m["gauss_sigma"] = ds.meta.gauss_sigma;
  m["noise_grid"] = ds.meta.noise_grid;
  json kinds = json::array();
  for (auto k : ds.meta.noise_kinds) kinds.push_back(to_string(k));
  m["noise_kinds"] = kinds;
  m["seed"] = ds.meta.seed;
  m["exact"] = ds.meta.exact;
  m["generalized"] = ds.meta.generalized;
  json labels = json::array();
  for (const auto& s : ds.settings) labels.push_back(setting_label(s));
  m["settings"] = labels;
  m["payload"] = with_ext(stem, ".bin").filename().string();

  write_file(with_ext(stem, ".bin"), w.bytes());
  write_file(with_ext(stem, ".json"), m.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& stem) {
  const auto manifest_path = with_ext(stem, ".json");
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw DatasetError(manifest_path.string() + ": " + e.what());
  }
  Dataset ds;
  try {
    if (m.at("format") != "qstpinn-dataset") throw DatasetError("not a dataset manifest");
    if (m.at("version").get<std::uint32_t>() != kFormatVersion) {
      throw DatasetError("unsupported dataset version");
    }
    ds.dim = m.at("dim").get<std::size_t>();
    ds.meta.split = m.at("split").get<std::string>();
    ds.meta.shots = m.at("shots").get<std::size_t>();
    ds.meta.gauss_sigma = m.at("gauss_sigma").get<double>();
    ds.meta.noise_grid = m.at("noise_grid").get<std::vector<double>>();
    for (const auto& k : m.at("noise_kinds")) {
      ds.meta.noise_kinds.push_back(noise_kind_from_string(k.get<std::string>()));
    }
    ds.meta.seed = m.at("seed").get<std::uint64_t>();
    ds.meta.exact = m.at("exact").get<bool>();
    ds.meta.generalized = m.at("generalized").get<bool>();
    for (const auto& s : m.at("settings")) {
      ds.settings.push_back(parse_setting(s.get<std::string>(), ds.dim));
    }
  } catch (const json::exception& e) {
    throw DatasetError(manifest_path.string() + ": " + e.what());
  }

  const auto payload_path = with_ext(stem, ".bin");
  const std::string bytes = read_file(payload_path);
  Reader r(bytes, payload_path.string());
  for (char c : kMagic) {
    if (r.get<char>() != c) throw DatasetError(payload_path.string() + ": bad magic");
  }
  if (r.get<std::uint32_t>() != kFormatVersion) {
    throw DatasetError(payload_path.string() + ": version mismatch");
  }
  const auto count = r.get<std::uint64_t>();
  const auto d = r.get<std::uint64_t>();
  const auto p = r.get<std::uint64_t>();
  if (d != ds.settings.size() || p != ds.dim * ds.dim || count != m.at("count").get<std::uint64_t>()) {
    throw DatasetError(payload_path.string() + ": header disagrees with manifest");
  }
  ds.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    MeasurementRecord rec;
    rec.settings = ds.settings;
    rec.estimates = r.get_doubles(d);
    rec.shots = r.get<std::uint64_t>();
    rec.noise_level = r.get<double>();
    const auto nk = r.get<std::uint32_t>();
    for (std::uint32_t k = 0; k < nk; ++k) {
      const auto raw = r.get<std::uint8_t>();
      if (raw >= kAllNoiseKinds.size()) throw DatasetError(payload_path.string() + ": bad noise kind");
      rec.noise_kinds.push_back(static_cast<NoiseKind>(raw));
    }
    rec.target_cholesky = r.get_doubles(p);
    rec.true_severity = r.get<double>();
    const auto fam = r.get<std::uint8_t>();
    if (fam > static_cast<std::uint8_t>(StateKind::RandomMixed)) {
      throw DatasetError(payload_path.string() + ": bad state family");
    }
    rec.family = static_cast<StateKind>(fam);
    ds.records.push_back(std::move(rec));
  }
  if (!r.done()) throw DatasetError(payload_path.string() + ": trailing bytes");
  ds.validate();
  return ds;
}

std::vector<double> feature_matrix(const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size() * ds.feature_dim());
  for (const auto& r : ds.records) out.insert(out.end(), r.estimates.begin(), r.estimates.end());
  return out;
}

std::vector<double> target_matrix(const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size() * ds.param_dim());
  for (const auto& r : ds.records) {
    if (r.target_cholesky.size() != ds.param_dim()) throw DatasetError("record without target");
    out.insert(out.end(), r.target_cholesky.begin(), r.target_cholesky.end());
  }
  return out;
}

}  // namespace qst

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


#include "qstpinn/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qstpinn/errors.hpp"

namespace qst {

using json = nlohmann::json;

namespace {

constexpr const char* kCsvHeader =
    "experiment,method,config,dim,noise_level,seed,fidelity_mean,fidelity_std,violation_mean,"
    "raw_violation_mean,mse,mean_lambda,wall_time_s,n_test,label";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw DomainError("bad number '" + s + "'");
  return v;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\"") != std::string::npos) {
    throw DomainError("report text field '" + s + "' contains a reserved character");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string level_label(double v) { return v == kMixedNoiseLevel ? "mixed" : format_double(v); }

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Agg {
  double sum = 0.0;
  std::size_t n = 0;
  std::size_t samples = 0;
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ExperimentReport::validate() const {
  if (rows.empty()) throw DomainError("report has no rows");
  for (const auto& r : rows) {
    if (!(r.fidelity_mean >= 0.0 && r.fidelity_mean <= 1.0)) {
      throw DomainError("report row " + r.method + " has fidelity outside [0, 1]");
    }
    if (!(r.wall_time_s >= 0.0)) throw DomainError("report row " + r.method + " has negative wall time");
    if (r.n_test == 0) throw DomainError("report row " + r.method + " has n_test = 0");
  }
}

double ExperimentReport::stat(const std::string& name) const {
  for (const auto& s : stats) {
    if (s.name == name) return s.value;
  }
  throw DomainError("report has no statistic '" + name + "'");
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    for (const auto* s : {&r.experiment, &r.method, &r.config, &r.label}) check_field(*s);
    os << r.experiment << ',' << r.method << ',' << r.config << ',' << r.dim << ','
       << format_double(r.noise_level) << ',' << r.seed << ',' << format_double(r.fidelity_mean) << ','
       << format_double(r.fidelity_std) << ',' << format_double(r.violation_mean) << ','
       << format_double(r.raw_violation_mean) << ',' << format_double(r.mse) << ','
       << format_double(r.mean_lambda) << ',' << format_double(r.wall_time_s) << ',' << r.n_test << ','
       << r.label << '\n';
  }
  return os.str();
}

std::vector<ReportRow> rows_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw DomainError("report CSV: unexpected header");
  std::vector<ReportRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 15) throw DomainError("report CSV: expected 15 fields, got " + std::to_string(f.size()));
    ReportRow r;
    r.experiment = f[0];
    r.method = f[1];
    r.config = f[2];
    r.dim = std::stoull(f[3]);
    r.noise_level = parse_double(f[4]);
    r.seed = std::stoull(f[5]);
    r.fidelity_mean = parse_double(f[6]);
    r.fidelity_std = parse_double(f[7]);
    r.violation_mean = parse_double(f[8]);
    r.raw_violation_mean = parse_double(f[9]);
    r.mse = parse_double(f[10]);
    r.mean_lambda = parse_double(f[11]);
    r.wall_time_s = parse_double(f[12]);
    r.n_test = std::stoull(f[13]);
    r.label = f[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["experiment"] = report.experiment;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"experiment", r.experiment},
                    {"method", r.method},
                    {"config", r.config},
                    {"dim", r.dim},
                    {"noise_level", r.noise_level},
                    {"seed", r.seed},
                    {"fidelity_mean", r.fidelity_mean},
                    {"fidelity_std", r.fidelity_std},
                    {"violation_mean", r.violation_mean},
                    {"raw_violation_mean", r.raw_violation_mean},
                    {"mse", r.mse},
                    {"mean_lambda", r.mean_lambda},
                    {"wall_time_s", r.wall_time_s},
                    {"n_test", r.n_test},
                    {"label", r.label}});
  }
  j["rows"] = rows;
  json stats = json::array();
  for (const auto& s : report.stats) stats.push_back({{"name", s.name}, {"value", s.value}});
  j["stats"] = stats;
  json alarms = json::array();
  for (const auto& a : report.alarms) {
    alarms.push_back({{"dim", a.dim},
                      {"noise_level", a.noise_level},
                      {"seed", a.seed},
                      {"record", a.record},
                      {"severity", a.severity},
                      {"fidelity", a.fidelity},
                      {"reason", a.reason}});
  }
  j["alarms"] = alarms;
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  ExperimentReport rep;
  try {
    const json j = json::parse(text);
    rep.experiment = j.at("experiment").get<std::string>();
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.experiment = r.at("experiment");
      row.method = r.at("method");
      row.config = r.at("config");
      row.dim = r.at("dim");
      row.noise_level = r.at("noise_level");
      row.seed = r.at("seed");
      row.fidelity_mean = r.at("fidelity_mean");
      row.fidelity_std = r.at("fidelity_std");
      row.violation_mean = r.at("violation_mean");
      row.raw_violation_mean = r.at("raw_violation_mean");
      row.mse = r.at("mse");
      row.mean_lambda = r.at("mean_lambda");
      row.wall_time_s = r.at("wall_time_s");
      row.n_test = r.at("n_test");
      row.label = r.at("label");
      rep.rows.push_back(std::move(row));
    }
    for (const auto& s : j.at("stats")) rep.stats.push_back({s.at("name"), s.at("value")});
    for (const auto& a : j.at("alarms")) {
      rep.alarms.push_back({a.at("dim"), a.at("noise_level"), a.at("seed"), a.at("record"), a.at("severity"),
                            a.at("fidelity"), a.at("reason")});
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("report JSON: ") + e.what());
  }
  return rep;
}

std::string report_summary(const ExperimentReport& report) {
  std::ostringstream os;
  os << "experiment: " << report.experiment << "\n\n";

  // Mean fidelity over seeds per (config/method, dim, level).
  std::map<std::tuple<std::size_t, double, std::string>, Agg> cells;
  std::set<std::string> names;
  std::vector<std::string> order;
  for (const auto& r : report.rows) {
    const std::string name = r.config.empty() ? r.method : r.config;
    if (names.insert(name).second) order.push_back(name);
    auto& a = cells[{r.dim, r.noise_level, name}];
    a.sum += r.fidelity_mean;
    a.n += 1;
    a.samples += r.n_test;
  }
  std::set<std::pair<std::size_t, double>> keys;
  for (const auto& [k, _] : cells) keys.insert({std::get<0>(k), std::get<1>(k)});

  os << "dim  noise";
  for (const auto& n : order) os << "  " << n;
  os << "  samples\n";
  for (const auto& [dim, level] : keys) {
    os << dim << "  " << level_label(level);
    std::size_t samples = 0;
    for (const auto& n : order) {
      auto it = cells.find({dim, level, n});
      if (it == cells.end()) {
        os << "  -";
      } else {
        os << "  " << fixed(it->second.mean());
        samples = std::max(samples, it->second.samples);
      }
    }
    os << "  " << samples << '\n';
  }
  if (!report.stats.empty()) {
    os << "\nstatistics\n";
    for (const auto& s : report.stats) os << s.name << " = " << format_double(s.value) << '\n';
  }
  if (report.experiment == "monitor") os << "\nalarms: " << report.alarms.size() << '\n';
  for (const auto& r : report.rows) {
    if (!r.label.empty()) {
      os << "\nnote: rows labelled '" << r.label << "' use the generalized basis and are qualitative\n";
      break;
    }
  }
  return os.str();
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  report.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.csv", rows_to_csv(report.rows));
  write_text(dir / "report.json", report_to_json(report));
  std::ostringstream stats;
  stats << "name,value\n";
  for (const auto& s : report.stats) {
    check_field(s.name);
    stats << s.name << ',' << format_double(s.value) << '\n';
  }
  write_text(dir / "stats.csv", stats.str());
  write_text(dir / "summary.txt", report_summary(report));
  if (!report.alarms.empty()) {
    std::ostringstream a;
    a << "dim,noise_level,seed,record,severity,fidelity,reason\n";
    for (const auto& e : report.alarms) {
      a << e.dim << ',' << format_double(e.noise_level) << ',' << e.seed << ',' << e.record << ','
        << format_double(e.severity) << ',' << format_double(e.fidelity) << ',' << e.reason << '\n';
    }
    write_text(dir / "alarms.csv", a.str());
  }
}

}  // namespace qst

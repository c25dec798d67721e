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


#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qst {

/// One (method, dimension, noise level, seed) cell. A noise level of -1 marks
/// a dataset drawn from the whole noise grid.
struct ReportRow {
  std::string experiment;
  std::string method;
  std::string config;
  std::size_t dim = 0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;
  double violation_mean = 0.0;
  double raw_violation_mean = 0.0;
  double mse = 0.0;
  double mean_lambda = 0.0;
  double wall_time_s = 0.0;
  std::size_t n_test = 0;
  std::string label;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline constexpr double kMixedNoiseLevel = -1.0;

struct DerivedStat {
  std::string name;
  double value = 0.0;
  friend bool operator==(const DerivedStat&, const DerivedStat&) = default;
};

struct AlarmEvent {
  std::size_t dim = 0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  std::size_t record = 0;
  double severity = 0.0;
  double fidelity = 0.0;
  std::string reason;
  friend bool operator==(const AlarmEvent&, const AlarmEvent&) = default;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<DerivedStat> stats;
  std::vector<AlarmEvent> alarms;

  /// Throws DomainError on an empty report, fidelity outside [0, 1],
  /// negative wall time or n_test == 0.
  void validate() const;
  /// Value of a derived statistic; throws DomainError if absent.
  double stat(const std::string& name) const;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// printf("%.17g").
std::string format_double(double v);

std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_csv(const std::string& text);
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
/// Plain-text tables shaped after the experiment kind.
std::string report_summary(const ExperimentReport& report);

/// Writes report.csv, report.json, stats.csv, summary.txt and, when alarms
/// exist, alarms.csv into `dir`.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace qst

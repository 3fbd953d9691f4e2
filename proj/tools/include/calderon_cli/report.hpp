#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace calderon::cli {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// One pass/fail decision tied to a named acceptance rule.
struct Verdict {
  std::string rule;
  double value;
  double threshold;
  std::string comparator;  // "<=", ">=", ">", "in"
  double upper = 0.0;      // second bound for "in"
  bool passed = false;
};

Verdict check_at_most(std::string rule, double value, double threshold);
Verdict check_at_least(std::string rule, double value, double threshold);
Verdict check_greater(std::string rule, double value, double threshold);
Verdict check_within(std::string rule, double value, double lower, double upper);

struct ExperimentReport {
  std::string command;
  std::string inputs_digest;
  std::map<std::string, double> scalars;
  std::map<std::string, Table> tables;
  std::vector<Verdict> verdicts;
  nlohmann::json details = nlohmann::json::object();
  /// Wall-clock seconds; written to timings.json, never to report.json.
  std::map<std::string, double> timings;

  bool passed() const;
};

enum class ReportFormat { kJson, kCsv, kMarkdown };

nlohmann::json to_json(const ExperimentReport& report);
std::string to_markdown(const ExperimentReport& report);
std::string to_csv(const Table& table);

/// Writes report.json, one CSV per table, summary.md and timings.json into
/// `dir`, each through a temporary file and rename. Throws IoError.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 const std::vector<ReportFormat>& formats = {ReportFormat::kJson, ReportFormat::kCsv,
                                                             ReportFormat::kMarkdown});

/// Writes `content` to `path` via a sibling temporary file and an atomic rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest decimal text that round-trips the double.
std::string format_double(double value);

}  // namespace calderon::cli

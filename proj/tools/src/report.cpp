#include "calderon_cli/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "calderon/error.hpp"

namespace calderon::cli {

Verdict check_at_most(std::string rule, double value, double threshold) {
  return {std::move(rule), value, threshold, "<=", 0.0, value <= threshold};
}

Verdict check_at_least(std::string rule, double value, double threshold) {
  return {std::move(rule), value, threshold, ">=", 0.0, value >= threshold};
}

Verdict check_greater(std::string rule, double value, double threshold) {
  return {std::move(rule), value, threshold, ">", 0.0, value > threshold};
}

Verdict check_within(std::string rule, double value, double lower, double upper) {
  return {std::move(rule), value, lower, "in", upper, value >= lower && value <= upper};
}

bool ExperimentReport::passed() const {
  for (const auto& v : verdicts) {
    if (!v.passed) return false;
  }
  return true;
}

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

namespace {

nlohmann::json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  return std::get<std::string>(cell);
}

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::get<std::string>(cell);
}

std::string verdict_bound(const Verdict& v) {
  if (v.comparator == "in") return "[" + format_double(v.threshold) + ", " + format_double(v.upper) + "]";
  return v.comparator + " " + format_double(v.threshold);
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& [name, table] : report.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& cell : row) r.push_back(cell_json(cell));
      rows.push_back(std::move(r));
    }
    tables[name] = {{"csv", name + ".csv"}, {"columns", table.columns}, {"rows", rows}};
  }
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : report.verdicts) {
    nlohmann::json j = {{"rule", v.rule},
                        {"value", v.value},
                        {"comparator", v.comparator},
                        {"threshold", v.threshold},
                        {"passed", v.passed}};
    if (v.comparator == "in") j["upper"] = v.upper;
    verdicts.push_back(std::move(j));
  }
  return {{"command", report.command},
          {"inputs_digest", report.inputs_digest},
          {"passed", report.passed()},
          {"scalars", report.scalars},
          {"tables", tables},
          {"verdicts", verdicts},
          {"details", report.details}};
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string to_markdown(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# " << report.command << "\n\n";
  out << "Inputs digest: `" << report.inputs_digest << "`\n\n";
  out << "Overall: **" << (report.passed() ? "PASS" : "FAIL") << "**\n\n";
  out << "## Verdicts\n\n| rule | value | bound | result |\n|---|---|---|---|\n";
  for (const auto& v : report.verdicts) {
    out << "| " << v.rule << " | " << format_double(v.value) << " | " << verdict_bound(v) << " | "
        << (v.passed ? "pass" : "FAIL") << " |\n";
  }
  if (!report.scalars.empty()) {
    out << "\n## Scalars\n\n| name | value |\n|---|---|\n";
    for (const auto& [name, value] : report.scalars) out << "| " << name << " | " << format_double(value) << " |\n";
  }
  for (const auto& [name, table] : report.tables) {
    out << "\n## " << name << "\n\n|";
    for (const auto& c : table.columns) out << ' ' << c << " |";
    out << "\n|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& row : table.rows) {
      out << '|';
      for (const auto& cell : row) out << ' ' << cell_text(cell) << " |";
      out << '\n';
    }
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kIoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  for (ReportFormat format : formats) {
    switch (format) {
      case ReportFormat::kJson:
        write_atomic(dir / "report.json", to_json(report).dump(2) + "\n");
        write_atomic(dir / "timings.json", nlohmann::json(report.timings).dump(2) + "\n");
        break;
      case ReportFormat::kCsv:
        for (const auto& [name, table] : report.tables) write_atomic(dir / (name + ".csv"), to_csv(table));
        break;
      case ReportFormat::kMarkdown:
        write_atomic(dir / "summary.md", to_markdown(report));
        break;
    }
  }
}

}  // namespace calderon::cli

#ifndef UAEVAL_IO_H_
#define UAEVAL_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uaeval/metrics.h"
#include "uaeval/rankings.h"

namespace uaeval {

inline constexpr int kReportSchemaVersion = 1;

// One evaluation unit after ingest.
struct CaseRecord {
  std::string case_id;
  int num_classes = 0;
  // Free-form JSON object, kept as compact text.
  std::string metadata = "{}";
  std::vector<std::string> annotator_ids;
  std::vector<PartialRanking> annotations;
  // Optional per-annotation score, used by the score-threshold model.
  std::vector<std::optional<double>> scores;
  std::optional<PredictionSet> prediction;
};

// Reads {"classes": [{"name": "...", "risk": 0 | "low" | ...}, ...]}.
ClassSpace LoadClassSpace(const std::filesystem::path& path);
ClassSpace ParseClassSpace(std::istream& in, const std::string& source);

// Joins line-delimited cases, annotations and (optionally) predictions.
// Class references may be ids or, when `classes` is given, names.
// Throws ParseError (with file:line), UnknownClassName or DanglingCaseId;
// ranking validation errors keep their own code and gain the location.
std::vector<CaseRecord> Ingest(
    const std::filesystem::path& cases,
    const std::filesystem::path& annotations,
    const std::optional<std::filesystem::path>& predictions,
    const ClassSpace* classes = nullptr);

std::vector<CaseRecord> IngestStreams(std::istream& cases,
                                      std::istream& annotations,
                                      std::istream* predictions,
                                      const ClassSpace* classes = nullptr);

// Writes cases.jsonl, annotations.jsonl and, when any record has one,
// predictions.jsonl into `dir`. Class ids are written as integers.
void WriteCaseFiles(const std::filesystem::path& dir,
                    const std::vector<CaseRecord>& records);

// One line of a report file. Case rows carry a per-case value; dataset rows
// add the spread of the dataset mean over posterior samples.
struct ReportRow {
  std::string kind;  // "case" or "dataset"
  std::string model;
  double reliability = 0.0;
  int num_samples = 0;
  uint64_t seed = 0;
  std::string case_id;  // empty on dataset rows
  std::string metric;
  int k = 0;  // j, k, L or class id depending on the metric; 0 if unused
  double value = 0.0;
  std::optional<double> sd;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<int> num_cases;
  std::optional<double> histogram_low;
  std::optional<double> histogram_high;
  std::vector<int> histogram;

  bool operator==(const ReportRow&) const = default;
};

std::string FormatReportRow(const ReportRow& row);
ReportRow ParseReportRow(const std::string& line);
std::vector<ReportRow> ReadReport(const std::filesystem::path& path);

}  // namespace uaeval

#endif  // UAEVAL_IO_H_

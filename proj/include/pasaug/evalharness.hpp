#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pasaug/corpus.hpp"

namespace pasaug {

// An NLI label or a multiple-choice ending index.
using Answer = std::variant<NliLabel, int>;

struct PredictionFile {
  std::map<std::string, Answer> entries;
  std::int64_t seed = 0;
  std::string model_name;
};

// Prediction JSONL: {"id": str, "prediction": str|int}. Duplicate ids are rejected.
PredictionFile read_predictions(const std::filesystem::path& path, std::int64_t seed = 0,
                                std::string model_name = {});

using GoldSet = std::map<std::string, Answer>;

GoldSet gold_from(const std::vector<NliExample>& dataset);
GoldSet gold_from(const std::vector<McExample>& dataset);

// Throws DataError listing missing ids, or on a label/index type mismatch.
double accuracy(const PredictionFile& pred, const GoldSet& gold);

struct SeedSummary {
  double mean = 0;
  double std = 0;  // population (divides by N)
};

SeedSummary aggregate_seeds(const std::vector<double>& accuracies);

// Per-subset accuracy. Gold ids without a tag count toward "other".
std::map<std::string, double> subset_breakdown(const PredictionFile& pred, const GoldSet& gold,
                                               const std::map<std::string, std::string>& tags);

struct ReportRow {
  std::string model_name;
  std::string dataset_name;
  std::string subset_name;
  double mean_accuracy = 0;
  double std_accuracy = 0;
  int n_seeds = 1;

  bool operator==(const ReportRow&) const = default;
};

struct RunReport {
  std::vector<ReportRow> rows;
  std::string std_convention = "population";

  bool operator==(const RunReport&) const = default;
};

enum class ReportFormat { markdown, json, tsv };

ReportFormat parse_report_format(const std::string& name);

// Accuracy in percent with one decimal, rounding halves away from zero.
std::string format_percent(double fraction);

// "mm.m±s.s"
std::string format_cell(double mean, double std);

// Rows are ordered by (model, dataset, subset).
std::string render_report(const RunReport& report, ReportFormat format);

OrderedJson to_json(const RunReport& report);
RunReport report_from_json(const OrderedJson& j);

// Scores every prediction file against `gold` and appends one row per subset
// ("all" plus each tag present) to `report`.
void add_runs(RunReport& report, const std::string& model_name, const std::string& dataset_name,
              const std::vector<PredictionFile>& runs, const GoldSet& gold,
              const std::map<std::string, std::string>* tags = nullptr);

}  // namespace pasaug

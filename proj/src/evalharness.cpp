#include "pasaug/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace pasaug {

PredictionFile read_predictions(const std::filesystem::path& path, std::int64_t seed,
                                std::string model_name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  PredictionFile pred;
  pred.seed = seed;
  pred.model_name = std::move(model_name);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) { throw DataError(path.string() + ": " + why, line_no); };
    OrderedJson j;
    try {
      j = OrderedJson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("prediction")) {
      fail("expected {\"id\": str, \"prediction\": str|int}");
    }
    const auto& p = j["prediction"];
    Answer answer;
    if (p.is_number_integer()) {
      answer = p.get<int>();
    } else if (p.is_string()) {
      auto label = parse_nli_label(p.get<std::string>());
      if (!label) fail("unknown label \"" + p.get<std::string>() + "\"");
      answer = *label;
    } else {
      fail("prediction must be a label string or an ending index");
    }
    const std::string id = j["id"].get<std::string>();
    if (!pred.entries.emplace(id, answer).second) fail("duplicate id \"" + id + "\"");
  }
  return pred;
}

GoldSet gold_from(const std::vector<NliExample>& dataset) {
  GoldSet gold;
  for (const auto& ex : dataset) {
    if (!gold.emplace(ex.id, ex.label).second) throw DataError("duplicate gold id \"" + ex.id + "\"");
  }
  return gold;
}

GoldSet gold_from(const std::vector<McExample>& dataset) {
  GoldSet gold;
  for (const auto& ex : dataset) {
    if (!gold.emplace(ex.id, ex.gold_index).second) throw DataError("duplicate gold id \"" + ex.id + "\"");
  }
  return gold;
}

namespace {

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Checks coverage and types once, then calls `visit(id, is_correct)` per gold id.
template <typename Visit>
void score(const PredictionFile& pred, const GoldSet& gold, Visit visit) {
  std::vector<std::string> missing;
  for (const auto& [id, answer] : gold) {
    auto it = pred.entries.find(id);
    if (it == pred.entries.end()) {
      missing.push_back(id);
      continue;
    }
    if (it->second.index() != answer.index()) {
      throw DataError("prediction for \"" + id + "\" is " +
                      (answer.index() == 0 ? "an index but gold is a label"
                                           : "a label but gold is an index"));
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", \"" : "\"") + missing[i] + "\"";
    throw DataError("predictions missing for " + std::to_string(missing.size()) + " id(s): " + list);
  }
  for (const auto& [id, answer] : gold) visit(id, pred.entries.at(id) == answer);
}

}  // namespace

double accuracy(const PredictionFile& pred, const GoldSet& gold) {
  if (gold.empty()) throw DataError("gold set is empty");
  Tally t;
  score(pred, gold, [&](const std::string&, bool ok) {
    t.correct += ok ? 1 : 0;
    ++t.total;
  });
  return static_cast<double>(t.correct) / static_cast<double>(t.total);
}

SeedSummary aggregate_seeds(const std::vector<double>& accs) {
  if (accs.empty()) throw std::invalid_argument("aggregate_seeds needs at least one value");
  const double n = static_cast<double>(accs.size());
  const double mean = std::accumulate(accs.begin(), accs.end(), 0.0) / n;
  double ss = 0;
  for (double a : accs) ss += (a - mean) * (a - mean);
  return {mean, std::sqrt(ss / n)};
}

std::map<std::string, double> subset_breakdown(const PredictionFile& pred, const GoldSet& gold,
                                               const std::map<std::string, std::string>& tags) {
  std::map<std::string, Tally> tallies;
  score(pred, gold, [&](const std::string& id, bool ok) {
    auto it = tags.find(id);
    Tally& t = tallies[it == tags.end() ? "other" : it->second];
    t.correct += ok ? 1 : 0;
    ++t.total;
  });
  std::map<std::string, double> out;
  for (const auto& [name, t] : tallies) {
    out[name] = static_cast<double>(t.correct) / static_cast<double>(t.total);
  }
  return out;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "json") return ReportFormat::json;
  if (name == "tsv") return ReportFormat::tsv;
  throw std::invalid_argument("unknown report format \"" + name + "\"");
}

std::string format_percent(double fraction) {
  const double tenths = fraction * 1000.0;
  const double floor_tenths = std::floor(tenths);
  long long r;
  if (std::abs(tenths - floor_tenths - 0.5) < 1e-9) {
    r = static_cast<long long>(tenths >= 0 ? floor_tenths + 1 : floor_tenths);
  } else {
    r = std::llround(tenths);
  }
  const bool negative = r < 0;
  const long long a = negative ? -r : r;
  return (negative ? "-" : "") + std::to_string(a / 10) + "." + std::to_string(a % 10);
}

std::string format_cell(double mean, double std) {
  return format_percent(mean) + "±" + format_percent(std);
}

namespace {

std::vector<ReportRow> sorted_rows(const RunReport& report) {
  std::vector<ReportRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.model_name, a.dataset_name, a.subset_name) <
           std::tie(b.model_name, b.dataset_name, b.subset_name);
  });
  return rows;
}

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
  const auto rows = sorted_rows(report);
  std::ostringstream out;
  switch (format) {
    case ReportFormat::markdown:
      out << "| model | dataset | subset | accuracy | seeds |\n";
      out << "|---|---|---|---|---|\n";
      for (const auto& r : rows) {
        out << "| " << r.model_name << " | " << r.dataset_name << " | " << r.subset_name << " | "
            << format_cell(r.mean_accuracy, r.std_accuracy) << " | " << r.n_seeds << " |\n";
      }
      if (!rows.empty()) {
        out << "\nAccuracy in percent, mean±std over seeds (" << report.std_convention
            << " standard deviation).\n";
      }
      break;
    case ReportFormat::tsv:
      out << "model\tdataset\tsubset\tmean_accuracy\tstd_accuracy\tn_seeds\n";
      for (const auto& r : rows) {
        out << r.model_name << '\t' << r.dataset_name << '\t' << r.subset_name << '\t'
            << full_precision(r.mean_accuracy) << '\t' << full_precision(r.std_accuracy) << '\t'
            << r.n_seeds << '\n';
      }
      break;
    case ReportFormat::json: {
      RunReport ordered = report;
      ordered.rows = rows;
      out << to_json(ordered).dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

OrderedJson to_json(const RunReport& report) {
  OrderedJson j = OrderedJson::object();
  j["rows"] = OrderedJson::array();
  for (const auto& r : report.rows) {
    OrderedJson row = OrderedJson::object();
    row["model"] = r.model_name;
    row["dataset"] = r.dataset_name;
    row["subset"] = r.subset_name;
    row["mean_accuracy"] = r.mean_accuracy;
    row["std_accuracy"] = r.std_accuracy;
    row["n_seeds"] = r.n_seeds;
    j["rows"].push_back(row);
  }
  j["std_convention"] = report.std_convention;
  return j;
}

RunReport report_from_json(const OrderedJson& j) {
  try {
    RunReport report;
    for (const auto& row : j.at("rows")) {
      ReportRow r;
      r.model_name = row.at("model").get<std::string>();
      r.dataset_name = row.at("dataset").get<std::string>();
      r.subset_name = row.at("subset").get<std::string>();
      r.mean_accuracy = row.at("mean_accuracy").get<double>();
      r.std_accuracy = row.at("std_accuracy").get<double>();
      r.n_seeds = row.at("n_seeds").get<int>();
      if (r.mean_accuracy < 0 || r.mean_accuracy > 1 || r.std_accuracy < 0 || r.n_seeds < 1) {
        throw DataError("report row for " + r.model_name + "/" + r.dataset_name + "/" +
                        r.subset_name + " is out of range");
      }
      report.rows.push_back(std::move(r));
    }
    if (j.contains("std_convention")) report.std_convention = j["std_convention"].get<std::string>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

void add_runs(RunReport& report, const std::string& model_name, const std::string& dataset_name,
              const std::vector<PredictionFile>& runs, const GoldSet& gold,
              const std::map<std::string, std::string>* tags) {
  if (runs.empty()) throw DataError("no prediction files for " + model_name + "/" + dataset_name);
  std::map<std::string, std::vector<double>> per_subset;
  for (const auto& run : runs) {
    per_subset["all"].push_back(accuracy(run, gold));
    if (tags) {
      for (const auto& [subset, acc] : subset_breakdown(run, gold, *tags)) {
        per_subset[subset].push_back(acc);
      }
    }
  }
  for (const auto& [subset, accs] : per_subset) {
    const auto s = aggregate_seeds(accs);
    report.rows.push_back({model_name, dataset_name, subset, s.mean, s.std, static_cast<int>(accs.size())});
  }
}

}  // namespace pasaug

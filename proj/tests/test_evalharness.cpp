#include <doctest.h>

#include <algorithm>
#include <random>

#include "pasaug/adversarial.hpp"
#include "pasaug/biasmodel.hpp"
#include "pasaug/evalharness.hpp"
#include "support/fixtures.hpp"

using namespace pasaug;
using namespace pasaug::testing;

namespace {

PredictionFile preds(std::initializer_list<std::pair<const std::string, Answer>> entries) {
  PredictionFile p;
  p.entries = entries;
  return p;
}

GoldSet label_gold(int n) {
  GoldSet g;
  for (int i = 0; i < n; ++i) g["e" + std::to_string(i)] = NliLabel::entailment;
  return g;
}

}  // namespace

TEST_CASE("accuracy examples") {
  const auto gold = label_gold(4);
  auto p = preds({{"e0", NliLabel::entailment},
                  {"e1", NliLabel::entailment},
                  {"e2", NliLabel::entailment},
                  {"e3", NliLabel::entailment}});
  CHECK(accuracy(p, gold) == 1.0);
  p.entries["e1"] = NliLabel::neutral;
  p.entries["e2"] = NliLabel::contradiction;
  p.entries["e3"] = NliLabel::neutral;
  CHECK(accuracy(p, gold) == 0.25);
}

TEST_CASE("missing predictions are named") {
  auto gold = label_gold(8);
  auto p = preds({});
  for (int i = 0; i < 8; ++i) {
    if (i != 7) p.entries["e" + std::to_string(i)] = NliLabel::entailment;
  }
  try {
    accuracy(p, gold);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("\"e7\"") != std::string::npos);
  }
}

TEST_CASE("label and index predictions do not mix") {
  GoldSet gold{{"m1", 2}};
  CHECK_THROWS_AS(accuracy(preds({{"m1", NliLabel::neutral}}), gold), DataError);
  CHECK(accuracy(preds({{"m1", 2}}), gold) == 1.0);
}

TEST_CASE("prediction files") {
  TempDir dir;
  write_file(dir / "p.jsonl", "{\"id\":\"a\",\"prediction\":\"neutral\"}\n{\"id\":\"b\",\"prediction\":3}\n");
  const auto p = read_predictions(dir / "p.jsonl", 4, "m");
  CHECK(p.entries.at("a") == Answer{NliLabel::neutral});
  CHECK(p.entries.at("b") == Answer{3});
  CHECK(p.seed == 4);

  write_file(dir / "dup.jsonl", "{\"id\":\"a\",\"prediction\":1}\n{\"id\":\"a\",\"prediction\":2}\n");
  try {
    read_predictions(dir / "dup.jsonl");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 2);
  }
  write_file(dir / "bad.jsonl", "{\"id\":\"a\",\"prediction\":\"maybe\"}\n");
  CHECK_THROWS_AS(read_predictions(dir / "bad.jsonl"), DataError);
}

TEST_CASE("prediction line order never changes accuracy") {
  TempDir dir;
  std::mt19937_64 rng(5);
  std::vector<std::string> lines;
  GoldSet gold;
  for (int i = 0; i < 60; ++i) {
    const std::string id = "x" + std::to_string(i);
    gold[id] = static_cast<int>(rng() % 4);
    lines.push_back("{\"id\":\"" + id + "\",\"prediction\":" + std::to_string(rng() % 4) + "}");
  }
  write_file(dir / "a.jsonl", join(lines, "\n") + "\n");
  const double base = accuracy(read_predictions(dir / "a.jsonl"), gold);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(lines.begin(), lines.end(), rng);
    write_file(dir / "b.jsonl", join(lines, "\n") + "\n");
    CHECK(accuracy(read_predictions(dir / "b.jsonl"), gold) == base);
  }
}

TEST_CASE("seed aggregation") {
  auto s = aggregate_seeds({0.5, 0.7});
  CHECK(s.mean == doctest::Approx(0.6));
  CHECK(s.std == doctest::Approx(0.1));
  s = aggregate_seeds({0.8});
  CHECK(s.mean == 0.8);
  CHECK(s.std == 0.0);
  s = aggregate_seeds({0.62, 0.62, 0.62, 0.62, 0.62});
  CHECK(s.mean == doctest::Approx(0.62));
  CHECK(s.std == doctest::Approx(0.0));
  CHECK_THROWS(aggregate_seeds({}));
}

TEST_CASE("seed aggregation is permutation invariant and scales the mean") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> xs(1 + rng() % 6);
    for (auto& x : xs) x = u(rng);
    const auto a = aggregate_seeds(xs);
    std::shuffle(xs.begin(), xs.end(), rng);
    const auto b = aggregate_seeds(xs);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.std == doctest::Approx(b.std).epsilon(1e-12));
    for (auto& x : xs) x *= 0.5;
    CHECK(aggregate_seeds(xs).mean == doctest::Approx(0.5 * a.mean).epsilon(1e-12));
  }
}

TEST_CASE("subset breakdown") {
  GoldSet gold{{"a", 0}, {"b", 0}, {"c", 1}};
  auto p = preds({{"a", 0}, {"b", 0}, {"c", 0}});
  auto out = subset_breakdown(p, gold, {{"a", "A"}, {"b", "A"}, {"c", "B"}});
  CHECK(out == std::map<std::string, double>{{"A", 1.0}, {"B", 0.0}});
  out = subset_breakdown(p, gold, {{"a", "A"}, {"b", "A"}, {"c", "A"}});
  CHECK(out.at("A") == accuracy(p, gold));
  out = subset_breakdown(p, gold, {{"a", "A"}});
  CHECK(out.at("other") == 0.5);
}

TEST_CASE("subset breakdown over tagger output matches a recount") {
  std::mt19937_64 rng(17);
  GoldSet gold;
  PredictionFile p;
  std::map<std::string, std::string> tags;
  for (int i = 0; i < 400; ++i) {
    const std::string id = "h" + std::to_string(i);
    const auto prem = random_words(rng, 2, 8, 5);
    const auto hyp = random_words(rng, 1, 3, 5);
    tags[id] = primary_subset(tag_hans_heuristics(prem, hyp, std::nullopt));
    gold[id] = static_cast<NliLabel>(rng() % 3);
    p.entries[id] = static_cast<NliLabel>(rng() % 3);
  }
  std::map<std::string, std::pair<int, int>> recount;
  for (const auto& [id, g] : gold) {
    auto& [ok, n] = recount[tags[id]];
    ok += p.entries[id] == g ? 1 : 0;
    ++n;
  }
  const auto got = subset_breakdown(p, gold, tags);
  REQUIRE(got.size() == recount.size());
  for (const auto& [name, c] : recount) {
    CHECK(got.at(name) == static_cast<double>(c.first) / c.second);
  }
}

TEST_CASE("overall accuracy is the size-weighted mean of subset accuracies") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 300; ++t) {
    GoldSet gold;
    PredictionFile p;
    std::map<std::string, std::string> tags;
    std::map<std::string, int> sizes;
    const int n = 1 + static_cast<int>(rng() % 50);
    const int parts = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      const std::string id = std::to_string(i);
      gold[id] = static_cast<int>(rng() % 3);
      p.entries[id] = static_cast<int>(rng() % 3);
      tags[id] = "s" + std::to_string(rng() % static_cast<unsigned>(parts));
      sizes[tags[id]]++;
    }
    double weighted = 0;
    for (const auto& [name, acc] : subset_breakdown(p, gold, tags)) weighted += acc * sizes[name];
    CHECK(weighted / n == doctest::Approx(accuracy(p, gold)).epsilon(1e-12));
  }
}

TEST_CASE("percent formatting") {
  CHECK(format_cell(0.842, 0.003) == "84.2±0.3");
  CHECK(format_percent(1.0) == "100.0");
  CHECK(format_percent(0.0) == "0.0");
  CHECK(format_percent(0.8425) == "84.3");
  CHECK(format_percent(0.8424) == "84.2");
  CHECK(format_percent(0.0005) == "0.1");
  CHECK(format_percent(0.12345) == "12.3");
}

TEST_CASE("markdown rendering") {
  RunReport empty;
  CHECK(render_report(empty, ReportFormat::markdown) ==
        "| model | dataset | subset | accuracy | seeds |\n|---|---|---|---|---|\n");

  RunReport r;
  r.rows = {{"roberta", "swag", "all", 0.842, 0.003, 5}, {"bert", "mnli", "all", 0.5, 0.0, 1}};
  const auto md = render_report(r, ReportFormat::markdown);
  CHECK(md.find("| roberta | swag | all | 84.2±0.3 | 5 |") != std::string::npos);
  CHECK(md.find("| bert |") < md.find("| roberta |"));
  CHECK(md.find("population") != std::string::npos);

  const auto tsv = render_report(r, ReportFormat::tsv);
  CHECK(tsv.find("roberta\tswag\tall\t0.84199999999999997\t0.0030000000000000001\t5\n") != std::string::npos);
}

TEST_CASE("JSON report round-trips") {
  RunReport r;
  r.rows = {{"m", "d", "all", 0.1 + 0.2, 1.0 / 3, 5}, {"m", "d", "lexical_overlap", 0.842, 0.003, 5}};
  const auto text = render_report(r, ReportFormat::json);
  CHECK(report_from_json(OrderedJson::parse(text)) == r);
  CHECK(report_from_json(to_json(r)) == r);
  auto bad = to_json(r);
  bad["rows"][0]["mean_accuracy"] = 1.5;
  CHECK_THROWS_AS(report_from_json(bad), DataError);
  CHECK_THROWS_AS(parse_report_format("xml"), std::invalid_argument);
}

TEST_CASE("add_runs aggregates seeds per subset") {
  GoldSet gold{{"a", 0}, {"b", 1}};
  std::vector<PredictionFile> runs{preds({{"a", 0}, {"b", 1}}), preds({{"a", 0}, {"b", 0}})};
  std::map<std::string, std::string> tags{{"a", "x"}, {"b", "y"}};
  RunReport r;
  add_runs(r, "m", "d", runs, gold, &tags);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0] == ReportRow{"m", "d", "all", 0.75, 0.25, 2});
  CHECK(r.rows[1] == ReportRow{"m", "d", "x", 1.0, 0.0, 2});
  CHECK(r.rows[2] == ReportRow{"m", "d", "y", 0.5, 0.5, 2});
}

#include <doctest.h>

#include <regex>

#include "pasaug/augment.hpp"
#include "support/fixtures.hpp"

using namespace pasaug;
using namespace pasaug::testing;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

AnnotatedSentence five_frames() {
  AnnotatedSentence s = sentence("five", "a b c d e f g h i j");
  // Listed out of rank order on purpose.
  s.frames = {frame({8, 9}, std::nullopt, std::nullopt, 4), frame({2, 3}, std::nullopt, std::nullopt, 1),
              frame({0, 1}, std::nullopt, std::nullopt, 0), frame({6, 7}, std::nullopt, std::nullopt, 3),
              frame({4, 5}, std::nullopt, std::nullopt, 2)};
  return s;
}

}  // namespace

TEST_CASE("render_frame matches the worked segments") {
  const auto s = drink_sentence();
  CHECK(render_frame(s.frames[0], s) == "[PRD] takes [AG0] Someone [AG1] the drink [PRE]");
  CHECK(render_frame(s.frames[1], s) == "[PRD] holds [AG0] Someone [AG1] it [PRE]");

  const auto rain = sentence("r", "It rains");
  CHECK(render_frame(frame({1, 2}, std::nullopt, std::nullopt, 0), rain) == "[PRD] rains [PRE]");
  CHECK(render_frame(frame({1, 2}, Span{0, 1}, std::nullopt, 0), rain) == "[PRD] rains [AG0] It [PRE]");
  CHECK(render_frame(frame({1, 2}, std::nullopt, Span{0, 1}, 0), rain) == "[PRD] rains [AG1] It [PRE]");
}

TEST_CASE("drink sentence augments to the exact string") {
  CHECK(augment_sentence(drink_sentence(), AugmentPolicy{}) == kDrinkAugmented);
}

TEST_CASE("a sentence without frames is unchanged") {
  const auto s = sentence("none", "Nothing happens here.");
  CHECK(augment_sentence(s, AugmentPolicy{}) == "Nothing happens here.");
}

TEST_CASE("only the first max_frames frames by rank are rendered") {
  const auto s = five_frames();
  const auto out = augment_sentence(s, AugmentPolicy{});
  CHECK(count_of(out, "[PRD]") == 3);
  CHECK(out == "a b c d e f g h i j [PRD] a [PRE] [PRD] c [PRE] [PRD] e [PRE]");

  AugmentPolicy none;
  none.max_frames = 0;
  CHECK(augment_sentence(s, none) == s.text);

  AugmentPolicy all;
  all.max_frames = 10;
  CHECK(count_of(augment_sentence(s, all), "[PRD]") == 5);
}

TEST_CASE("custom separator goes before every segment") {
  AugmentPolicy p;
  p.separator = " || ";
  CHECK(augment_sentence(drink_sentence(), p) ==
        "Someone takes the drink, then holds it. || [PRD] takes [AG0] Someone [AG1] the drink [PRE] || "
        "[PRD] holds [AG0] Someone [AG1] it [PRE]");
}

TEST_CASE("augment properties on random frames") {
  std::mt19937_64 rng(11);
  const std::regex grammar(R"(( \[PRD\] [^\[\]]+( \[AG0\] [^\[\]]+)?( \[AG1\] [^\[\]]+)? \[PRE\])*)");
  for (int trial = 0; trial < 500; ++trial) {
    const auto words = random_words(rng, 1, 12);
    AnnotatedSentence s = sentence("r", join(words));
    const std::size_t n = s.tokens.size();
    const int frames = static_cast<int>(rng() % 6);
    for (int k = 0; k < frames; ++k) {
      auto span = [&] {
        std::size_t a = rng() % n, b = rng() % n;
        if (a > b) std::swap(a, b);
        return Span{a, b + 1};
      };
      std::optional<Span> a0, a1;
      if (rng() % 2) a0 = span();
      if (rng() % 2) a1 = span();
      s.frames.push_back(frame(span(), a0, a1, k));
    }
    validate(s);
    const auto out = augment_sentence(s, AugmentPolicy{});
    REQUIRE(out.rfind(s.text, 0) == 0);
    REQUIRE(std::regex_match(out.substr(s.text.size()), grammar));
    REQUIRE(count_of(out, "[PRD]") == static_cast<std::size_t>(std::min(frames, 3)));
    REQUIRE(out == augment_sentence(s, AugmentPolicy{}));
  }
}

TEST_CASE("dataset augmentation respects targets") {
  AnnotationStore store;
  auto prem = drink_sentence("n1/premise");
  auto hyp = sentence("n1/hypothesis", "Someone drinks.");
  hyp.frames = {frame({1, 2}, Span{0, 1}, std::nullopt, 0)};
  store.insert(prem);
  store.insert(hyp);
  const std::vector<NliExample> data{nli("n1", prem.text, hyp.text, NliLabel::neutral)};

  AugmentSummary summary;
  auto out = augment_dataset(data, store, AugmentPolicy{}, summary);
  REQUIRE(out.size() == 1);
  CHECK(out[0].premise == kDrinkAugmented);
  CHECK(out[0].hypothesis == "Someone drinks. [PRD] drinks [AG0] Someone [PRE]");
  CHECK(out[0].label == NliLabel::neutral);
  CHECK(out[0].id == "n1");
  CHECK(summary.augmented == 1);

  AugmentPolicy hyp_only;
  hyp_only.targets = AugmentTargets::hypothesis_only;
  out = augment_dataset(data, store, hyp_only, summary);
  CHECK(out[0].premise == prem.text);
  CHECK(out[0].hypothesis.find("[PRD]") != std::string::npos);
}

TEST_CASE("multiple-choice premise-only augmentation leaves endings alone") {
  AnnotationStore store;
  store.insert(drink_sentence("m1/premise"));
  McExample ex = mc("m1", drink_sentence().text, 2);
  AugmentPolicy p;
  p.targets = AugmentTargets::premise_only;
  AugmentSummary summary;
  auto out = augment_dataset(std::vector<McExample>{ex}, store, p, summary);
  CHECK(out[0].premise == kDrinkAugmented);
  CHECK(out[0].endings == ex.endings);
  CHECK(out[0].gold_index == 2);
}

TEST_CASE("multiple-choice endings resolve by ending index") {
  AnnotationStore store;
  store.insert(drink_sentence("m1/premise"));
  McExample ex = mc("m1", drink_sentence().text);
  for (std::size_t k = 0; k < ex.endings.size(); ++k) {
    auto s = sentence("m1/ending/" + std::to_string(k), ex.endings[k]);
    s.frames = {frame({1, 2}, std::nullopt, std::nullopt, 0)};
    store.insert(s);
  }
  AugmentSummary summary;
  auto out = augment_dataset(std::vector<McExample>{ex}, store, AugmentPolicy{}, summary);
  CHECK(out[0].endings[1] == "ending one [PRD] one [PRE]");
  CHECK(summary.augmented == 1);
}

TEST_CASE("missing annotations skip or fail") {
  std::vector<NliExample> data;
  for (int i = 0; i < 4; ++i) data.push_back(nli("x" + std::to_string(i), "A b.", "C d."));
  AnnotationStore empty;
  AugmentSummary summary;
  auto out = augment_dataset(data, empty, AugmentPolicy{}, summary, 3);
  CHECK(out == data);
  CHECK(summary.examples == 4);
  CHECK(summary.skipped_missing_annotation == 4);
  CHECK(summary.augmented == 0);

  AugmentPolicy strict;
  strict.on_missing = MissingAnnotation::fail;
  CHECK_THROWS_AS(augment_dataset(data, empty, strict, summary), DataError);
}

TEST_CASE("parallel augmentation keeps input order") {
  AnnotationStore store;
  std::vector<NliExample> data;
  for (int i = 0; i < 200; ++i) {
    const std::string id = "e" + std::to_string(i);
    auto s = sentence(id + "/premise", "w" + std::to_string(i) + " runs");
    s.frames = {frame({1, 2}, Span{0, 1}, std::nullopt, 0)};
    store.insert(s);
    data.push_back(nli(id, s.text, "h"));
  }
  AugmentPolicy p;
  p.targets = AugmentTargets::premise_only;
  AugmentSummary a, b;
  CHECK(augment_dataset(data, store, p, a, 1) == augment_dataset(data, store, p, b, 8));
  CHECK(a.augmented == 200);
}

TEST_CASE("target names parse") {
  CHECK(parse_targets("premise_only") == AugmentTargets::premise_only);
  CHECK(parse_targets("hypothesis_only") == AugmentTargets::hypothesis_only);
  CHECK(parse_targets("both") == AugmentTargets::both);
  CHECK_THROWS(parse_targets("neither"));
}

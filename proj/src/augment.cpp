#include "pasaug/augment.hpp"

#include <algorithm>

#include "pasaug/parallel.hpp"

namespace pasaug {

AugmentTargets parse_targets(const std::string& name) {
  if (name == "premise_only") return AugmentTargets::premise_only;
  if (name == "hypothesis_only") return AugmentTargets::hypothesis_only;
  if (name == "both") return AugmentTargets::both;
  throw std::invalid_argument("unknown augmentation target \"" + name + "\"");
}

std::string render_frame(const SrlFrame& frame, const AnnotatedSentence& sentence) {
  std::string out = kPredicateMarker;
  out += ' ';
  out += sentence.span_text(frame.predicate);
  if (frame.arg0) {
    out += ' ';
    out += kArg0Marker;
    out += ' ';
    out += sentence.span_text(*frame.arg0);
  }
  if (frame.arg1) {
    out += ' ';
    out += kArg1Marker;
    out += ' ';
    out += sentence.span_text(*frame.arg1);
  }
  out += ' ';
  out += kStructureEndMarker;
  return out;
}

std::string augment_sentence(const AnnotatedSentence& sentence, const AugmentPolicy& policy) {
  std::vector<const SrlFrame*> ranked;
  ranked.reserve(sentence.frames.size());
  for (const SrlFrame& f : sentence.frames) ranked.push_back(&f);
  std::sort(ranked.begin(), ranked.end(),
            [](const SrlFrame* a, const SrlFrame* b) { return a->order < b->order; });

  const std::size_t limit = std::min<std::size_t>(ranked.size(), std::max(policy.max_frames, 0));
  std::string out = sentence.text;
  for (std::size_t i = 0; i < limit; ++i) {
    out += policy.separator;
    out += render_frame(*ranked[i], sentence);
  }
  return out;
}

namespace {

struct Augmented {
  bool skipped = false;
  NliExample nli;
  McExample mc;
};

[[noreturn]] void missing(const std::string& id, const std::string& field) {
  throw DataError("no annotation for " + field + " of example \"" + id + "\"");
}

bool targets_premise(AugmentTargets t) { return t != AugmentTargets::hypothesis_only; }
bool targets_hypothesis(AugmentTargets t) { return t != AugmentTargets::premise_only; }

}  // namespace

std::vector<NliExample> augment_dataset(const std::vector<NliExample>& dataset,
                                        const AnnotationStore& store, const AugmentPolicy& policy,
                                        AugmentSummary& summary, unsigned jobs) {
  auto one = [&](const NliExample& ex) {
    Augmented result;
    result.nli = ex;
    const AnnotatedSentence* premise = nullptr;
    const AnnotatedSentence* hypothesis = nullptr;
    if (targets_premise(policy.targets)) {
      premise = store.resolve(ex.id, "premise", ex.premise);
      if (!premise) {
        if (policy.on_missing == MissingAnnotation::fail) missing(ex.id, "premise");
        result.skipped = true;
        return result;
      }
    }
    if (targets_hypothesis(policy.targets)) {
      hypothesis = store.resolve(ex.id, "hypothesis", ex.hypothesis);
      if (!hypothesis) {
        if (policy.on_missing == MissingAnnotation::fail) missing(ex.id, "hypothesis");
        result.skipped = true;
        return result;
      }
    }
    if (premise) result.nli.premise = augment_sentence(*premise, policy);
    if (hypothesis) result.nli.hypothesis = augment_sentence(*hypothesis, policy);
    return result;
  };

  auto results = parallel_map(dataset, one, jobs);
  std::vector<NliExample> out;
  out.reserve(results.size());
  for (auto& r : results) {
    ++summary.examples;
    ++(r.skipped ? summary.skipped_missing_annotation : summary.augmented);
    out.push_back(std::move(r.nli));
  }
  return out;
}

std::vector<McExample> augment_dataset(const std::vector<McExample>& dataset,
                                       const AnnotationStore& store, const AugmentPolicy& policy,
                                       AugmentSummary& summary, unsigned jobs) {
  auto one = [&](const McExample& ex) {
    Augmented result;
    result.mc = ex;
    const AnnotatedSentence* premise = nullptr;
    std::vector<const AnnotatedSentence*> endings;
    if (targets_premise(policy.targets)) {
      premise = store.resolve(ex.id, "premise", ex.premise);
      if (!premise) {
        if (policy.on_missing == MissingAnnotation::fail) missing(ex.id, "premise");
        result.skipped = true;
        return result;
      }
    }
    if (targets_hypothesis(policy.targets)) {
      for (std::size_t k = 0; k < ex.endings.size(); ++k) {
        const std::string field = "ending/" + std::to_string(k);
        const auto* s = store.resolve(ex.id, field, ex.endings[k]);
        if (!s) {
          if (policy.on_missing == MissingAnnotation::fail) missing(ex.id, field);
          result.skipped = true;
          return result;
        }
        endings.push_back(s);
      }
    }
    if (premise) result.mc.premise = augment_sentence(*premise, policy);
    for (std::size_t k = 0; k < endings.size(); ++k) {
      result.mc.endings[k] = augment_sentence(*endings[k], policy);
    }
    return result;
  };

  auto results = parallel_map(dataset, one, jobs);
  std::vector<McExample> out;
  out.reserve(results.size());
  for (auto& r : results) {
    ++summary.examples;
    ++(r.skipped ? summary.skipped_missing_annotation : summary.augmented);
    out.push_back(std::move(r.mc));
  }
  return out;
}

}  // namespace pasaug

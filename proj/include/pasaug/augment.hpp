#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pasaug/corpus.hpp"

namespace pasaug {

inline constexpr const char* kPredicateMarker = "[PRD]";
inline constexpr const char* kArg0Marker = "[AG0]";
inline constexpr const char* kArg1Marker = "[AG1]";
inline constexpr const char* kStructureEndMarker = "[PRE]";

enum class AugmentTargets { premise_only, hypothesis_only, both };

enum class MissingAnnotation { skip, fail };

struct AugmentPolicy {
  int max_frames = 3;
  AugmentTargets targets = AugmentTargets::both;
  std::string separator = " ";
  MissingAnnotation on_missing = MissingAnnotation::skip;
};

AugmentTargets parse_targets(const std::string& name);

// "[PRD] pred [AG0] arg0 [AG1] arg1 [PRE]"; argument segments are omitted when absent.
std::string render_frame(const SrlFrame& frame, const AnnotatedSentence& sentence);

// Original text followed by the first `max_frames` frames in detection order.
std::string augment_sentence(const AnnotatedSentence& sentence, const AugmentPolicy& policy);

struct AugmentSummary {
  std::size_t examples = 0;
  std::size_t augmented = 0;
  std::size_t skipped_missing_annotation = 0;
};

// For multiple-choice data the endings play the hypothesis role.
// An example with any unresolved targeted sentence is passed through unchanged
// and counted as skipped, or raises DataError under MissingAnnotation::fail.
std::vector<NliExample> augment_dataset(const std::vector<NliExample>& dataset,
                                        const AnnotationStore& store, const AugmentPolicy& policy,
                                        AugmentSummary& summary, unsigned jobs = 1);
std::vector<McExample> augment_dataset(const std::vector<McExample>& dataset,
                                       const AnnotationStore& store, const AugmentPolicy& policy,
                                       AugmentSummary& summary, unsigned jobs = 1);

}  // namespace pasaug

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pasaug/corpus.hpp"

namespace pasaug {

enum class Provenance { syntax_swap, antonym, ne_swap, negation, word_overlap, length_mismatch };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view name);

// Stress generators do not replace an ending; the three SWAG-style generators do.
bool replaces_ending(Provenance p);

struct GenOutcome {
  std::variant<NliExample, McExample> example;
  Provenance provenance = Provenance::negation;
  std::optional<int> replaced_index;
  std::string source_id;
};

// Input schema plus {"provenance", "replaced_index", "source_id"}.
OrderedJson to_json(const GenOutcome& outcome);

inline constexpr std::string_view kNegationTautology = "and false is not true";
inline constexpr std::string_view kOverlapTautology = "and true is true";
inline constexpr int kLengthMismatchRepeats = 5;

// Appends `suffix` after a single space; an empty base gets no leading space.
std::string append_tautology(std::string_view base, std::string_view suffix, int times = 1);

NliExample gen_stress_negation(const NliExample& ex);
NliExample gen_stress_overlap(const NliExample& ex);
NliExample gen_stress_length(const NliExample& ex);

// Random stream keyed by (seed, example id), independent of processing order.
class ExampleRng {
 public:
  ExampleRng(std::uint64_t seed, std::string_view example_id);

  // Uniform integer in [0, n). Platform independent.
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Uniform choice among the non-gold ending indices.
int choose_replaced_index(const McExample& ex, ExampleRng& rng);

inline constexpr std::string_view kSubjectLabels[] = {"nsubj"};
inline constexpr std::string_view kObjectLabels[] = {"obj", "dobj"};

struct SvoMatch {
  std::size_t verb = 0;
  Span subject;
  Span object;
};

// Token indices of the dependency subtree rooted at `root`, sorted.
std::vector<std::size_t> dependency_subtree(const std::vector<DepArc>& arcs, std::size_t root);

// First verb (by token order) with exactly one subject and one object
// dependent whose subtree extents are disjoint and exclude the verb.
std::optional<SvoMatch> find_svo(const AnnotatedSentence& sentence);

// Premise text with the two phrases exchanged. When one phrase opens the
// sentence, the phrase moving away is lowercased at its first letter, and the
// phrase moving in is capitalized only if the displaced opening word is a
// determiner (its capital was positional).
std::string swap_phrases(const AnnotatedSentence& sentence, Span a, Span b);

// Throws DataError when the premise has no dependency annotation;
// returns nullopt when the premise has no subject-verb-object structure.
std::optional<GenOutcome> gen_syntax_swap(const McExample& ex, const AnnotatedSentence& premise,
                                          std::uint64_t seed);

class AntonymLexicon {
 public:
  void add(const std::string& lemma, std::vector<std::string> antonyms);
  const std::vector<std::string>* find(const std::string& lemma) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// TSV lines "lemma<TAB>antonym1,antonym2,...".
AntonymLexicon load_antonym_lexicon(const std::filesystem::path& path);

// Token index of the first frame's predicate head, if any frame exists.
std::optional<std::size_t> first_verb_index(const AnnotatedSentence& sentence);

// Inflected antonym for `word`, or nullopt when the lexicon has no usable entry.
std::optional<std::string> antonym_for(const std::string& word, const AntonymLexicon& lexicon);

std::optional<GenOutcome> gen_antonym(const McExample& ex, const AnnotatedSentence& premise,
                                      const AntonymLexicon& lexicon, std::uint64_t seed);

struct NamedEntity {
  std::string text;
  std::string type;
};

// TSV lines "entity_text<TAB>ENTITY_TYPE".
std::vector<NamedEntity> load_ne_pool(const std::filesystem::path& path);

std::optional<GenOutcome> gen_ne_swap(const McExample& ex, const AnnotatedSentence& premise,
                                      const std::vector<NamedEntity>& pool, std::uint64_t seed);

struct HeuristicTags {
  bool lexical_overlap = false;
  bool subsequence = false;
  std::optional<bool> constituent;  // nullopt without constituency spans

  bool operator==(const HeuristicTags&) const = default;
};

// Tokens are expected to be normalized by the caller.
HeuristicTags tag_hans_heuristics(std::span<const std::string> premise,
                                  std::span<const std::string> hypothesis,
                                  const std::optional<std::vector<Span>>& premise_constituents);

// Most specific matching heuristic: "constituent", "subsequence",
// "lexical_overlap", otherwise "other".
std::string primary_subset(const HeuristicTags& tags);

}  // namespace pasaug

#include "pasaug/adversarial.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace pasaug {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::syntax_swap: return "syntax_swap";
    case Provenance::antonym: return "antonym";
    case Provenance::ne_swap: return "ne_swap";
    case Provenance::negation: return "negation";
    case Provenance::word_overlap: return "word_overlap";
    case Provenance::length_mismatch: return "length_mismatch";
  }
  return "negation";
}

std::optional<Provenance> parse_provenance(std::string_view name) {
  for (auto p : {Provenance::syntax_swap, Provenance::antonym, Provenance::ne_swap,
                 Provenance::negation, Provenance::word_overlap, Provenance::length_mismatch}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

bool replaces_ending(Provenance p) {
  return p == Provenance::syntax_swap || p == Provenance::antonym || p == Provenance::ne_swap;
}

OrderedJson to_json(const GenOutcome& outcome) {
  OrderedJson j = std::visit([](const auto& ex) { return to_json(ex); }, outcome.example);
  j["provenance"] = std::string(to_string(outcome.provenance));
  j["replaced_index"] = outcome.replaced_index ? OrderedJson(*outcome.replaced_index) : OrderedJson(nullptr);
  j["source_id"] = outcome.source_id;
  return j;
}

// ---------------------------------------------------------------------------
// Stress-test appendages

std::string append_tautology(std::string_view base, std::string_view suffix, int times) {
  std::string out(base);
  for (int i = 0; i < times; ++i) {
    if (!out.empty()) out += ' ';
    out += suffix;
  }
  return out;
}

NliExample gen_stress_negation(const NliExample& ex) {
  NliExample out = ex;
  out.hypothesis = append_tautology(ex.hypothesis, kNegationTautology);
  out.id = ex.id + "::neg";
  return out;
}

NliExample gen_stress_overlap(const NliExample& ex) {
  NliExample out = ex;
  out.hypothesis = append_tautology(ex.hypothesis, kOverlapTautology);
  out.id = ex.id + "::ovl";
  return out;
}

NliExample gen_stress_length(const NliExample& ex) {
  NliExample out = ex;
  out.premise = append_tautology(ex.premise, kOverlapTautology, kLengthMismatchRepeats);
  out.id = ex.id + "::len";
  return out;
}

// ---------------------------------------------------------------------------
// Seeded per-example randomness

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ExampleRng::ExampleRng(std::uint64_t seed, std::string_view example_id)
    : engine_(splitmix64(splitmix64(seed) ^ fnv1a64(example_id))) {}

std::size_t ExampleRng::below(std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

int choose_replaced_index(const McExample& ex, ExampleRng& rng) {
  std::vector<int> candidates;
  for (int k = 0; k < static_cast<int>(ex.endings.size()); ++k) {
    if (k != ex.gold_index) candidates.push_back(k);
  }
  return candidates[rng.below(candidates.size())];
}

namespace {

GenOutcome replace_ending(const McExample& ex, std::string ending, Provenance provenance,
                          std::string_view id_suffix, ExampleRng& rng) {
  McExample out = ex;
  const int replaced = choose_replaced_index(ex, rng);
  out.endings[static_cast<std::size_t>(replaced)] = std::move(ending);
  out.id = ex.id + std::string(id_suffix);
  return GenOutcome{std::move(out), provenance, replaced, ex.id};
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

void lower_first(std::string& s) {
  if (!s.empty() && is_upper(s[0])) s[0] = static_cast<char>(s[0] - 'A' + 'a');
}

void upper_first(std::string& s) {
  if (!s.empty() && is_lower(s[0])) s[0] = static_cast<char>(s[0] - 'a' + 'A');
}

bool has_label(std::string_view label, std::span<const std::string_view> set) {
  return std::find(set.begin(), set.end(), label) != set.end();
}

const std::unordered_set<std::string> kDeterminers = {
    "the", "a", "an", "this", "that", "these", "those", "his", "her", "its", "their", "our",
    "my", "your", "some", "every", "each", "another", "no", "both", "all", "any"};

}  // namespace

// ---------------------------------------------------------------------------
// Syntactic variations

std::vector<std::size_t> dependency_subtree(const std::vector<DepArc>& arcs, std::size_t root) {
  std::vector<std::vector<std::size_t>> children(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (arcs[i].head >= 0) children[static_cast<std::size_t>(arcs[i].head)].push_back(i);
  }
  std::vector<std::size_t> out;
  std::vector<bool> seen(arcs.size(), false);
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    std::size_t node = stack.back();
    stack.pop_back();
    if (seen[node]) continue;  // guards against cyclic input
    seen[node] = true;
    out.push_back(node);
    for (std::size_t c : children[node]) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<SvoMatch> find_svo(const AnnotatedSentence& sentence) {
  if (!sentence.dep_heads) return std::nullopt;
  const auto& arcs = *sentence.dep_heads;
  const std::size_t n = arcs.size();

  for (std::size_t verb = 0; verb < n; ++verb) {
    std::vector<std::size_t> subjects;
    std::vector<std::size_t> objects;
    for (std::size_t i = 0; i < n; ++i) {
      if (arcs[i].head != static_cast<int>(verb)) continue;
      if (has_label(arcs[i].label, kSubjectLabels)) subjects.push_back(i);
      if (has_label(arcs[i].label, kObjectLabels)) objects.push_back(i);
    }
    if (subjects.size() != 1 || objects.size() != 1) continue;

    auto extent = [&](std::size_t root) {
      auto nodes = dependency_subtree(arcs, root);
      return Span{nodes.front(), nodes.back() + 1};
    };
    Span subj = extent(subjects[0]);
    Span obj = extent(objects[0]);
    if (subj.contains(verb) || obj.contains(verb)) continue;
    if (subj.start < obj.end && obj.start < subj.end) continue;
    return SvoMatch{verb, subj, obj};
  }
  return std::nullopt;
}

std::string swap_phrases(const AnnotatedSentence& sentence, Span a, Span b) {
  if (b.start < a.start) std::swap(a, b);
  const auto& toks = sentence.tokens;
  const std::string& text = sentence.text;
  const std::size_t a0 = toks[a.start].char_start, a1 = toks[a.end - 1].char_end;
  const std::size_t b0 = toks[b.start].char_start, b1 = toks[b.end - 1].char_end;

  std::string first = text.substr(a0, a1 - a0);
  std::string second = text.substr(b0, b1 - b0);
  if (a.start == 0) {
    std::string opening = ascii_lower(toks[0].text);
    lower_first(first);
    if (kDeterminers.count(opening)) upper_first(second);
  }
  // A phrase moved next to a glued neighbour (e.g. a lone "." subject) could
  // fuse into one chunk; a space is added only where tokenization would change.
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  std::string out;
  for (const std::string& piece : {text.substr(0, a0), second, text.substr(a1, b0 - a1), first, text.substr(b1)}) {
    if (!out.empty() && !piece.empty() && !is_space(out.back()) && !is_space(piece.front())) {
      auto apart = token_texts(tokenize(out));
      const auto tail = token_texts(tokenize(piece));
      apart.insert(apart.end(), tail.begin(), tail.end());
      if (token_texts(tokenize(out + piece)) != apart) out.push_back(' ');
    }
    out += piece;
  }
  return out;
}

std::optional<GenOutcome> gen_syntax_swap(const McExample& ex, const AnnotatedSentence& premise,
                                          std::uint64_t seed) {
  if (!premise.dep_heads) {
    throw DataError("premise \"" + premise.id + "\" has no dependency annotation");
  }
  auto svo = find_svo(premise);
  if (!svo) return std::nullopt;
  ExampleRng rng(seed, ex.id);
  return replace_ending(ex, swap_phrases(premise, svo->subject, svo->object),
                        Provenance::syntax_swap, "::syn", rng);
}

// ---------------------------------------------------------------------------
// Antonym relations

void AntonymLexicon::add(const std::string& lemma, std::vector<std::string> antonyms) {
  auto& slot = entries_[ascii_lower(lemma)];
  for (auto& a : antonyms) slot.push_back(std::move(a));
}

const std::vector<std::string>* AntonymLexicon::find(const std::string& lemma) const {
  auto it = entries_.find(lemma);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <typename Fn>
void for_each_tsv_line(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path.string() + ": expected a TAB separator", line_no);
    std::string key = trim(std::string_view(line).substr(0, tab));
    std::string value = trim(std::string_view(line).substr(tab + 1));
    if (key.empty() || value.empty()) throw DataError(path.string() + ": empty field", line_no);
    fn(std::move(key), std::move(value));
  }
}

// A substitute must stay one token under the corpus tokenizer.
bool single_token(const std::string& word) {
  if (word.empty()) return false;
  for (char c : word) {
    if (c == ' ' || c == '\t' || c == '_') return false;
  }
  return !is_ascii_punct(word.front()) && !is_ascii_punct(word.back());
}

std::string inflect(std::string base, const std::string& suffix) {
  if (suffix == "ing" && base.size() > 2 && base.back() == 'e' &&
      base[base.size() - 2] != 'e') {
    base.pop_back();
  }
  return base + suffix;
}

}  // namespace

AntonymLexicon load_antonym_lexicon(const std::filesystem::path& path) {
  AntonymLexicon lex;
  for_each_tsv_line(path, [&](std::string lemma, std::string list) {
    std::vector<std::string> antonyms;
    std::size_t pos = 0;
    while (pos <= list.size()) {
      auto comma = list.find(',', pos);
      if (comma == std::string::npos) comma = list.size();
      std::string a = trim(std::string_view(list).substr(pos, comma - pos));
      if (!a.empty()) antonyms.push_back(std::move(a));
      pos = comma + 1;
    }
    lex.add(lemma, std::move(antonyms));
  });
  return lex;
}

std::optional<std::size_t> first_verb_index(const AnnotatedSentence& sentence) {
  const SrlFrame* first = nullptr;
  for (const SrlFrame& f : sentence.frames) {
    if (!first || f.order < first->order) first = &f;
  }
  if (!first) return std::nullopt;
  const Span pred = first->predicate;
  if (sentence.dep_heads) {
    for (std::size_t i = pred.start; i < pred.end; ++i) {
      const int head = (*sentence.dep_heads)[i].head;
      if (head < 0 || !pred.contains(static_cast<std::size_t>(head))) return i;
    }
  }
  return pred.start;
}

std::optional<std::string> antonym_for(const std::string& word, const AntonymLexicon& lexicon) {
  const std::string w = ascii_lower(word);
  struct Candidate {
    std::string lemma;
    std::string suffix;
  };
  std::vector<Candidate> candidates{{w, ""}};
  auto ends_with = [&](std::string_view s) {
    return w.size() > s.size() + 1 && w.compare(w.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with("ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    candidates.push_back({stem, "ing"});
    candidates.push_back({stem + "e", "ing"});
    if (stem.size() >= 2 && stem.back() == stem[stem.size() - 2]) {
      candidates.push_back({stem.substr(0, stem.size() - 1), "ing"});
    }
  } else if (ends_with("es")) {
    candidates.push_back({w.substr(0, w.size() - 2), "es"});
    candidates.push_back({w.substr(0, w.size() - 1), "s"});
  } else if (ends_with("s") && !ends_with("ss")) {
    candidates.push_back({w.substr(0, w.size() - 1), "s"});
  }

  for (const Candidate& c : candidates) {
    const auto* antonyms = lexicon.find(c.lemma);
    if (!antonyms) continue;
    for (const std::string& a : *antonyms) {
      if (!single_token(a)) continue;
      std::string form = inflect(ascii_lower(a), c.suffix);
      if (form == w) continue;
      if (!word.empty() && is_upper(word[0])) upper_first(form);
      return form;
    }
  }
  return std::nullopt;
}

std::optional<GenOutcome> gen_antonym(const McExample& ex, const AnnotatedSentence& premise,
                                      const AntonymLexicon& lexicon, std::uint64_t seed) {
  auto verb = first_verb_index(premise);
  if (!verb) return std::nullopt;
  const Token& tok = premise.tokens[*verb];
  auto antonym = antonym_for(tok.text, lexicon);
  if (!antonym) return std::nullopt;
  std::string ending = premise.text.substr(0, tok.char_start) + *antonym +
                       premise.text.substr(tok.char_end);
  ExampleRng rng(seed, ex.id);
  return replace_ending(ex, std::move(ending), Provenance::antonym, "::ant", rng);
}

// ---------------------------------------------------------------------------
// Named entities

std::vector<NamedEntity> load_ne_pool(const std::filesystem::path& path) {
  std::vector<NamedEntity> pool;
  for_each_tsv_line(path, [&](std::string text, std::string type) {
    pool.push_back({std::move(text), std::move(type)});
  });
  return pool;
}

std::optional<GenOutcome> gen_ne_swap(const McExample& ex, const AnnotatedSentence& premise,
                                      const std::vector<NamedEntity>& pool, std::uint64_t seed) {
  if (!premise.ner_spans || premise.ner_spans->empty()) return std::nullopt;
  const NerSpan* first = &premise.ner_spans->front();
  for (const NerSpan& ne : *premise.ner_spans) {
    if (ne.span.start < first->span.start) first = &ne;
  }
  const std::size_t c0 = premise.tokens[first->span.start].char_start;
  const std::size_t c1 = premise.tokens[first->span.end - 1].char_end;
  const std::string surface = premise.text.substr(c0, c1 - c0);

  std::vector<const NamedEntity*> candidates;
  for (const NamedEntity& e : pool) {
    if (e.type == first->type && e.text != surface) candidates.push_back(&e);
  }
  if (candidates.empty()) return std::nullopt;

  ExampleRng rng(seed, ex.id);
  const int replaced = choose_replaced_index(ex, rng);
  const NamedEntity& chosen = *candidates[rng.below(candidates.size())];

  McExample out = ex;
  out.endings[static_cast<std::size_t>(replaced)] =
      premise.text.substr(0, c0) + chosen.text + premise.text.substr(c1);
  out.id = ex.id + "::ne";
  return GenOutcome{std::move(out), Provenance::ne_swap, replaced, ex.id};
}

// ---------------------------------------------------------------------------
// HANS heuristic tagging

namespace {

bool occurs_contiguously(std::span<const std::string> haystack, std::span<const std::string> needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace

HeuristicTags tag_hans_heuristics(std::span<const std::string> premise,
                                  std::span<const std::string> hypothesis,
                                  const std::optional<std::vector<Span>>& premise_constituents) {
  HeuristicTags tags;
  std::unordered_set<std::string_view> vocab(premise.begin(), premise.end());
  tags.lexical_overlap = std::all_of(hypothesis.begin(), hypothesis.end(),
                                     [&](const std::string& w) { return vocab.count(w) > 0; });
  tags.subsequence = occurs_contiguously(premise, hypothesis);
  if (premise_constituents) {
    tags.constituent = std::any_of(
        premise_constituents->begin(), premise_constituents->end(), [&](Span c) {
          if (c.end > premise.size() || c.size() != hypothesis.size()) return false;
          return std::equal(hypothesis.begin(), hypothesis.end(), premise.begin() + c.start);
        });
  }
  return tags;
}

std::string primary_subset(const HeuristicTags& tags) {
  if (tags.constituent.value_or(false)) return "constituent";
  if (tags.subsequence) return "subsequence";
  if (tags.lexical_overlap) return "lexical_overlap";
  return "other";
}

}  // namespace pasaug

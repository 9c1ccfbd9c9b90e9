#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "pasaug/corpus.hpp"

namespace pasaug::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pasaug_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Sentence tokenized with the corpus tokenizer; annotations are filled in by the caller.
inline AnnotatedSentence sentence(const std::string& id, const std::string& text) {
  AnnotatedSentence s;
  s.id = id;
  s.text = text;
  s.tokens = tokenize(text);
  return s;
}

inline SrlFrame frame(Span predicate, std::optional<Span> arg0, std::optional<Span> arg1, int order) {
  return SrlFrame{predicate, arg0, arg1, order};
}

// "Someone takes the drink, then holds it." with both detected frames.
inline AnnotatedSentence drink_sentence(const std::string& id = "drink1") {
  // Someone(0) takes(1) the(2) drink(3) ,(4) then(5) holds(6) it(7) .(8)
  AnnotatedSentence s = sentence(id, "Someone takes the drink, then holds it.");
  s.frames = {frame({1, 2}, Span{0, 1}, Span{2, 4}, 0), frame({6, 7}, Span{0, 1}, Span{7, 8}, 1)};
  return s;
}

inline const std::string kDrinkAugmented =
    "Someone takes the drink, then holds it. [PRD] takes [AG0] Someone [AG1] the drink [PRE] "
    "[PRD] holds [AG0] Someone [AG1] it [PRE]";

// "Someone holds up a key": holds <- nsubj Someone, holds <- prt up, holds <- obj key <- det a.
inline AnnotatedSentence key_sentence(const std::string& id = "key") {
  AnnotatedSentence s = sentence(id, "Someone holds up a key");
  s.dep_heads = std::vector<DepArc>{{1, "nsubj"}, {-1, "root"}, {1, "prt"}, {4, "det"}, {1, "obj"}};
  s.frames = {frame({1, 3}, Span{0, 1}, Span{3, 5}, 0)};
  return s;
}

// "The writer flips to the last page"; the parse attaches "to" to the verb and
// "the last page" as its object.
inline AnnotatedSentence writer_sentence(const std::string& id = "writer") {
  AnnotatedSentence s = sentence(id, "The writer flips to the last page");
  s.dep_heads = std::vector<DepArc>{{1, "det"},  {2, "nsubj"}, {-1, "root"}, {2, "prep"},
                                    {6, "det"},  {6, "amod"},  {2, "obj"}};
  s.frames = {frame({2, 3}, Span{0, 2}, Span{3, 7}, 0)};
  return s;
}

inline const std::string kTerracePremise =
    "A lot of people are sitting on terraces in a big field and people is walking in the "
    "entrance of a big stadium";

// First detected predicate is "sitting" (token 5).
inline AnnotatedSentence terrace_sentence(const std::string& id = "terrace") {
  AnnotatedSentence s = sentence(id, kTerracePremise);
  s.frames = {frame({5, 6}, Span{0, 4}, std::nullopt, 0), frame({15, 16}, Span{13, 14}, std::nullopt, 1)};
  return s;
}

inline const std::string kReflectionPremise =
    "The reflection he sees is Harrison Ford as someone Solo winking back at him";

// NER span "Harrison Ford" covers tokens 5..7.
inline AnnotatedSentence reflection_sentence(const std::string& id = "reflection") {
  AnnotatedSentence s = sentence(id, kReflectionPremise);
  s.ner_spans = std::vector<NerSpan>{{{5, 7}, "PERSON"}, {{9, 10}, "PERSON"}};
  return s;
}

inline McExample mc(const std::string& id, const std::string& premise, int gold = 0) {
  McExample ex;
  ex.id = id;
  ex.premise = premise;
  ex.endings = {"ending zero", "ending one", "ending two", "ending three"};
  ex.gold_index = gold;
  return ex;
}

inline NliExample nli(const std::string& id, const std::string& premise, const std::string& hypothesis,
                      NliLabel label = NliLabel::entailment) {
  NliExample ex;
  ex.id = id;
  ex.premise = premise;
  ex.hypothesis = hypothesis;
  ex.label = label;
  return ex;
}

// Random lowercase words over a small vocabulary, so overlaps are frequent.
inline std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                                             std::size_t vocab = 12) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  std::vector<std::string> out(len(rng));
  for (auto& w : out) w = "w" + std::to_string(word(rng));
  return out;
}

inline std::string join(const std::vector<std::string>& words, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

}  // namespace pasaug::testing

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace pasaug {

using OrderedJson = nlohmann::ordered_json;

// Raised for malformed input data. Carries the file line (1-based) when known.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive

  bool operator==(const Token&) const = default;
};

// Half-open token interval [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(std::size_t i) const { return i >= start && i < end; }
  bool operator==(const Span&) const = default;
};

struct SrlFrame {
  Span predicate;
  std::optional<Span> arg0;
  std::optional<Span> arg1;
  int order = 0;

  bool operator==(const SrlFrame&) const = default;
};

struct DepArc {
  int head = -1;  // -1 marks the root
  std::string label;

  bool operator==(const DepArc&) const = default;
};

struct NerSpan {
  Span span;
  std::string type;

  bool operator==(const NerSpan&) const = default;
};

struct AnnotatedSentence {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  std::vector<SrlFrame> frames;
  std::optional<std::vector<DepArc>> dep_heads;
  std::optional<std::vector<NerSpan>> ner_spans;
  std::optional<std::vector<Span>> constituents;

  // Surface text of tokens in `span`, joined by single spaces.
  std::string span_text(Span span) const;

  bool operator==(const AnnotatedSentence&) const = default;
};

// Throws DataError naming the sentence id if any span or arc is inconsistent.
void validate(const AnnotatedSentence& sentence);

enum class NliLabel { entailment = 0, contradiction = 1, neutral = 2 };

inline constexpr int kNumNliLabels = 3;

std::string_view to_string(NliLabel label);
std::optional<NliLabel> parse_nli_label(std::string_view text);

struct NliExample {
  std::string id;
  std::string premise;
  std::string hypothesis;
  NliLabel label = NliLabel::entailment;
  // Fields outside the schema, preserved in input order.
  OrderedJson extra = OrderedJson::object();

  bool operator==(const NliExample&) const = default;
};

struct McExample {
  std::string id;
  std::string premise;
  std::vector<std::string> endings;
  int gold_index = 0;
  OrderedJson extra = OrderedJson::object();

  bool operator==(const McExample&) const = default;
};

NliExample nli_from_json(const OrderedJson& record);
McExample mc_from_json(const OrderedJson& record);
OrderedJson to_json(const NliExample& example);
OrderedJson to_json(const McExample& example);

AnnotatedSentence annotation_from_json(const OrderedJson& record);
OrderedJson to_json(const AnnotatedSentence& sentence);

// Sequential line reader over a JSON Lines file. Blank lines are skipped.
// Parse and schema errors are rethrown as DataError with the line number.
template <typename Record>
class JsonlStream {
 public:
  using Decoder = Record (*)(const OrderedJson&);

  JsonlStream(const std::filesystem::path& path, Decoder decode)
      : in_(path), decode_(decode), path_(path) {
    if (!in_) throw DataError("cannot open " + path.string());
  }

  std::optional<Record> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        return decode_(OrderedJson::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw DataError(path_.string() + ": " + e.what(), line_no_);
      } catch (const DataError& e) {
        throw DataError(path_.string() + ": " + e.what(), line_no_);
      }
    }
    return std::nullopt;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::ifstream in_;
  Decoder decode_;
  std::filesystem::path path_;
  std::size_t line_no_ = 0;
};

JsonlStream<NliExample> open_nli_jsonl(const std::filesystem::path& path);
JsonlStream<McExample> open_mc_jsonl(const std::filesystem::path& path);

std::vector<NliExample> read_nli_jsonl(const std::filesystem::path& path);
std::vector<McExample> read_mc_jsonl(const std::filesystem::path& path);

// Canonical writer: compact JSON, schema keys first, one record per line.
void write_jsonl(std::ostream& out, const std::vector<OrderedJson>& records);
std::string to_jsonl_line(const OrderedJson& record);

// Sentences keyed by id, plus a text index for records that refer to
// sentences by their raw text.
class AnnotationStore {
 public:
  // Throws DataError on duplicate ids.
  void insert(AnnotatedSentence sentence);

  const AnnotatedSentence* find(const std::string& id) const;
  const AnnotatedSentence* find_by_text(const std::string& text) const;

  // Looks up `<owner_id>/<field>` first, then falls back to an exact text match.
  const AnnotatedSentence* resolve(const std::string& owner_id, const std::string& field,
                                   const std::string& text) const;

  std::size_t size() const { return by_id_.size(); }
  auto begin() const { return by_id_.begin(); }
  auto end() const { return by_id_.end(); }

 private:
  std::map<std::string, AnnotatedSentence> by_id_;
  std::unordered_map<std::string, std::string> id_by_text_;
};

AnnotationStore read_annotations(const std::filesystem::path& path);

// Whitespace split, then leading/trailing ASCII punctuation peeled into
// single-character tokens. Offsets index `text`.
std::vector<Token> tokenize(std::string_view text);

std::vector<std::string> token_texts(const std::vector<Token>& tokens);

bool is_ascii_punct(char c);
bool is_punct_token(std::string_view token);
std::string ascii_lower(std::string_view text);

}  // namespace pasaug

#include "pasaug/corpus.hpp"

#include <algorithm>
#include <set>

namespace pasaug {

namespace {

const OrderedJson& require(const OrderedJson& record, const char* key) {
  if (!record.is_object()) throw DataError("record is not a JSON object");
  auto it = record.find(key);
  if (it == record.end()) throw DataError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const OrderedJson& record, const char* key) {
  const auto& value = require(record, key);
  if (!value.is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
  return value.get<std::string>();
}

long long require_int(const OrderedJson& value, const std::string& what) {
  if (!value.is_number_integer()) throw DataError(what + " must be an integer");
  return value.get<long long>();
}

OrderedJson extra_fields(const OrderedJson& record, std::initializer_list<const char*> schema) {
  OrderedJson extra = OrderedJson::object();
  for (auto it = record.begin(); it != record.end(); ++it) {
    bool known = std::any_of(schema.begin(), schema.end(),
                             [&](const char* key) { return it.key() == key; });
    if (!known) extra[it.key()] = it.value();
  }
  return extra;
}

Span span_from_json(const OrderedJson& value, const std::string& what) {
  if (!value.is_array() || value.size() != 2) throw DataError(what + " must be [start, end]");
  long long s = require_int(value[0], what);
  long long e = require_int(value[1], what);
  if (s < 0 || e < 0) throw DataError(what + " has a negative index");
  return {static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
}

std::optional<Span> optional_span(const OrderedJson& frame, const char* key, const std::string& what) {
  auto it = frame.find(key);
  if (it == frame.end() || it->is_null()) return std::nullopt;
  return span_from_json(*it, what);
}

OrderedJson span_json(Span span) { return OrderedJson::array({span.start, span.end}); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string AnnotatedSentence::span_text(Span span) const {
  std::string out;
  for (std::size_t i = span.start; i < span.end && i < tokens.size(); ++i) {
    if (i != span.start) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

void validate(const AnnotatedSentence& s) {
  const std::size_t n = s.tokens.size();
  auto fail = [&](const std::string& why) {
    throw DataError("sentence \"" + s.id + "\": " + why);
  };
  auto check_span = [&](Span span, const std::string& what) {
    if (span.empty()) fail(what + " is empty");
    if (span.end > n) {
      fail(what + " [" + std::to_string(span.start) + "," + std::to_string(span.end) +
           ") exceeds " + std::to_string(n) + " tokens");
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.char_start >= t.char_end) fail("token " + std::to_string(i) + " has an empty range");
    if (t.char_end > s.text.size()) fail("token " + std::to_string(i) + " runs past the text");
    if (i > 0 && t.char_start < s.tokens[i - 1].char_end) {
      fail("token " + std::to_string(i) + " overlaps or precedes its predecessor");
    }
  }

  std::vector<int> orders;
  for (const SrlFrame& f : s.frames) {
    check_span(f.predicate, "frame predicate");
    if (f.arg0) check_span(*f.arg0, "frame arg0");
    if (f.arg1) check_span(*f.arg1, "frame arg1");
    orders.push_back(f.order);
  }
  std::sort(orders.begin(), orders.end());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] != static_cast<int>(i)) fail("frame orders are not unique and contiguous from 0");
  }

  if (s.dep_heads) {
    if (s.dep_heads->size() != n) fail("dep_heads length differs from token count");
    for (const DepArc& arc : *s.dep_heads) {
      if (arc.head < -1 || arc.head >= static_cast<int>(n)) {
        fail("dependency head " + std::to_string(arc.head) + " out of range");
      }
    }
  }
  if (s.ner_spans) {
    for (const NerSpan& ne : *s.ner_spans) check_span(ne.span, "ner span");
  }
  if (s.constituents) {
    for (Span c : *s.constituents) check_span(c, "constituent");
  }
}

std::string_view to_string(NliLabel label) {
  switch (label) {
    case NliLabel::entailment: return "entailment";
    case NliLabel::contradiction: return "contradiction";
    case NliLabel::neutral: return "neutral";
  }
  return "entailment";
}

std::optional<NliLabel> parse_nli_label(std::string_view text) {
  if (text == "entailment") return NliLabel::entailment;
  if (text == "contradiction") return NliLabel::contradiction;
  if (text == "neutral") return NliLabel::neutral;
  return std::nullopt;
}

NliExample nli_from_json(const OrderedJson& record) {
  NliExample ex;
  ex.id = require_string(record, "id");
  ex.premise = require_string(record, "premise");
  ex.hypothesis = require_string(record, "hypothesis");
  const auto& label = require(record, "label");
  if (!label.is_string()) throw DataError("unknown label " + label.dump());
  auto parsed = parse_nli_label(label.get<std::string>());
  if (!parsed) throw DataError("unknown label \"" + label.get<std::string>() + "\"");
  ex.label = *parsed;
  ex.extra = extra_fields(record, {"id", "premise", "hypothesis", "label"});
  return ex;
}

McExample mc_from_json(const OrderedJson& record) {
  McExample ex;
  ex.id = require_string(record, "id");
  ex.premise = require_string(record, "premise");
  const auto& endings = require(record, "endings");
  if (!endings.is_array()) throw DataError("field \"endings\" must be an array");
  for (const auto& e : endings) {
    if (!e.is_string()) throw DataError("endings must be strings");
    ex.endings.push_back(e.get<std::string>());
  }
  if (ex.endings.size() < 2) throw DataError("example \"" + ex.id + "\" has fewer than 2 endings");
  long long gold = require_int(require(record, "gold_index"), "gold_index");
  if (gold < 0 || gold >= static_cast<long long>(ex.endings.size())) {
    throw DataError("gold_index " + std::to_string(gold) + " out of bounds for " +
                    std::to_string(ex.endings.size()) + " endings");
  }
  ex.gold_index = static_cast<int>(gold);
  ex.extra = extra_fields(record, {"id", "premise", "endings", "gold_index"});
  return ex;
}

OrderedJson to_json(const NliExample& ex) {
  OrderedJson j = OrderedJson::object();
  j["id"] = ex.id;
  j["premise"] = ex.premise;
  j["hypothesis"] = ex.hypothesis;
  j["label"] = std::string(to_string(ex.label));
  for (auto it = ex.extra.begin(); it != ex.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

OrderedJson to_json(const McExample& ex) {
  OrderedJson j = OrderedJson::object();
  j["id"] = ex.id;
  j["premise"] = ex.premise;
  j["endings"] = ex.endings;
  j["gold_index"] = ex.gold_index;
  for (auto it = ex.extra.begin(); it != ex.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

AnnotatedSentence annotation_from_json(const OrderedJson& record) {
  AnnotatedSentence s;
  s.id = require_string(record, "id");
  s.text = require_string(record, "text");
  const std::string where = "sentence \"" + s.id + "\": ";

  const auto& tokens = require(record, "tokens");
  if (!tokens.is_array()) throw DataError(where + "tokens must be an array");
  for (const auto& t : tokens) {
    Token tok;
    tok.text = require_string(t, "text");
    long long start = require_int(require(t, "start"), where + "token start");
    long long end = require_int(require(t, "end"), where + "token end");
    if (start < 0 || end < 0) throw DataError(where + "negative token offset");
    tok.char_start = static_cast<std::size_t>(start);
    tok.char_end = static_cast<std::size_t>(end);
    s.tokens.push_back(std::move(tok));
  }

  if (auto it = record.find("frames"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError(where + "frames must be an array");
    for (const auto& f : *it) {
      SrlFrame frame;
      frame.predicate = span_from_json(require(f, "predicate"), where + "predicate");
      frame.arg0 = optional_span(f, "arg0", where + "arg0");
      frame.arg1 = optional_span(f, "arg1", where + "arg1");
      frame.order = static_cast<int>(require_int(require(f, "order"), where + "order"));
      s.frames.push_back(frame);
    }
  }

  if (auto it = record.find("dep_heads"); it != record.end() && !it->is_null()) {
    std::vector<DepArc> arcs;
    for (const auto& a : *it) {
      if (!a.is_array() || a.size() != 2 || !a[1].is_string()) {
        throw DataError(where + "dep_heads entries must be [head, \"label\"]");
      }
      arcs.push_back({static_cast<int>(require_int(a[0], where + "dependency head")),
                      a[1].get<std::string>()});
    }
    s.dep_heads = std::move(arcs);
  }

  if (auto it = record.find("ner"); it != record.end() && !it->is_null()) {
    std::vector<NerSpan> spans;
    for (const auto& n : *it) {
      if (!n.is_array() || n.size() != 3 || !n[2].is_string()) {
        throw DataError(where + "ner entries must be [start, end, \"TYPE\"]");
      }
      OrderedJson pair = OrderedJson::array({n[0], n[1]});
      spans.push_back({span_from_json(pair, where + "ner span"), n[2].get<std::string>()});
    }
    s.ner_spans = std::move(spans);
  }

  if (auto it = record.find("constituents"); it != record.end() && !it->is_null()) {
    std::vector<Span> spans;
    for (const auto& c : *it) spans.push_back(span_from_json(c, where + "constituent"));
    s.constituents = std::move(spans);
  }

  validate(s);
  return s;
}

OrderedJson to_json(const AnnotatedSentence& s) {
  OrderedJson j = OrderedJson::object();
  j["id"] = s.id;
  j["text"] = s.text;
  j["tokens"] = OrderedJson::array();
  for (const Token& t : s.tokens) {
    OrderedJson tok = OrderedJson::object();
    tok["text"] = t.text;
    tok["start"] = t.char_start;
    tok["end"] = t.char_end;
    j["tokens"].push_back(tok);
  }
  j["frames"] = OrderedJson::array();
  for (const SrlFrame& f : s.frames) {
    OrderedJson fj = OrderedJson::object();
    fj["predicate"] = span_json(f.predicate);
    fj["arg0"] = f.arg0 ? span_json(*f.arg0) : OrderedJson(nullptr);
    fj["arg1"] = f.arg1 ? span_json(*f.arg1) : OrderedJson(nullptr);
    fj["order"] = f.order;
    j["frames"].push_back(fj);
  }
  if (s.dep_heads) {
    j["dep_heads"] = OrderedJson::array();
    for (const DepArc& a : *s.dep_heads) j["dep_heads"].push_back(OrderedJson::array({a.head, a.label}));
  } else {
    j["dep_heads"] = nullptr;
  }
  if (s.ner_spans) {
    j["ner"] = OrderedJson::array();
    for (const NerSpan& n : *s.ner_spans) {
      j["ner"].push_back(OrderedJson::array({n.span.start, n.span.end, n.type}));
    }
  } else {
    j["ner"] = nullptr;
  }
  if (s.constituents) {
    j["constituents"] = OrderedJson::array();
    for (Span c : *s.constituents) j["constituents"].push_back(span_json(c));
  } else {
    j["constituents"] = nullptr;
  }
  return j;
}

JsonlStream<NliExample> open_nli_jsonl(const std::filesystem::path& path) {
  return JsonlStream<NliExample>(path, &nli_from_json);
}

JsonlStream<McExample> open_mc_jsonl(const std::filesystem::path& path) {
  return JsonlStream<McExample>(path, &mc_from_json);
}

std::vector<NliExample> read_nli_jsonl(const std::filesystem::path& path) {
  auto stream = open_nli_jsonl(path);
  std::vector<NliExample> out;
  while (auto ex = stream.next()) out.push_back(std::move(*ex));
  return out;
}

std::vector<McExample> read_mc_jsonl(const std::filesystem::path& path) {
  auto stream = open_mc_jsonl(path);
  std::vector<McExample> out;
  while (auto ex = stream.next()) out.push_back(std::move(*ex));
  return out;
}

std::string to_jsonl_line(const OrderedJson& record) {
  return record.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

void write_jsonl(std::ostream& out, const std::vector<OrderedJson>& records) {
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

void AnnotationStore::insert(AnnotatedSentence sentence) {
  if (by_id_.count(sentence.id)) throw DataError("duplicate sentence id \"" + sentence.id + "\"");
  id_by_text_.try_emplace(sentence.text, sentence.id);
  std::string id = sentence.id;
  by_id_.emplace(std::move(id), std::move(sentence));
}

const AnnotatedSentence* AnnotationStore::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

const AnnotatedSentence* AnnotationStore::find_by_text(const std::string& text) const {
  auto it = id_by_text_.find(text);
  return it == id_by_text_.end() ? nullptr : find(it->second);
}

const AnnotatedSentence* AnnotationStore::resolve(const std::string& owner_id,
                                                  const std::string& field,
                                                  const std::string& text) const {
  if (const auto* s = find(owner_id + "/" + field)) return s;
  return find_by_text(text);
}

AnnotationStore read_annotations(const std::filesystem::path& path) {
  JsonlStream<AnnotatedSentence> stream(path, &annotation_from_json);
  AnnotationStore store;
  while (auto s = stream.next()) {
    try {
      store.insert(std::move(*s));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what(), stream.line());
    }
  }
  return store;
}

bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

bool is_punct_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_ascii_punct);
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    std::size_t begin = i;
    while (i < n && !is_space(text[i])) ++i;
    std::size_t end = i;

    std::size_t core_begin = begin;
    while (core_begin < end && is_ascii_punct(text[core_begin])) ++core_begin;
    std::size_t core_end = end;
    while (core_end > core_begin && is_ascii_punct(text[core_end - 1])) --core_end;

    for (std::size_t p = begin; p < core_begin; ++p) out.push_back({std::string(1, text[p]), p, p + 1});
    if (core_begin < core_end) {
      out.push_back({std::string(text.substr(core_begin, core_end - core_begin)), core_begin, core_end});
    }
    for (std::size_t p = core_end; p < end; ++p) out.push_back({std::string(1, text[p]), p, p + 1});
  }
  return out;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

}  // namespace pasaug

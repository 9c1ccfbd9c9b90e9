#include "pasaug/biasmodel.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace pasaug {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool is_integer(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

// xoshiro256** seeded through splitmix64.
UniformSource::UniformSource(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t UniformSource::raw() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double UniformSource::next() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

std::size_t UniformSource::below(std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = raw();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::optional<EmbeddingStore> store;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    fields.clear();
    std::istringstream ss(line);
    for (std::string f; ss >> f;) fields.push_back(std::move(f));
    if (fields.empty()) continue;
    // word2vec-style "<count> <dimension>" header
    if (!store && line_no == 1 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) {
      continue;
    }
    if (fields.size() < 2) throw DataError(path.string() + ": token without components", line_no);

    EmbeddingStore::Vector v(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!parse_double(fields[i], v[static_cast<Eigen::Index>(i - 1)])) {
        throw DataError(path.string() + ": non-numeric component \"" + fields[i] + "\"", line_no);
      }
    }
    if (!store) store.emplace(v.size());
    if (v.size() != store->dimension()) {
      throw DataError(path.string() + ": dimension " + std::to_string(v.size()) + " differs from " +
                          std::to_string(store->dimension()),
                      line_no);
    }
    store->set(fields[0], std::move(v));
  }
  if (!store) throw DataError(path.string() + ": no vectors");
  return std::move(*store);
}

std::vector<std::string> normalize_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!is_punct_token(t)) out.push_back(ascii_lower(t));
  }
  return out;
}

std::optional<Span> remap_span(std::span<const std::string> raw_tokens, Span span) {
  std::size_t kept_before = 0;
  std::size_t kept_inside = 0;
  for (std::size_t i = 0; i < raw_tokens.size() && i < span.end; ++i) {
    if (is_punct_token(raw_tokens[i])) continue;
    (i < span.start ? kept_before : kept_inside) += 1;
  }
  if (kept_inside == 0) return std::nullopt;
  return Span{kept_before, kept_before + kept_inside};
}

FeatureVector extract_overlap_features(std::span<const std::string> premise,
                                       std::span<const std::string> hypothesis,
                                       const EmbeddingStore& store, const FeatureOptions& options) {
  FeatureVector fv;
  if (hypothesis.empty()) {
    fv.empty_hypothesis = true;
    return fv;
  }

  const std::unordered_set<std::string_view> premise_set(premise.begin(), premise.end());
  auto in_premise = [&](const std::string& w) { return premise_set.count(w) > 0; };

  fv.all_in = std::all_of(hypothesis.begin(), hypothesis.end(), in_premise) ? 1.0 : 0.0;
  fv.is_subsequence =
      std::search(premise.begin(), premise.end(), hypothesis.begin(), hypothesis.end()) != premise.end()
          ? 1.0
          : 0.0;

  if (options.fraction == OverlapCounting::types) {
    const std::unordered_set<std::string_view> hyp_set(hypothesis.begin(), hypothesis.end());
    const auto shared = std::count_if(hyp_set.begin(), hyp_set.end(),
                                      [&](std::string_view w) { return premise_set.count(w) > 0; });
    fv.overlap_fraction = static_cast<double>(shared) / static_cast<double>(hyp_set.size());
  } else {
    const auto shared = std::count_if(hypothesis.begin(), hypothesis.end(), in_premise);
    fv.overlap_fraction = static_cast<double>(shared) / static_cast<double>(hypothesis.size());
  }

  std::vector<std::pair<const std::string*, const EmbeddingStore::Vector*>> premise_vectors;
  for (const auto& p : premise) {
    if (const auto* v = store.find(p)) premise_vectors.emplace_back(&p, v);
  }

  double max_d = 0;
  double sum_d = 0;
  std::size_t count = 0;
  auto accumulate = [&](double d) {
    max_d = count == 0 ? d : std::max(max_d, d);
    sum_d += d;
    ++count;
  };
  for (const auto& h : hypothesis) {
    const auto* hv = store.find(h);
    if (!hv || premise_vectors.empty()) continue;
    if (options.distance == DistanceAggregation::nearest_premise_token) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [word, pv] : premise_vectors) {
        best = std::min(best, *word == h ? 0.0 : cosine_distance(*hv, *pv));
      }
      accumulate(best);
    } else {
      for (const auto& [word, pv] : premise_vectors) {
        accumulate(*word == h ? 0.0 : cosine_distance(*hv, *pv));
      }
    }
  }
  if (count > 0) {
    fv.max_cos_dist = max_d;
    fv.avg_cos_dist = std::min(sum_d / static_cast<double>(count), max_d);
  }
  return fv;
}

BiasClassifier train_bias_classifier(std::span<const LabeledFeatures> data, int num_classes,
                                     const TrainingOptions& options) {
  std::unordered_set<int> classes;
  for (const auto& d : data) {
    if (d.label < 0 || d.label >= num_classes) {
      throw DataError("training label " + std::to_string(d.label) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
    classes.insert(d.label);
  }
  if (classes.size() < 2) throw DataError("training data must contain at least two classes");
  if (options.epochs < 0) throw std::invalid_argument("epochs must be non-negative");

  BiasClassifier clf(kNumOverlapFeatures, options.hidden, num_classes, options.seed);

  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(data.size()), kNumOverlapFeatures);
  for (std::size_t i = 0; i < data.size(); ++i) {
    inputs.row(static_cast<Eigen::Index>(i)) = data[i].features.values().transpose();
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  UniformSource shuffle_rng(options.seed ^ 0x6a09e667f3bcc909ULL);
  MlpGradient<double> grad;
  Eigen::MatrixXd sample(1, kNumOverlapFeatures);
  int label[1];
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (std::size_t idx : order) {
      sample = inputs.row(static_cast<Eigen::Index>(idx));
      label[0] = data[idx].label;
      loss_and_gradient<double>(clf, sample, label, options.l2, &grad);
      clf.hidden_weights -= options.learning_rate * grad.hidden_weights;
      clf.hidden_bias -= options.learning_rate * grad.hidden_bias;
      clf.output_weights -= options.learning_rate * grad.output_weights;
      clf.output_bias -= options.learning_rate * grad.output_bias;
    }
  }
  if (!clf.all_finite()) throw std::runtime_error("training diverged: non-finite parameters");
  return clf;
}

NliLabel predict_nli(const BiasClassifier& clf, const FeatureVector& fv) {
  if (clf.num_classes() != kNumNliLabels) {
    throw std::invalid_argument("NLI prediction needs a 3-class classifier, got " +
                                std::to_string(clf.num_classes()));
  }
  return static_cast<NliLabel>(clf.predict(fv.values()));
}

int predict_mc(const BiasClassifier& clf, std::span<const std::string> premise,
               const std::vector<std::vector<std::string>>& endings, const EmbeddingStore& store,
               const FeatureOptions& options) {
  if (clf.num_classes() != 2) {
    throw std::invalid_argument("multiple-choice prediction needs a 2-class classifier, got " +
                                std::to_string(clf.num_classes()));
  }
  if (endings.empty()) throw std::invalid_argument("no endings to choose from");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < endings.size(); ++k) {
    const auto fv = extract_overlap_features(premise, endings[k], store, options);
    const double score = clf.probabilities(fv.values())[static_cast<int>(McClass::plausible)];
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(k);
    }
  }
  return best;
}

OrderedJson to_json(const BiasReport& r) {
  OrderedJson j = OrderedJson::object();
  j["accuracy"] = r.accuracy;
  j["chance"] = r.chance;
  j["margin"] = r.margin;
  j["flagged"] = r.flagged;
  j["n_train"] = r.n_train;
  j["n_eval"] = r.n_eval;
  j["seed"] = r.seed;
  j["empty_hypotheses"] = r.empty_hypotheses;
  return j;
}

namespace {

std::vector<std::string> sentence_tokens(const AnnotationStore* annotations, const std::string& owner,
                                         const std::string& field, const std::string& text) {
  std::vector<std::string> raw;
  if (annotations) {
    if (const auto* s = annotations->resolve(owner, field, text)) raw = token_texts(s->tokens);
  }
  if (raw.empty()) raw = token_texts(tokenize(text));
  return normalize_tokens(raw);
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

Split seeded_split(std::size_t n, double ratio, std::uint64_t seed) {
  if (n < 2) throw DataError("bias diagnostic needs at least two examples");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  UniformSource rng(seed ^ 0xbb67ae8584caa73bULL);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.eval.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

BiasReport finish(double correct, std::size_t n_eval, double chance_sum, const Split& split,
                  const BiasScoreOptions& options, std::size_t empty) {
  BiasReport r;
  r.n_train = split.train.size();
  r.n_eval = n_eval;
  r.accuracy = correct / static_cast<double>(n_eval);
  r.chance = chance_sum / static_cast<double>(n_eval);
  r.margin = options.margin;
  r.flagged = r.accuracy - r.chance > options.margin;
  r.seed = options.training.seed;
  r.empty_hypotheses = empty;
  return r;
}

}  // namespace

BiasReport bias_score(const std::vector<NliExample>& dataset, const AnnotationStore* annotations,
                      const EmbeddingStore& store, const BiasScoreOptions& options) {
  if (dataset.empty()) throw DataError("bias diagnostic needs a nonempty dataset");
  std::vector<LabeledFeatures> features;
  features.reserve(dataset.size());
  std::size_t empty = 0;
  for (const auto& ex : dataset) {
    const auto premise = sentence_tokens(annotations, ex.id, "premise", ex.premise);
    const auto hypothesis = sentence_tokens(annotations, ex.id, "hypothesis", ex.hypothesis);
    LabeledFeatures lf{extract_overlap_features(premise, hypothesis, store, options.features),
                       static_cast<int>(ex.label)};
    empty += lf.features.empty_hypothesis ? 1 : 0;
    features.push_back(lf);
  }

  const Split split = seeded_split(dataset.size(), options.split_ratio, options.training.seed);
  std::vector<LabeledFeatures> train;
  for (std::size_t i : split.train) train.push_back(features[i]);
  const auto clf = train_bias_classifier(train, kNumNliLabels, options.training);

  double correct = 0;
  for (std::size_t i : split.eval) {
    correct += predict_nli(clf, features[i].features) == dataset[i].label ? 1 : 0;
  }
  return finish(correct, split.eval.size(), static_cast<double>(split.eval.size()) / kNumNliLabels,
                split, options, empty);
}

BiasReport bias_score(const std::vector<McExample>& dataset, const AnnotationStore* annotations,
                      const EmbeddingStore& store, const BiasScoreOptions& options) {
  if (dataset.empty()) throw DataError("bias diagnostic needs a nonempty dataset");
  struct Tokenized {
    std::vector<std::string> premise;
    std::vector<std::vector<std::string>> endings;
  };
  std::vector<Tokenized> tokenized;
  tokenized.reserve(dataset.size());
  for (const auto& ex : dataset) {
    Tokenized t;
    t.premise = sentence_tokens(annotations, ex.id, "premise", ex.premise);
    for (std::size_t k = 0; k < ex.endings.size(); ++k) {
      t.endings.push_back(sentence_tokens(annotations, ex.id, "ending/" + std::to_string(k), ex.endings[k]));
    }
    tokenized.push_back(std::move(t));
  }

  const Split split = seeded_split(dataset.size(), options.split_ratio, options.training.seed);
  std::vector<LabeledFeatures> train;
  std::size_t empty = 0;
  for (std::size_t i : split.train) {
    for (std::size_t k = 0; k < tokenized[i].endings.size(); ++k) {
      LabeledFeatures lf{
          extract_overlap_features(tokenized[i].premise, tokenized[i].endings[k], store, options.features),
          static_cast<int>(static_cast<int>(k) == dataset[i].gold_index ? McClass::plausible
                                                                         : McClass::implausible)};
      empty += lf.features.empty_hypothesis ? 1 : 0;
      train.push_back(lf);
    }
  }
  const auto clf = train_bias_classifier(train, 2, options.training);

  double correct = 0;
  double chance = 0;
  for (std::size_t i : split.eval) {
    const int pick = predict_mc(clf, tokenized[i].premise, tokenized[i].endings, store, options.features);
    correct += pick == dataset[i].gold_index ? 1 : 0;
    chance += 1.0 / static_cast<double>(dataset[i].endings.size());
  }
  return finish(correct, split.eval.size(), chance, split, options, empty);
}

}  // namespace pasaug

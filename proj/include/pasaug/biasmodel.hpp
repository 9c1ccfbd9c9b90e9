#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "pasaug/corpus.hpp"

namespace pasaug {

// ---------------------------------------------------------------------------
// Word vectors

template <typename Scalar>
class BasicEmbeddingStore {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicEmbeddingStore(Eigen::Index dimension) : dimension_(dimension) {
    if (dimension < 1) throw std::invalid_argument("embedding dimension must be at least 1");
  }

  Eigen::Index dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

  // Later assignments to the same token overwrite earlier ones.
  void set(const std::string& token, Vector v) {
    if (v.size() != dimension_) {
      throw std::invalid_argument("vector for \"" + token + "\" has dimension " +
                                  std::to_string(v.size()) + ", expected " +
                                  std::to_string(dimension_));
    }
    vectors_[ascii_lower(token)] = std::move(v);
  }

  const Vector* find(const std::string& token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? nullptr : &it->second;
  }

 private:
  Eigen::Index dimension_;
  std::unordered_map<std::string, Vector> vectors_;
};

using EmbeddingStore = BasicEmbeddingStore<double>;

// Text format: one token per line followed by whitespace-separated components.
EmbeddingStore load_embeddings(const std::filesystem::path& path);

// 1 - cos(u, v), clamped to [0, 2]. A zero vector is at distance 1 from everything.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_distance(const Eigen::MatrixBase<DerivedA>& u,
                                          const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_distance: dimension mismatch (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(1);
  const Scalar d = Scalar(1) - u.dot(v) / (nu * nv);
  return std::clamp(d, Scalar(0), Scalar(2));
}

// ---------------------------------------------------------------------------
// Overlap features

inline constexpr int kNumOverlapFeatures = 5;

struct FeatureVector {
  double all_in = 0;
  double is_subsequence = 0;
  double overlap_fraction = 0;
  double max_cos_dist = 0;
  double avg_cos_dist = 0;
  // Set when the hypothesis is empty after normalization; all features are then 0.
  bool empty_hypothesis = false;

  Eigen::Matrix<double, kNumOverlapFeatures, 1> values() const {
    Eigen::Matrix<double, kNumOverlapFeatures, 1> v;
    v << all_in, is_subsequence, overlap_fraction, max_cos_dist, avg_cos_dist;
    return v;
  }
};

enum class DistanceAggregation {
  nearest_premise_token,  // each hypothesis word against its closest premise word
  all_pairs,              // every (hypothesis word, premise word) pair
};

enum class OverlapCounting { types, occurrences };

struct FeatureOptions {
  DistanceAggregation distance = DistanceAggregation::nearest_premise_token;
  OverlapCounting fraction = OverlapCounting::types;
};

// Lowercases and drops tokens made only of punctuation.
std::vector<std::string> normalize_tokens(std::span<const std::string> tokens);

// Maps a span over raw tokens onto the normalized sequence produced by
// normalize_tokens. Returns nullopt if no token of the span survives.
std::optional<Span> remap_span(std::span<const std::string> raw_tokens, Span span);

// Both inputs must already be normalized.
FeatureVector extract_overlap_features(std::span<const std::string> premise,
                                       std::span<const std::string> hypothesis,
                                       const EmbeddingStore& store,
                                       const FeatureOptions& options = {});

// ---------------------------------------------------------------------------
// One-hidden-layer classifier

template <typename Scalar>
struct MlpGradient {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hidden_weights;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hidden_bias;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> output_weights;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> output_bias;
};

// Draws doubles in [0, 1) from the top 53 bits of a 64-bit engine so results
// do not depend on the standard library's distribution implementations.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed);
  double next();
  std::size_t below(std::size_t n);

 private:
  std::uint64_t state_[4];
  std::uint64_t raw();
};

template <typename Scalar>
class MlpClassifier {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  MlpClassifier() = default;

  // Parameters drawn uniformly from [-init_range, init_range].
  MlpClassifier(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index classes, std::uint64_t seed,
                Scalar init_range = Scalar(0.1)) {
    if (classes < 2) throw std::invalid_argument("classifier needs at least 2 classes");
    if (hidden < 1 || inputs < 1) throw std::invalid_argument("classifier dimensions must be positive");
    UniformSource rng(seed);
    auto draw = [&] { return static_cast<Scalar>((2.0 * rng.next() - 1.0)) * init_range; };
    hidden_weights = Matrix(hidden, inputs);
    hidden_bias = Vector(hidden);
    output_weights = Matrix(classes, hidden);
    output_bias = Vector(classes);
    for (Eigen::Index i = 0; i < hidden_weights.size(); ++i) hidden_weights.data()[i] = draw();
    for (Eigen::Index i = 0; i < hidden_bias.size(); ++i) hidden_bias[i] = draw();
    for (Eigen::Index i = 0; i < output_weights.size(); ++i) output_weights.data()[i] = draw();
    for (Eigen::Index i = 0; i < output_bias.size(); ++i) output_bias[i] = draw();
  }

  Eigen::Index input_size() const { return hidden_weights.cols(); }
  Eigen::Index hidden_size() const { return hidden_weights.rows(); }
  Eigen::Index num_classes() const { return output_weights.rows(); }

  template <typename Derived>
  Vector hidden_preactivation(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != input_size()) {
      throw std::invalid_argument("classifier expects " + std::to_string(input_size()) +
                                  " inputs, got " + std::to_string(x.size()));
    }
    return hidden_weights * x.template cast<Scalar>() + hidden_bias;
  }

  template <typename Derived>
  Vector logits(const Eigen::MatrixBase<Derived>& x) const {
    return output_weights * hidden_preactivation(x).cwiseMax(Scalar(0)) + output_bias;
  }

  template <typename Derived>
  Vector probabilities(const Eigen::MatrixBase<Derived>& x) const {
    return softmax(logits(x));
  }

  // Argmax class; ties go to the lowest index.
  template <typename Derived>
  int predict(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Index best;
    logits(x).maxCoeff(&best);
    return static_cast<int>(best);
  }

  bool all_finite() const {
    return hidden_weights.allFinite() && hidden_bias.allFinite() && output_weights.allFinite() &&
           output_bias.allFinite();
  }

  static Vector softmax(const Vector& z) {
    Vector e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
  }

  Matrix hidden_weights;  // H x D
  Vector hidden_bias;     // H
  Matrix output_weights;  // C x H
  Vector output_bias;     // C
};

using BiasClassifier = MlpClassifier<double>;

// Mean softmax cross-entropy over the rows of `inputs`, plus
// (l2 / 2) * (|W_hidden|^2 + |W_output|^2). Writes the gradient when `grad` is set.
template <typename Scalar>
Scalar loss_and_gradient(const MlpClassifier<Scalar>& clf,
                         const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& inputs,
                         std::span<const int> labels, Scalar l2, MlpGradient<Scalar>* grad) {
  using Vector = typename MlpClassifier<Scalar>::Vector;
  const Eigen::Index n = inputs.rows();
  if (n != static_cast<Eigen::Index>(labels.size())) {
    throw std::invalid_argument("inputs and labels differ in length");
  }
  if (grad) {
    grad->hidden_weights.setZero(clf.hidden_weights.rows(), clf.hidden_weights.cols());
    grad->hidden_bias.setZero(clf.hidden_bias.size());
    grad->output_weights.setZero(clf.output_weights.rows(), clf.output_weights.cols());
    grad->output_bias.setZero(clf.output_bias.size());
  }

  Scalar loss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = inputs.row(i).transpose();
    const Vector z1 = clf.hidden_preactivation(x);
    const Vector h = z1.cwiseMax(Scalar(0));
    const Vector z2 = clf.output_weights * h + clf.output_bias;
    const Scalar zmax = z2.maxCoeff();
    const Scalar log_sum = zmax + std::log((z2.array() - zmax).exp().sum());
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= clf.num_classes()) throw std::invalid_argument("label out of range");
    loss += log_sum - z2[y];

    if (grad) {
      Vector dz2 = (z2.array() - log_sum).exp().matrix();
      dz2[y] -= Scalar(1);
      grad->output_weights.noalias() += dz2 * h.transpose();
      grad->output_bias += dz2;
      Vector dz1 = (clf.output_weights.transpose() * dz2).cwiseProduct(
          (z1.array() > Scalar(0)).template cast<Scalar>().matrix());
      grad->hidden_weights.noalias() += dz1 * x.transpose();
      grad->hidden_bias += dz1;
    }
  }

  const Scalar inv_n = n > 0 ? Scalar(1) / static_cast<Scalar>(n) : Scalar(0);
  loss *= inv_n;
  loss += Scalar(0.5) * l2 *
          (clf.hidden_weights.squaredNorm() + clf.output_weights.squaredNorm());
  if (grad) {
    grad->hidden_weights = grad->hidden_weights * inv_n + l2 * clf.hidden_weights;
    grad->hidden_bias *= inv_n;
    grad->output_weights = grad->output_weights * inv_n + l2 * clf.output_weights;
    grad->output_bias *= inv_n;
  }
  return loss;
}

struct TrainingOptions {
  int hidden = 32;
  double learning_rate = 0.05;
  int epochs = 10;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

struct LabeledFeatures {
  FeatureVector features;
  int label = 0;
};

// Plain per-example SGD; the seed fixes initialization and shuffling.
// Throws DataError when fewer than two distinct classes are present.
BiasClassifier train_bias_classifier(std::span<const LabeledFeatures> data, int num_classes,
                                     const TrainingOptions& options);

// Multiple-choice scoring uses a binary plausibility classifier.
enum class McClass { implausible = 0, plausible = 1 };

NliLabel predict_nli(const BiasClassifier& clf, const FeatureVector& fv);

// Index of the ending with the highest plausible-class probability; ties go to the lowest index.
int predict_mc(const BiasClassifier& clf, std::span<const std::string> premise,
               const std::vector<std::vector<std::string>>& endings, const EmbeddingStore& store,
               const FeatureOptions& options = {});

// ---------------------------------------------------------------------------
// Dataset-level diagnostic

struct BiasScoreOptions {
  TrainingOptions training;  // training.seed also drives the split
  FeatureOptions features;
  double split_ratio = 0.8;
  double margin = 0.10;
};

struct BiasReport {
  double accuracy = 0;
  double chance = 0;
  double margin = 0;
  bool flagged = false;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  std::uint64_t seed = 0;
  std::size_t empty_hypotheses = 0;
};

OrderedJson to_json(const BiasReport& report);

// Sentences are tokenized from their raw text unless `annotations` resolves them.
BiasReport bias_score(const std::vector<NliExample>& dataset, const AnnotationStore* annotations,
                      const EmbeddingStore& store, const BiasScoreOptions& options);
BiasReport bias_score(const std::vector<McExample>& dataset, const AnnotationStore* annotations,
                      const EmbeddingStore& store, const BiasScoreOptions& options);

}  // namespace pasaug

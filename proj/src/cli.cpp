#include "pasaug/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pasaug/adversarial.hpp"
#include "pasaug/augment.hpp"
#include "pasaug/biasmodel.hpp"
#include "pasaug/corpus.hpp"
#include "pasaug/evalharness.hpp"
#include "pasaug/parallel.hpp"

namespace pasaug {

namespace fs = std::filesystem;

namespace {

std::string hex(const unsigned char* data, unsigned int len) {
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(data[i]);
  }
  return out.str();
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256 initialization failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t len) { EVP_DigestUpdate(ctx_, data, len); }

  std::string hex_digest() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    return hex(md, len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_bytes(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex_digest();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex_digest();
}

namespace {

struct GlobalConfig {
  std::string out_dir;
  unsigned jobs = 1;
  std::string log_level = "warn";
};

// Outputs are staged in memory and written only after the command succeeds,
// so a failing run leaves no partial files behind.
class RunOutputs {
 public:
  RunOutputs(std::string subcommand, const GlobalConfig& global)
      : dir_(global.out_dir), manifest_(OrderedJson::object()) {
    manifest_["tool"] = "pasaug";
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["config"] = OrderedJson::object();
    manifest_["inputs"] = OrderedJson::object();
    manifest_["outputs"] = OrderedJson::object();
    manifest_["counts"] = OrderedJson::object();
    manifest_["config"]["out_dir"] = global.out_dir;
    manifest_["config"]["jobs"] = global.jobs;
  }

  OrderedJson& config() { return manifest_["config"]; }
  OrderedJson& counts() { return manifest_["counts"]; }

  void input(const std::string& role, const fs::path& path) {
    OrderedJson entry = OrderedJson::object();
    entry["path"] = path.string();
    entry["sha256"] = sha256_file(path);
    manifest_["inputs"][role] = entry;
  }

  void output(const std::string& name, std::string bytes) {
    manifest_["outputs"][name] = sha256_bytes(bytes);
    staged_.emplace_back(name, std::move(bytes));
  }

  // Writes staged files, then `<manifest_stem>.manifest.json`.
  void commit(const std::string& manifest_stem) {
    manifest_["created_at"] = timestamp();
    output_raw(manifest_stem + ".manifest.json", manifest_.dump(2) + "\n");
    fs::create_directories(dir_);
    for (const auto& [name, bytes] : staged_) {
      const fs::path target = dir_ / name;
      const fs::path tmp = dir_ / (name + ".tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << bytes;
        if (!out) throw DataError("write failed for " + tmp.string());
      }
      fs::rename(tmp, target);
    }
  }

 private:
  void output_raw(const std::string& name, std::string bytes) { staged_.emplace_back(name, std::move(bytes)); }

  static std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  fs::path dir_;
  OrderedJson manifest_;
  std::vector<std::pair<std::string, std::string>> staged_;
};

std::string stem_of(const std::string& name) { return fs::path(name).stem().string(); }

std::string jsonl(const std::vector<OrderedJson>& records) {
  std::ostringstream out;
  write_jsonl(out, records);
  return out.str();
}

template <typename Example>
std::vector<OrderedJson> to_records(const std::vector<Example>& examples) {
  std::vector<OrderedJson> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(to_json(ex));
  return out;
}

// ---------------------------------------------------------------------------

struct AugmentConfig {
  std::string input;
  std::string annotations;
  std::string kind = "nli";
  int max_frames = 3;
  std::string targets = "both";
  std::string separator = " ";
  std::string on_missing = "skip";
  std::string output = "augmented.jsonl";
};

void cmd_augment(const AugmentConfig& cfg, const GlobalConfig& global) {
  RunOutputs run("augment", global);
  auto& c = run.config();
  c["kind"] = cfg.kind;
  c["max_frames"] = cfg.max_frames;
  c["targets"] = cfg.targets;
  c["separator"] = cfg.separator;
  c["on_missing"] = cfg.on_missing;
  c["output"] = cfg.output;

  AugmentPolicy policy;
  policy.max_frames = cfg.max_frames;
  policy.targets = parse_targets(cfg.targets);
  policy.separator = cfg.separator;
  policy.on_missing = cfg.on_missing == "fail" ? MissingAnnotation::fail : MissingAnnotation::skip;

  const AnnotationStore store = read_annotations(cfg.annotations);
  run.input("annotations", cfg.annotations);
  run.input("dataset", cfg.input);

  AugmentSummary summary;
  std::string body;
  if (cfg.kind == "mc") {
    body = jsonl(to_records(augment_dataset(read_mc_jsonl(cfg.input), store, policy, summary, global.jobs)));
  } else {
    body = jsonl(to_records(augment_dataset(read_nli_jsonl(cfg.input), store, policy, summary, global.jobs)));
  }
  if (summary.skipped_missing_annotation > 0) {
    spdlog::warn("{} example(s) left unaugmented: missing annotation", summary.skipped_missing_annotation);
  }

  OrderedJson sidecar = OrderedJson::object();
  sidecar["examples"] = summary.examples;
  sidecar["augmented"] = summary.augmented;
  sidecar["skipped_missing_annotation"] = summary.skipped_missing_annotation;
  run.counts() = sidecar;

  run.output(cfg.output, std::move(body));
  run.output(stem_of(cfg.output) + ".summary.json", sidecar.dump(2) + "\n");
  run.commit(stem_of(cfg.output));
}

// ---------------------------------------------------------------------------

struct GenConfig {
  std::string generator;
  std::string input;
  std::string annotations;
  std::string lexicon;
  std::string ne_pool;
  std::uint64_t seed = 0;
  std::string output;
};

void cmd_gen(const GenConfig& cfg, const GlobalConfig& global) {
  const auto provenance = parse_provenance(cfg.generator);
  if (!provenance) throw std::invalid_argument("unknown generator \"" + cfg.generator + "\"");
  const std::string output = cfg.output.empty() ? cfg.generator + ".jsonl" : cfg.output;

  RunOutputs run("gen", global);
  auto& c = run.config();
  c["generator"] = cfg.generator;
  c["seed"] = cfg.seed;
  c["output"] = output;

  std::size_t n_input = 0, ineligible = 0, missing = 0;
  std::vector<OrderedJson> records;

  if (!replaces_ending(*provenance)) {
    run.input("dataset", cfg.input);
    const auto dataset = read_nli_jsonl(cfg.input);
    n_input = dataset.size();
    auto generate = [&](const NliExample& ex) {
      switch (*provenance) {
        case Provenance::negation: return gen_stress_negation(ex);
        case Provenance::word_overlap: return gen_stress_overlap(ex);
        default: return gen_stress_length(ex);
      }
    };
    for (auto& out : parallel_map(dataset, generate, global.jobs)) {
      const std::string source = dataset[records.size()].id;
      records.push_back(to_json(GenOutcome{std::move(out), *provenance, std::nullopt, source}));
    }
  } else {
    if (cfg.annotations.empty()) throw DataError(cfg.generator + " requires --annotations");
    const AnnotationStore store = read_annotations(cfg.annotations);
    run.input("annotations", cfg.annotations);
    run.input("dataset", cfg.input);

    AntonymLexicon lexicon;
    std::vector<NamedEntity> pool;
    if (*provenance == Provenance::antonym) {
      if (cfg.lexicon.empty()) throw DataError("antonym requires --lexicon");
      lexicon = load_antonym_lexicon(cfg.lexicon);
      run.input("lexicon", cfg.lexicon);
    }
    if (*provenance == Provenance::ne_swap) {
      if (cfg.ne_pool.empty()) throw DataError("ne_swap requires --ne-pool");
      pool = load_ne_pool(cfg.ne_pool);
      run.input("ne_pool", cfg.ne_pool);
    }

    const auto dataset = read_mc_jsonl(cfg.input);
    n_input = dataset.size();
    struct Result {
      bool missing = false;
      std::optional<GenOutcome> outcome;
    };
    auto generate = [&](const McExample& ex) {
      Result r;
      const auto* premise = store.resolve(ex.id, "premise", ex.premise);
      if (!premise) {
        r.missing = true;
        return r;
      }
      switch (*provenance) {
        case Provenance::syntax_swap: r.outcome = gen_syntax_swap(ex, *premise, cfg.seed); break;
        case Provenance::antonym: r.outcome = gen_antonym(ex, *premise, lexicon, cfg.seed); break;
        default: r.outcome = gen_ne_swap(ex, *premise, pool, cfg.seed); break;
      }
      return r;
    };
    for (auto& r : parallel_map(dataset, generate, global.jobs)) {
      if (r.missing) {
        ++missing;
      } else if (!r.outcome) {
        ++ineligible;
      } else {
        records.push_back(to_json(*r.outcome));
      }
    }
    if (missing > 0) spdlog::warn("{} example(s) skipped: premise annotation missing", missing);
  }

  auto& counts = run.counts();
  counts["input"] = n_input;
  counts["generated"] = records.size();
  counts["ineligible"] = ineligible;
  counts["missing_annotation"] = missing;
  spdlog::info("{}: {} of {} example(s) generated, {} ineligible", cfg.generator, records.size(),
               n_input, ineligible);

  run.output(output, jsonl(records));
  run.commit(stem_of(output));
}

// ---------------------------------------------------------------------------

struct TagConfig {
  std::string input;
  std::string annotations;
  std::string output = "tags.jsonl";
};

void cmd_tag(const TagConfig& cfg, const GlobalConfig& global) {
  RunOutputs run("tag", global);
  run.config()["output"] = cfg.output;

  std::optional<AnnotationStore> store;
  if (!cfg.annotations.empty()) {
    store = read_annotations(cfg.annotations);
    run.input("annotations", cfg.annotations);
  }
  run.input("dataset", cfg.input);
  const auto dataset = read_nli_jsonl(cfg.input);

  auto tag = [&](const NliExample& ex) {
    const AnnotatedSentence* premise = store ? store->resolve(ex.id, "premise", ex.premise) : nullptr;
    const AnnotatedSentence* hypothesis =
        store ? store->resolve(ex.id, "hypothesis", ex.hypothesis) : nullptr;
    const auto raw_premise = premise ? token_texts(premise->tokens) : token_texts(tokenize(ex.premise));
    const auto raw_hypothesis =
        hypothesis ? token_texts(hypothesis->tokens) : token_texts(tokenize(ex.hypothesis));

    std::optional<std::vector<Span>> constituents;
    if (premise && premise->constituents) {
      constituents.emplace();
      for (Span c : *premise->constituents) {
        if (auto mapped = remap_span(raw_premise, c)) constituents->push_back(*mapped);
      }
    }
    const auto tags = tag_hans_heuristics(normalize_tokens(raw_premise),
                                          normalize_tokens(raw_hypothesis), constituents);
    OrderedJson j = OrderedJson::object();
    j["id"] = ex.id;
    j["lexical_overlap"] = tags.lexical_overlap;
    j["subsequence"] = tags.subsequence;
    j["constituent"] = tags.constituent ? OrderedJson(*tags.constituent) : OrderedJson(nullptr);
    j["subset"] = primary_subset(tags);
    return j;
  };
  const auto records = parallel_map(dataset, tag, global.jobs);

  auto& counts = run.counts();
  counts["input"] = records.size();
  for (const auto& r : records) {
    const std::string subset = r["subset"].get<std::string>();
    counts[subset] = counts.value(subset, 0) + 1;
  }
  run.output(cfg.output, jsonl(records));
  run.commit(stem_of(cfg.output));
}

// ---------------------------------------------------------------------------

struct BiasConfig {
  std::string input;
  std::string kind = "nli";
  std::string embeddings;
  std::string annotations;
  BiasScoreOptions options;
  std::string distance = "nearest";
  std::string fraction = "types";
  std::string output = "bias_report.json";
};

void cmd_bias_score(BiasConfig cfg, const GlobalConfig& global) {
  RunOutputs run("bias-score", global);
  auto& c = run.config();
  c["kind"] = cfg.kind;
  c["hidden"] = cfg.options.training.hidden;
  c["learning_rate"] = cfg.options.training.learning_rate;
  c["epochs"] = cfg.options.training.epochs;
  c["l2"] = cfg.options.training.l2;
  c["seed"] = cfg.options.training.seed;
  c["split"] = cfg.options.split_ratio;
  c["margin"] = cfg.options.margin;
  c["distance"] = cfg.distance;
  c["fraction"] = cfg.fraction;
  c["output"] = cfg.output;

  cfg.options.features.distance = cfg.distance == "all_pairs" ? DistanceAggregation::all_pairs
                                                              : DistanceAggregation::nearest_premise_token;
  cfg.options.features.fraction =
      cfg.fraction == "occurrences" ? OverlapCounting::occurrences : OverlapCounting::types;

  const EmbeddingStore store = load_embeddings(cfg.embeddings);
  run.input("embeddings", cfg.embeddings);
  std::optional<AnnotationStore> annotations;
  if (!cfg.annotations.empty()) {
    annotations = read_annotations(cfg.annotations);
    run.input("annotations", cfg.annotations);
  }
  run.input("dataset", cfg.input);
  const AnnotationStore* ann = annotations ? &*annotations : nullptr;

  const BiasReport report = cfg.kind == "mc"
                                ? bias_score(read_mc_jsonl(cfg.input), ann, store, cfg.options)
                                : bias_score(read_nli_jsonl(cfg.input), ann, store, cfg.options);
  if (report.empty_hypotheses > 0) {
    spdlog::warn("{} pair(s) had an empty hypothesis after normalization", report.empty_hypotheses);
  }
  const OrderedJson j = to_json(report);
  run.counts() = j;
  run.output(cfg.output, j.dump(2) + "\n");
  run.commit(stem_of(cfg.output));
  std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------------------

struct EvalConfig {
  std::string gold;
  std::string kind = "nli";
  std::vector<std::string> predictions;
  std::vector<std::int64_t> seeds;
  std::string model = "model";
  std::string dataset = "dataset";
  std::string tags;
  std::string format = "markdown";
  std::string output = "report";
};

std::string extension_for(ReportFormat f) {
  switch (f) {
    case ReportFormat::markdown: return ".md";
    case ReportFormat::json: return ".rendered.json";
    case ReportFormat::tsv: return ".tsv";
  }
  return ".md";
}

void cmd_eval(const EvalConfig& cfg, const GlobalConfig& global) {
  const ReportFormat format = parse_report_format(cfg.format);
  if (!cfg.seeds.empty() && cfg.seeds.size() != cfg.predictions.size()) {
    throw std::invalid_argument("--seeds must list one seed per --pred file");
  }
  RunOutputs run("eval", global);
  auto& c = run.config();
  c["kind"] = cfg.kind;
  c["model"] = cfg.model;
  c["dataset"] = cfg.dataset;
  c["format"] = cfg.format;
  c["output"] = cfg.output;

  run.input("gold", cfg.gold);
  const GoldSet gold = cfg.kind == "mc" ? gold_from(read_mc_jsonl(cfg.gold)) : gold_from(read_nli_jsonl(cfg.gold));

  std::vector<PredictionFile> runs;
  for (std::size_t i = 0; i < cfg.predictions.size(); ++i) {
    const std::int64_t seed = cfg.seeds.empty() ? static_cast<std::int64_t>(i) : cfg.seeds[i];
    runs.push_back(read_predictions(cfg.predictions[i], seed, cfg.model));
    run.input("prediction_" + std::to_string(i), cfg.predictions[i]);
  }

  std::optional<std::map<std::string, std::string>> tags;
  if (!cfg.tags.empty()) {
    run.input("tags", cfg.tags);
    tags.emplace();
    std::ifstream in(cfg.tags);
    if (!in) throw DataError("cannot open " + cfg.tags);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = OrderedJson::parse(line);
        (*tags)[j.at("id").get<std::string>()] = j.at("subset").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw DataError(cfg.tags + ": " + e.what(), line_no);
      }
    }
  }

  RunReport report;
  add_runs(report, cfg.model, cfg.dataset, runs, gold, tags ? &*tags : nullptr);
  run.counts()["rows"] = report.rows.size();
  run.counts()["n_seeds"] = runs.size();

  const std::string rendered = render_report(report, format);
  run.output(cfg.output + ".json", to_json(report).dump(2) + "\n");
  if (format != ReportFormat::json) run.output(cfg.output + extension_for(format), rendered);
  run.commit(cfg.output);
  std::cout << rendered;
}

// ---------------------------------------------------------------------------

struct ReportConfig {
  std::vector<std::string> inputs;
  std::string format = "markdown";
  std::string output;
};

void cmd_report(const ReportConfig& cfg, const GlobalConfig& global) {
  const ReportFormat format = parse_report_format(cfg.format);
  RunReport merged;
  RunOutputs run("report", global);
  run.config()["format"] = cfg.format;
  for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
    std::ifstream in(cfg.inputs[i]);
    if (!in) throw DataError("cannot open " + cfg.inputs[i]);
    OrderedJson j;
    try {
      j = OrderedJson::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(cfg.inputs[i] + ": " + e.what());
    }
    const RunReport part = report_from_json(j);
    merged.rows.insert(merged.rows.end(), part.rows.begin(), part.rows.end());
    run.input("report_" + std::to_string(i), cfg.inputs[i]);
  }
  const std::string rendered = render_report(merged, format);
  if (!cfg.output.empty()) {
    run.config()["output"] = cfg.output;
    run.counts()["rows"] = merged.rows.size();
    run.output(cfg.output, rendered);
    run.commit(stem_of(cfg.output));
  }
  std::cout << rendered;
}

void configure_logging(const std::string& level) {
  static auto logger = [] {
    auto l = spdlog::stderr_color_mt("pasaug");
    l->set_pattern("[%l] %v");
    return l;
  }();
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Predicate-argument augmentation, adversarial set generation, "
               "lexical-overlap bias diagnostics and multi-seed evaluation."};
  app.require_subcommand(1);

  GlobalConfig global;
  if (const char* env = std::getenv(kOutDirEnv)) global.out_dir = env;
  if (global.out_dir.empty()) global.out_dir = ".";
  app.add_option("--out-dir", global.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
  app.add_option("-j,--jobs", global.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--log-level", global.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  const std::vector<std::string> kinds{"nli", "mc"};

  AugmentConfig aug;
  auto* augment = app.add_subcommand("augment", "Append predicate-argument markup to sentences");
  augment->add_option("-i,--input", aug.input, "Dataset JSONL")->required();
  augment->add_option("-a,--annotations", aug.annotations, "Annotation JSONL")->required();
  augment->add_option("--kind", aug.kind)->check(CLI::IsMember(kinds));
  augment->add_option("--max-frames", aug.max_frames)->check(CLI::NonNegativeNumber);
  augment->add_option("--targets", aug.targets)
      ->check(CLI::IsMember({"premise_only", "hypothesis_only", "both"}));
  augment->add_option("--separator", aug.separator);
  augment->add_option("--on-missing", aug.on_missing)->check(CLI::IsMember({"skip", "fail"}));
  augment->add_option("-o,--output", aug.output, "Output file name inside --out-dir");

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an adversarial evaluation set");
  gen_cmd->add_option("-g,--generator", gen.generator)
      ->required()
      ->check(CLI::IsMember({"negation", "word_overlap", "length_mismatch", "syntax_swap", "antonym",
                             "ne_swap"}));
  gen_cmd->add_option("-i,--input", gen.input)->required();
  gen_cmd->add_option("-a,--annotations", gen.annotations);
  gen_cmd->add_option("--lexicon", gen.lexicon, "Antonym TSV");
  gen_cmd->add_option("--ne-pool", gen.ne_pool, "Named-entity TSV");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("-o,--output", gen.output);

  TagConfig tag;
  auto* tag_cmd = app.add_subcommand("tag", "Tag NLI pairs with lexical-overlap heuristics");
  tag_cmd->add_option("-i,--input", tag.input)->required();
  tag_cmd->add_option("-a,--annotations", tag.annotations);
  tag_cmd->add_option("-o,--output", tag.output);

  BiasConfig bias;
  auto* bias_cmd = app.add_subcommand("bias-score", "Diagnose lexical-overlap bias in a dataset");
  bias_cmd->add_option("-i,--input", bias.input)->required();
  bias_cmd->add_option("--kind", bias.kind)->check(CLI::IsMember(kinds));
  bias_cmd->add_option("-e,--embeddings", bias.embeddings)->required();
  bias_cmd->add_option("-a,--annotations", bias.annotations);
  bias_cmd->add_option("--hidden", bias.options.training.hidden)->check(CLI::PositiveNumber);
  bias_cmd->add_option("--learning-rate", bias.options.training.learning_rate)->check(CLI::PositiveNumber);
  bias_cmd->add_option("--epochs", bias.options.training.epochs)->check(CLI::NonNegativeNumber);
  bias_cmd->add_option("--l2", bias.options.training.l2)->check(CLI::NonNegativeNumber);
  bias_cmd->add_option("--seed", bias.options.training.seed);
  bias_cmd->add_option("--split", bias.options.split_ratio)->check(CLI::Range(0.0, 1.0));
  bias_cmd->add_option("--margin", bias.options.margin);
  bias_cmd->add_option("--distance", bias.distance)->check(CLI::IsMember({"nearest", "all_pairs"}));
  bias_cmd->add_option("--fraction", bias.fraction)->check(CLI::IsMember({"types", "occurrences"}));
  bias_cmd->add_option("-o,--output", bias.output);

  EvalConfig ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score prediction files and aggregate over seeds");
  eval_cmd->add_option("-g,--gold", ev.gold)->required();
  eval_cmd->add_option("--kind", ev.kind)->check(CLI::IsMember(kinds));
  eval_cmd->add_option("-p,--pred", ev.predictions, "Prediction JSONL, one per seed")->required();
  eval_cmd->add_option("--seeds", ev.seeds)->delimiter(',');
  eval_cmd->add_option("--model", ev.model);
  eval_cmd->add_option("--dataset", ev.dataset);
  eval_cmd->add_option("--tags", ev.tags, "Subset tags JSONL from `tag`");
  eval_cmd->add_option("--format", ev.format)->check(CLI::IsMember({"markdown", "md", "json", "tsv"}));
  eval_cmd->add_option("-o,--output", ev.output, "Output stem inside --out-dir");

  ReportConfig rep;
  auto* report_cmd = app.add_subcommand("report", "Merge and render report JSON files");
  report_cmd->add_option("-i,--input", rep.inputs)->required();
  report_cmd->add_option("--format", rep.format)->check(CLI::IsMember({"markdown", "md", "json", "tsv"}));
  report_cmd->add_option("-o,--output", rep.output, "Also write the rendering into --out-dir");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    configure_logging(global.log_level);
    if (*augment) cmd_augment(aug, global);
    if (*gen_cmd) cmd_gen(gen, global);
    if (*tag_cmd) cmd_tag(tag, global);
    if (*bias_cmd) cmd_bias_score(bias, global);
    if (*eval_cmd) cmd_eval(ev, global);
    if (*report_cmd) cmd_report(rep, global);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace pasaug

#include "seedex/pipeline.hpp"

#include "seedex/enrich.hpp"
#include "seedex/error.hpp"
#include "seedex/explain.hpp"
#include "seedex/models.hpp"
#include "seedex/report.hpp"
#include "seedex/rng.hpp"
#include "seedex/stats.hpp"
#include "seedex/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace seedex::pipeline {

namespace fs = std::filesystem;
using io::Json;

namespace {

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void get(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

Json synth_to_json(const corpus::SynthSpec& s) {
  Json planted = Json::array();
  for (const auto& p : s.planted) {
    planted.push_back(
        {{"surface", p.surface}, {"pos", p.pos}, {"p_opinion", p.p_opinion}, {"p_news", p.p_news}});
  }
  return {{"docs_per_class", s.docs_per_class},   {"shared_vocab_size", s.shared_vocab_size},
          {"class_vocab_size", s.class_vocab_size}, {"class_word_rate", s.class_word_rate},
          {"min_length", s.min_length},           {"max_length", s.max_length},
          {"sentence_rate", s.sentence_rate},     {"planted", planted}};
}

corpus::SynthSpec synth_from_json(const Json& j) {
  const std::string where = "synth";
  check_keys(j, where,
             {"docs_per_class", "shared_vocab_size", "class_vocab_size", "class_word_rate",
              "min_length", "max_length", "sentence_rate", "planted"});
  corpus::SynthSpec s;
  get(j, "docs_per_class", s.docs_per_class, where);
  get(j, "shared_vocab_size", s.shared_vocab_size, where);
  get(j, "class_vocab_size", s.class_vocab_size, where);
  get(j, "class_word_rate", s.class_word_rate, where);
  get(j, "min_length", s.min_length, where);
  get(j, "max_length", s.max_length, where);
  get(j, "sentence_rate", s.sentence_rate, where);
  if (j.contains("planted")) {
    for (const auto& p : j.at("planted")) {
      check_keys(p, "synth.planted[]", {"surface", "pos", "p_opinion", "p_news"});
      corpus::PlantedToken t;
      get(p, "surface", t.surface, "synth.planted[]");
      get(p, "pos", t.pos, "synth.planted[]");
      get(p, "p_opinion", t.p_opinion, "synth.planted[]");
      get(p, "p_news", t.p_news, "synth.planted[]");
      s.planted.push_back(std::move(t));
    }
  }
  return s;
}

PipelineConfig config_from_json(const Json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"corpus", "lexicon_dir", "output_dir", "seed", "split", "ensemble", "logreg", "neural",
              "stats", "enrich"});
  PipelineConfig c;
  std::string path;
  if (j.contains("corpus")) {
    const Json& cj = j.at("corpus");
    check_keys(cj, "corpus", {"path", "synth"});
    get(cj, "path", path, "corpus");
    c.corpus_path = resolve(base_dir, path);
    if (cj.contains("synth")) c.synth = synth_from_json(cj.at("synth"));
  }
  path.clear();
  get(j, "lexicon_dir", path, "config");
  c.lexicon_dir = resolve(base_dir, path);
  if (j.contains("output_dir")) {
    path.clear();
    get(j, "output_dir", path, "config");
    c.output_dir = resolve(base_dir, path);
  }
  get(j, "seed", c.seed, "config");
  if (j.contains("split")) {
    const Json& sj = j.at("split");
    check_keys(sj, "split", {"train", "validation", "test"});
    get(sj, "train", c.ratios.train, "split");
    get(sj, "validation", c.ratios.validation, "split");
    get(sj, "test", c.ratios.test, "split");
  }
  if (j.contains("ensemble")) {
    const Json& ej = j.at("ensemble");
    check_keys(ej, "ensemble", {"seeds", "workers"});
    get(ej, "seeds", c.ensemble_seeds, "ensemble");
    get(ej, "workers", c.workers, "ensemble");
  }
  if (j.contains("logreg")) {
    Json lj = j.at("logreg");
    if (lj.is_object() && lj.contains("grid")) {
      c.logreg_grid.clear();
      get(lj, "grid", c.logreg_grid, "logreg");
      lj.erase("grid");
    }
    c.logreg = io::train_config_from_json(lj, c.logreg);
  }
  if (j.contains("neural")) c.neural = io::train_config_from_json(j.at("neural"), c.neural);
  if (j.contains("stats")) {
    const Json& sj = j.at("stats");
    check_keys(sj, "stats",
               {"k_values", "max_documents", "resamples", "level", "minimality_threshold"});
    get(sj, "k_values", c.k_values, "stats");
    get(sj, "max_documents", c.max_documents, "stats");
    get(sj, "resamples", c.resamples, "stats");
    get(sj, "level", c.level, "stats");
    get(sj, "minimality_threshold", c.minimality_threshold, "stats");
  }
  if (j.contains("enrich")) {
    const Json& ej = j.at("enrich");
    check_keys(ej, "enrich",
               {"min_count", "top_k", "min_models", "per_class", "equivalent_models",
                "token_list_features"});
    get(ej, "min_count", c.min_count, "enrich");
    get(ej, "top_k", c.top_k, "enrich");
    get(ej, "min_models", c.min_models, "enrich");
    get(ej, "per_class", c.per_class, "enrich");
    get(ej, "equivalent_models", c.equivalent_models, "enrich");
    get(ej, "token_list_features", c.token_list_features, "enrich");
  }
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return config_from_json(io::read_json(path), path.parent_path());
}

Json to_json(const PipelineConfig& c) {
  Json logreg = io::to_json(c.logreg);
  logreg["grid"] = c.logreg_grid;
  return {{"corpus", {{"path", c.corpus_path.string()}, {"synth", synth_to_json(c.synth)}}},
          {"lexicon_dir", c.lexicon_dir.string()},
          {"output_dir", c.output_dir.string()},
          {"seed", c.seed},
          {"split",
           {{"train", c.ratios.train}, {"validation", c.ratios.validation}, {"test", c.ratios.test}}},
          {"ensemble", {{"seeds", c.ensemble_seeds}, {"workers", c.workers}}},
          {"logreg", logreg},
          {"neural", io::to_json(c.neural)},
          {"stats",
           {{"k_values", c.k_values},
            {"max_documents", c.max_documents},
            {"resamples", c.resamples},
            {"level", c.level},
            {"minimality_threshold", c.minimality_threshold}}},
          {"enrich",
           {{"min_count", c.min_count},
            {"top_k", c.top_k},
            {"min_models", c.min_models},
            {"per_class", c.per_class},
            {"equivalent_models", c.equivalent_models},
            {"token_list_features", c.token_list_features}}}};
}

void apply_seed_override(PipelineConfig& config) {
  const char* v = std::getenv(kSeedEnv);
  if (!v || !*v) return;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end != '\0') throw ConfigError(std::string(kSeedEnv) + " is not an integer: '" + v + "'");
  config.seed = s;
}

lingfeat::LexiconSet load_lexicons(const fs::path& dir) {
  lingfeat::LexiconSet set = lingfeat::builtin_lexicons();
  if (dir.empty()) return set;
  if (!fs::is_directory(dir)) throw ConfigError("lexicon directory not found: " + dir.string());
  std::set<std::string> scalar;
  for (const auto& f : lingfeat::enriched_registry().features()) {
    if (f.is_scalar()) scalar.insert(f.lexicon);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    const std::string name = p.stem().string();
    const auto kind =
        scalar.count(name) ? lingfeat::LexiconKind::scalar : lingfeat::LexiconKind::membership;
    set.insert_or_assign(name, lingfeat::load_lexicon(p, name, kind));
  }
  return set;
}

void validate(const PipelineConfig& c) {
  if (!c.corpus_path.empty() && !fs::is_regular_file(c.corpus_path)) {
    throw ConfigError("corpus file not found: " + c.corpus_path.string());
  }
  if (c.lexicon_dir.empty()) throw ConfigError("lexicon_dir is required");
  const auto lexicons = load_lexicons(c.lexicon_dir);
  lingfeat::check_lexicons(lingfeat::enriched_registry(), lexicons);
  if (c.output_dir.empty()) throw ConfigError("output_dir is required");

  const double sum = c.ratios.train + c.ratios.validation + c.ratios.test;
  if (c.ratios.train < 0 || c.ratios.validation < 0 || c.ratios.test < 0 ||
      std::abs(sum - 1) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  if (!(c.ratios.validation > 0) || !(c.ratios.test > 0)) {
    throw ConfigError("validation and test ratios must be positive");
  }
  models::validate(c.logreg);
  models::validate(c.neural);
  if (!(c.logreg.l2 > 0)) throw ConfigError("logreg.l2 must be positive");
  if (c.logreg_grid.empty()) throw ConfigError("logreg grid is empty");
  for (const auto& [key, values] : c.logreg_grid) {
    if (key != "l2" && key != "max_iter" && key != "fit_intercept") {
      throw ConfigError("unsupported grid key '" + key + "'");
    }
    if (values.empty()) throw ConfigError("grid key '" + key + "' has no values");
  }

  const auto seeds = models::parse_seed_list(c.ensemble_seeds);
  if (c.workers == 0) throw ConfigError("workers must be positive");
  if (c.k_values.empty()) throw ConfigError("k_values is empty");
  for (auto k : c.k_values) {
    if (k < 2 || k > seeds.size()) {
      throw ConfigError("k = " + std::to_string(k) + " outside [2, " +
                        std::to_string(seeds.size()) + "]");
    }
  }
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(c.max_documents, "max_documents");
  positive(c.min_count, "min_count");
  positive(c.top_k, "top_k");
  positive(c.min_models, "min_models");
  positive(c.per_class, "per_class");
  positive(c.equivalent_models, "equivalent_models");
  if (c.resamples < 100) throw ConfigError("resamples must be at least 100");
  if (!(c.level > 0 && c.level < 1)) throw ConfigError("level must lie in (0, 1)");
  if (!(c.minimality_threshold >= 0)) throw ConfigError("minimality_threshold must be >= 0");
  if (c.min_models > c.equivalent_models) {
    throw ConfigError("min_models exceeds equivalent_models");
  }
  if (c.equivalent_models > seeds.size()) {
    throw ConfigError("equivalent_models exceeds the ensemble size");
  }
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, const std::string& content) {
    io::write_file(root_ / rel, content);
    artifacts_[rel] = Artifact{rel, text::sha256_hex(content), content.size()};
  }

  template <class F>
  void write_stream(const std::string& rel, F&& fill) {
    std::ostringstream os;
    fill(os);
    write(rel, os.str());
  }

  std::vector<Artifact> artifacts() const {
    std::vector<Artifact> out;
    for (const auto& [path, a] : artifacts_) out.push_back(a);
    return out;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::map<std::string, Artifact> artifacts_;
};

std::string safe_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

std::string model_id(std::uint64_t seed) { return "neural-seed-" + std::to_string(seed); }

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  validate(config);
  const auto lexicons = load_lexicons(config.lexicon_dir);
  const auto base_registry = lingfeat::baseline_registry();

  fs::create_directories(config.output_dir);
  const fs::path partial = config.output_dir / ".partial";
  const fs::path manifest_path = config.output_dir / "manifest.json";
  fs::remove(partial);
  fs::remove(manifest_path);

  ArtifactWriter out(config.output_dir);
  Json summary;
  std::vector<std::string> notes;
  std::string stage = "setup";
  auto begin = [&](const char* name) {
    stage = name;
    if (log) *log << "[seedex] stage " << name << "\n" << std::flush;
  };

  try {
    begin("corpus");
    corpus::CorpusStore store = config.corpus_path.empty()
                                    ? corpus::synth_corpus(config.synth, config.seed)
                                    : corpus::load_corpus(config.corpus_path);
    if (!store.split_assignment()) store = corpus::split_corpus(store, config.ratios, config.seed);
    out.write_stream("corpus.jsonl", [&](std::ostream& os) { corpus::write_corpus(os, store); });
    const corpus::CorpusSplits splits = corpus::materialize_splits(store);
    if (splits.train.empty() || splits.validation.empty() || splits.test.empty()) {
      throw DataError("every split must be non-empty");
    }
    summary["seed"] = config.seed;
    summary["documents"] = {{"train", splits.train.size()},
                            {"validation", splits.validation.size()},
                            {"test", splits.test.size()}};

    begin("feature-model");
    const auto lr_train = models::featurize(splits.train, base_registry, lexicons);
    const auto lr_val = models::featurize(splits.validation, base_registry, lexicons);
    const auto lr_test = models::featurize(splits.test, base_registry, lexicons);
    const auto grid = models::grid_search_logreg(lr_train, lr_val, config.logreg, config.logreg_grid);
    const models::LogRegModel& lr = grid.model;
    const double lr_test_acc = models::accuracy(lr, lr_test);
    const auto lr_again = models::train_logreg(lr_train.features, lr_train.labels, grid.config);
    const double lr_again_acc = models::accuracy(lr_again, lr_test);
    out.write("models/ling_lr.json", io::to_json(lr).dump(1) + "\n");
    summary["ling_lr"] = {{"config", io::to_json(grid.config)},
                          {"validation_accuracy", models::accuracy(lr, lr_val)},
                          {"test_accuracy", lr_test_acc},
                          {"retrain_identical", lr_again.coefficients == lr.coefficients &&
                                                    lr_again.intercept == lr.intercept}};

    begin("ensemble");
    const auto seeds = models::parse_seed_list(config.ensemble_seeds);
    const models::Ensemble ensemble =
        models::train_ensemble(splits, seeds, config.neural, config.workers);
    out.write_stream("ensemble.csv", [&](std::ostream& os) {
      os << "seed,validation_accuracy,test_accuracy\n";
      for (const auto& m : ensemble.members) {
        os << m.seed << ',' << text::format_g17(m.validation_accuracy) << ','
           << text::format_g17(m.test_accuracy) << '\n';
      }
    });
    Json members = Json::array();
    for (const auto& m : ensemble.members) {
      members.push_back({{"seed", m.seed},
                         {"validation_accuracy", m.validation_accuracy},
                         {"test_accuracy", m.test_accuracy}});
    }
    summary["ensemble"] = members;

    begin("equivalence");
    const std::size_t n_test = splits.test.size();
    std::vector<report::NamedEquivalence> rows;
    {
      const std::vector<double> acc{lr_test_acc, lr_again_acc};
      const std::vector<std::uint64_t> ids{0, 1};
      rows.push_back({"ling-lr", stats::select_equivalent(acc, ids, 2,
                                                          stats::EquivalenceMode::closest, n_test)});
    }
    rows.push_back({"neural-all", stats::select_equivalent(ensemble, ensemble.members.size(),
                                                           stats::EquivalenceMode::closest, n_test)});
    std::optional<report::NamedEquivalence> chosen;
    auto ks = config.k_values;
    std::sort(ks.rbegin(), ks.rend());
    for (auto k : ks) {
      for (auto mode : {stats::EquivalenceMode::closest, stats::EquivalenceMode::most_accurate}) {
        const std::string name =
            "neural-" + std::to_string(k) + "-" + std::string(stats::mode_name(mode));
        rows.push_back({name, stats::select_equivalent(ensemble, k, mode, n_test)});
        if (!chosen && mode == stats::EquivalenceMode::closest && rows.back().set.equivalent) {
          chosen = rows.back();
        }
      }
    }
    if (!chosen) {
      chosen = rows.back();
      for (const auto& r : rows) {
        if (r.name == "neural-" + std::to_string(ks.back()) + "-closest") chosen = r;
      }
      notes.push_back("no closest subset passed z <= 1.96; using " + chosen->name);
    }
    out.write_stream("equivalence.csv",
                     [&](std::ostream& os) { report::export_equivalence(os, rows); });
    const stats::EquivalenceSet& eq = chosen->set;
    summary["equivalent_set"] = {{"name", chosen->name},     {"members", eq.members},
                                 {"epsilon", eq.epsilon},    {"z", eq.z},
                                 {"p", eq.p},                {"equivalent", eq.equivalent}};
    std::vector<models::NeuralModel> equivalent;
    for (auto i : eq.indices) equivalent.push_back(ensemble.members[i].model);

    begin("explain");
    const auto concordant = stats::concordant_inputs(equivalent, splits.test);
    summary["concordant_documents"] = concordant.size();
    if (concordant.empty()) throw DataError("no concordant test document for the equivalent set");
    std::vector<std::size_t> picked(
        concordant.begin(),
        concordant.begin() +
            static_cast<std::ptrdiff_t>(std::min(config.max_documents, concordant.size())));
    std::map<std::string, std::vector<explain::Explanation>> lrp_by_doc;
    std::map<std::string, explain::Explanation> lam_by_doc;
    std::ostringstream lrp_jsonl, lam_jsonl;
    for (auto d : picked) {
      const auto& doc = splits.test[d];
      for (const auto& m : equivalent) {
        auto e = explain::lrp_explain(m, doc, model_id(m.seed));
        explain::write_explanation(lrp_jsonl, e);
        lrp_by_doc[doc.id].push_back(std::move(e));
      }
      const auto x = lingfeat::extract_features(doc, base_registry, lexicons);
      const auto inc = lingfeat::build_incidence(doc, base_registry, lexicons);
      auto lam = explain::lam_explain(lr, doc, inc, models::predict(lr, x).label);
      explain::write_explanation(lam_jsonl, lam);
      lam_by_doc.emplace(doc.id, std::move(lam));
    }
    out.write("explanations/lrp.jsonl", lrp_jsonl.str());
    out.write("explanations/lam.jsonl", lam_jsonl.str());

    begin("correlate");
    std::ostringstream corr;
    corr << "doc_id,explanations,r,lo,hi,level,resamples\n";
    Json correlations = Json::array();
    for (auto d : picked) {
      const auto& doc = splits.test[d];
      const auto& expl = lrp_by_doc.at(doc.id);
      std::vector<std::vector<double>> rel;
      for (const auto& e : expl) rel.push_back(e.relevances);
      if (rel.size() % 2) rel.pop_back();
      const auto dist = stats::characterize_distribution(expl);
      out.write_stream("boxplots/" + safe_name(doc.id) + ".csv",
                       [&](std::ostream& os) { report::export_boxplot_data(os, dist); });
      if (rel.size() < 2) {
        notes.push_back("correlation skipped for " + doc.id + ": fewer than 2 explanations");
        continue;
      }
      try {
        const auto r = stats::bootstrap_ci(rel, config.resamples, config.level,
                                           derive_stream_key(config.seed, "bootstrap/" + doc.id),
                                           config.workers);
        corr << text::csv_field(doc.id) << ',' << rel.size() << ',' << text::format_g17(r.r) << ','
             << text::format_g17(r.lo) << ',' << text::format_g17(r.hi) << ','
             << text::format_g17(r.level) << ',' << r.resamples << '\n';
        correlations.push_back({{"doc_id", doc.id}, {"r", r.r}, {"lo", r.lo}, {"hi", r.hi}});
      } catch (const NumericError& e) {
        notes.push_back("correlation undefined for " + doc.id + ": " + e.what());
      }
    }
    out.write("correlation.csv", corr.str());
    summary["correlation"] = correlations;

    begin("report");
    for (auto d : picked) {
      const auto& doc = splits.test[d];
      const std::string stem = "maps/" + safe_name(doc.id);
      out.write(stem + "_lam.html",
                report::render_attention_map(doc, lam_by_doc.at(doc.id), report::Palette::orange));
      const auto& first = lrp_by_doc.at(doc.id).front();
      out.write(stem + "_" + safe_name(first.model_id) + ".html",
                report::render_attention_map(doc, first, report::Palette::blue));
    }

    begin("minimality");
    out.write_stream("minimality.csv", [&](std::ostream& os) {
      os << "model_id,doc_id,method,tokens,minimality\n";
      auto row = [&](const explain::Explanation& e) {
        os << text::csv_field(e.model_id) << ',' << text::csv_field(e.doc_id) << ',' << e.method
           << ',' << e.relevances.size() << ','
           << explain::minimality(e, config.minimality_threshold) << '\n';
      };
      for (auto d : picked) {
        const auto& id = splits.test[d].id;
        row(lam_by_doc.at(id));
        for (const auto& e : lrp_by_doc.at(id)) row(e);
      }
    });

    begin("enrich");
    const std::size_t used = std::min(config.equivalent_models, equivalent.size());
    if (used < config.min_models) {
      throw DataError("equivalent set has " + std::to_string(used) + " models but min_models is " +
                      std::to_string(config.min_models));
    }
    std::vector<enrich::ClassRankings> rankings;
    for (std::size_t m = 0; m < used; ++m) {
      std::vector<explain::Explanation> maps;
      for (const auto& doc : splits.test) {
        maps.push_back(explain::lrp_explain(equivalent[m], doc, model_id(equivalent[m].seed)));
      }
      rankings.push_back(enrich::rank_tokens(maps, config.min_count));
    }
    const auto stable = enrich::stable_top_tokens(rankings, config.top_k, config.min_models);
    const auto lists = enrich::class_token_lists(stable, config.per_class);
    out.write_stream("tokens/opinion.csv",
                     [&](std::ostream& os) { enrich::write_token_list_csv(os, lists.opinion); });
    out.write_stream("tokens/news.csv",
                     [&](std::ostream& os) { enrich::write_token_list_csv(os, lists.news); });
    Json token_json{{"opinion", Json::array()}, {"news", Json::array()}};
    for (const auto& t : lists.opinion) token_json["opinion"].push_back(t.token);
    for (const auto& t : lists.news) token_json["news"].push_back(t.token);
    summary["stable_tokens"] = token_json;

    auto enriched_features = lingfeat::enriched_registry().features();
    lingfeat::LexiconSet enrich_lexicons = lexicons;
    if (config.token_list_features) {
      auto ext = enrich::token_list_features(lists);
      for (auto& f : ext.features) enriched_features.push_back(std::move(f));
      for (auto& [name, lex] : ext.lexicons) enrich_lexicons.insert_or_assign(name, std::move(lex));
    }
    std::vector<std::string> ids;
    for (const auto& f : enriched_features) ids.push_back(f.id);
    const auto enriched_registry = lingfeat::registry_from_ids(ids, enriched_features);
    const std::vector<enrich::NamedTestSet> test_sets{{"test", splits.test},
                                                      {"validation", splits.validation}};
    const auto comparison = enrich::enrich_and_compare(splits.train, base_registry,
                                                       enriched_registry, enrich_lexicons,
                                                       test_sets, grid.config);
    out.write_stream("enrichment.csv",
                     [&](std::ostream& os) { report::export_comparisons(os, comparison.rows); });
    out.write("models/ling_lr_enriched.json", io::to_json(comparison.enriched).dump(1) + "\n");
    Json enrichment = Json::array();
    for (const auto& c : comparison.rows) {
      enrichment.push_back({{"test_set", c.test_set},
                            {"n", c.n},
                            {"baseline_accuracy", c.baseline_accuracy},
                            {"enriched_accuracy", c.enriched_accuracy},
                            {"z", c.z},
                            {"p", c.p},
                            {"significant", c.significant}});
    }
    summary["enrichment"] = {{"registry", enriched_registry.version()},
                             {"features", enriched_registry.size()},
                             {"rows", enrichment}};

    begin("manifest");
    summary["notes"] = notes;
    out.write("summary.json", summary.dump(1) + "\n");
    Json effective = to_json(config);
    effective.erase("output_dir");
    out.write("config.json", effective.dump(1) + "\n");
  } catch (const std::exception& e) {
    io::write_file(partial, "stage: " + stage + "\ncause: " + e.what() + "\n");
    throw StageError(stage, e.what());
  }

  PipelineResult result;
  result.artifacts = out.artifacts();
  Json list = Json::array();
  for (const auto& a : result.artifacts) {
    list.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  io::write_json(manifest_path, {{"artifacts", list}});
  result.manifest = manifest_path;
  result.summary = std::move(summary);
  if (log) *log << "[seedex] wrote " << result.artifacts.size() << " artifacts\n";
  return result;
}

}  // namespace seedex::pipeline

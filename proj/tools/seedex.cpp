// seedex command-line driver.

#include "seedex/corpus.hpp"
#include "seedex/enrich.hpp"
#include "seedex/error.hpp"
#include "seedex/explain.hpp"
#include "seedex/lingfeat.hpp"
#include "seedex/logreg.hpp"
#include "seedex/models.hpp"
#include "seedex/neural.hpp"
#include "seedex/pipeline.hpp"
#include "seedex/report.hpp"
#include "seedex/serialize.hpp"
#include "seedex/stats.hpp"
#include "seedex/text.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace seedex;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

pipeline::PipelineConfig load_config(const Globals& g) {
  pipeline::PipelineConfig c;
  if (!g.config.empty()) c = pipeline::load_pipeline_config(g.config);
  pipeline::apply_seed_override(c);
  if (g.seed) c.seed = *g.seed;
  if (!g.out.empty()) c.output_dir = g.out;
  return c;
}

std::uint64_t seed_of(const Globals& g) { return load_config(g).seed; }

std::string require_out(const Globals& g) {
  if (g.out.empty()) throw ConfigError("--out is required");
  return g.out;
}

// Writes to --out, or stdout when it is "-".
void emit(const Globals& g, const std::string& content) {
  const std::string out = require_out(g);
  if (out == "-") {
    std::cout << content;
  } else {
    io::write_file(out, content);
  }
}

lingfeat::LexiconSet lexicons_for(const Globals& g, const std::string& dir) {
  if (!dir.empty()) return pipeline::load_lexicons(dir);
  return pipeline::load_lexicons(load_config(g).lexicon_dir);
}

lingfeat::FeatureRegistry registry_named(const std::string& name) {
  if (name == "baseline") return lingfeat::baseline_registry();
  if (name == "enriched") return lingfeat::enriched_registry();
  throw ConfigError("registry must be 'baseline' or 'enriched'");
}

std::vector<explain::Explanation> read_explanations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return explain::read_explanations(in);
}

std::vector<explain::Explanation> for_doc(const std::vector<explain::Explanation>& all,
                                          const std::string& doc_id) {
  std::vector<explain::Explanation> out;
  for (const auto& e : all) {
    if (e.doc_id == doc_id) out.push_back(e);
  }
  if (out.empty()) throw DataError("no explanation for document '" + doc_id + "'");
  return out;
}

std::vector<corpus::AnnotatedDocument> docs_of(const corpus::CorpusStore& store,
                                               const std::string& split) {
  if (split == "all") return store.documents();
  return store.subset(corpus::parse_split(split));
}

int fail(const std::exception& e, int code) {
  std::cerr << "seedex: error: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seedex: seeded explanation-stability toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "pipeline configuration file (JSON)");
  app.add_option("--seed", g.seed, "master seed; overrides the config and " +
                                       std::string(pipeline::kSeedEnv));
  app.add_option("--out", g.out, "output file or directory ('-' for stdout where supported)");

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "generate or split corpora");
  corpus_cmd->require_subcommand(1);
  corpus_cmd->fallthrough();
  std::string synth_spec;
  auto* gen = corpus_cmd->add_subcommand("gen", "write a synthetic corpus as JSONL");
  gen->add_option("--spec", synth_spec, "synthetic corpus spec (JSON); defaults apply otherwise");
  gen->callback([&] {
    corpus::SynthSpec spec = load_config(g).synth;
    if (!synth_spec.empty()) spec = pipeline::synth_from_json(io::read_json(synth_spec));
    std::ostringstream os;
    corpus::write_corpus(os, corpus::synth_corpus(spec, seed_of(g)));
    emit(g, os.str());
  });
  std::string split_in;
  std::vector<double> ratios{0.8, 0.1, 0.1};
  auto* split = corpus_cmd->add_subcommand("split", "assign train/validation/test splits");
  split->add_option("--in", split_in, "input corpus (JSONL)")->required();
  split->add_option("--ratios", ratios, "train validation test fractions")->expected(3);
  split->callback([&] {
    const auto store = corpus::load_corpus(split_in);
    const auto out = corpus::split_corpus(store, {ratios[0], ratios[1], ratios[2]}, seed_of(g));
    std::ostringstream os;
    corpus::write_corpus(os, out);
    emit(g, os.str());
  });

  // features
  auto* features_cmd = app.add_subcommand("features", "linguistic features");
  features_cmd->require_subcommand(1);
  features_cmd->fallthrough();
  std::string feat_in, feat_lex, feat_registry = "baseline";
  auto* extract = features_cmd->add_subcommand("extract", "feature table as CSV");
  extract->add_option("--in", feat_in, "corpus (JSONL)")->required();
  extract->add_option("--lexicons", feat_lex, "lexicon directory");
  extract->add_option("--registry", feat_registry, "baseline | enriched");
  extract->callback([&] {
    const auto registry = registry_named(feat_registry);
    const auto lexicons = lexicons_for(g, feat_lex);
    lingfeat::check_lexicons(registry, lexicons);
    const auto store = corpus::load_corpus(feat_in);
    std::ostringstream os;
    os << "doc_id,label";
    for (const auto& id : registry.ids()) os << ',' << id;
    os << '\n';
    for (const auto& doc : store.documents()) {
      const auto x = lingfeat::extract_features(doc, registry, lexicons);
      os << text::csv_field(doc.id) << ',' << corpus::label_name(doc.label);
      for (double v : x.values) os << ',' << text::format_g17(v);
      os << '\n';
    }
    emit(g, os.str());
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "train models");
  train_cmd->require_subcommand(1);
  train_cmd->fallthrough();
  std::string train_in, train_lex, train_seeds = "1..20";
  std::size_t train_workers = 1;
  auto* train_lr = train_cmd->add_subcommand("logreg", "grid-searched feature model");
  train_lr->add_option("--in", train_in, "corpus with splits (JSONL)")->required();
  train_lr->add_option("--lexicons", train_lex, "lexicon directory");
  train_lr->callback([&] {
    const auto config = load_config(g);
    const auto lexicons = lexicons_for(g, train_lex);
    const auto registry = lingfeat::baseline_registry();
    const auto splits = corpus::materialize_splits(corpus::load_corpus(train_in));
    const auto result = models::grid_search_logreg(
        models::featurize(splits.train, registry, lexicons),
        models::featurize(splits.validation, registry, lexicons), config.logreg, config.logreg_grid);
    io::write_json(require_out(g), io::to_json(result.model));
    std::cerr << "l2 = " << result.config.l2 << ", test accuracy "
              << models::accuracy(result.model, models::featurize(splits.test, registry, lexicons))
              << "\n";
  });
  auto* train_nn = train_cmd->add_subcommand("neural", "one surrogate network");
  train_nn->add_option("--in", train_in, "corpus with splits (JSONL)")->required();
  train_nn->callback([&] {
    const auto config = load_config(g);
    const auto splits = corpus::materialize_splits(corpus::load_corpus(train_in));
    const auto model = models::train_neural(splits.train, config.seed, config.neural);
    io::write_json(require_out(g), io::to_json(model));
    std::cerr << "seed " << model.seed << ", test accuracy "
              << models::accuracy(model, splits.test) << "\n";
  });
  auto* train_ens = train_cmd->add_subcommand("ensemble", "one network per seed");
  train_ens->add_option("--in", train_in, "corpus with splits (JSONL)")->required();
  train_ens->add_option("--seeds", train_seeds, "'a..b' or comma list");
  train_ens->add_option("--workers", train_workers, "parallel training runs");
  train_ens->callback([&] {
    const auto config = load_config(g);
    const fs::path dir = require_out(g);
    const auto splits = corpus::materialize_splits(corpus::load_corpus(train_in));
    const auto seeds = models::parse_seed_list(train_seeds);
    const auto ensemble = models::train_ensemble(splits, seeds, config.neural, train_workers);
    std::ostringstream csv;
    csv << "seed,validation_accuracy,test_accuracy,model\n";
    for (const auto& m : ensemble.members) {
      const std::string file = "neural-seed-" + std::to_string(m.seed) + ".json";
      io::write_json(dir / file, io::to_json(m.model));
      csv << m.seed << ',' << text::format_g17(m.validation_accuracy) << ','
          << text::format_g17(m.test_accuracy) << ',' << file << '\n';
    }
    io::write_file(dir / "ensemble.csv", csv.str());
  });

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "token-level explanations");
  explain_cmd->require_subcommand(1);
  explain_cmd->fallthrough();
  std::string ex_model, ex_in, ex_lex, ex_split = "test";
  std::vector<std::string> ex_models;
  auto* lam = explain_cmd->add_subcommand("lam", "linguistic attention maps");
  lam->add_option("--model", ex_model, "feature model (JSON)")->required();
  lam->add_option("--in", ex_in, "corpus (JSONL)")->required();
  lam->add_option("--lexicons", ex_lex, "lexicon directory");
  lam->add_option("--split", ex_split, "train | validation | test | all");
  lam->callback([&] {
    const auto model = io::logreg_from_json(io::read_json(ex_model));
    const auto registry = model.registry_version == lingfeat::enriched_registry().version()
                              ? lingfeat::enriched_registry()
                              : lingfeat::baseline_registry();
    const auto lexicons = lexicons_for(g, ex_lex);
    std::ostringstream os;
    for (const auto& doc : docs_of(corpus::load_corpus(ex_in), ex_split)) {
      const auto x = lingfeat::extract_features(doc, registry, lexicons);
      const auto inc = lingfeat::build_incidence(doc, registry, lexicons);
      explain::write_explanation(
          os, explain::lam_explain(model, doc, inc, models::predict(model, x).label));
    }
    emit(g, os.str());
  });
  auto* lrp = explain_cmd->add_subcommand("lrp", "relevance propagation through networks");
  lrp->add_option("--model", ex_models, "network model file(s) (JSON)")->required();
  lrp->add_option("--in", ex_in, "corpus (JSONL)")->required();
  lrp->add_option("--split", ex_split, "train | validation | test | all");
  lrp->callback([&] {
    const auto docs = docs_of(corpus::load_corpus(ex_in), ex_split);
    std::ostringstream os;
    for (const auto& path : ex_models) {
      const auto model = io::neural_from_json(io::read_json(path));
      for (const auto& doc : docs) explain::write_explanation(os, explain::lrp_explain(model, doc));
    }
    emit(g, os.str());
  });

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "equivalence and explanation statistics");
  stats_cmd->require_subcommand(1);
  stats_cmd->fallthrough();
  std::string st_ensemble, st_mode = "closest", st_expl, st_doc;
  std::size_t st_k = 0, st_n = 0, st_resamples = 10000;
  double st_level = 0.95;
  auto* equiv = stats_cmd->add_subcommand("equiv", "select a statistically equivalent subset");
  equiv->add_option("--ensemble", st_ensemble, "ensemble.csv from 'train ensemble'")->required();
  equiv->add_option("--k", st_k, "subset size")->required();
  equiv->add_option("--mode", st_mode, "closest | most_accurate");
  equiv->add_option("--n", st_n, "test-set size")->required();
  equiv->callback([&] {
    std::ifstream in(st_ensemble);
    if (!in) throw IoError("cannot open " + st_ensemble);
    std::vector<double> acc;
    std::vector<std::uint64_t> ids;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = report::split_csv_line(line);
      if (f.size() < 3) throw DataError("malformed ensemble row: " + line);
      ids.push_back(std::stoull(f[0]));
      acc.push_back(std::stod(f[2]));
    }
    const auto set = stats::select_equivalent(acc, ids, st_k, stats::parse_mode(st_mode), st_n);
    const std::vector<report::NamedEquivalence> rows{{"neural-" + std::to_string(st_k), set}};
    std::ostringstream os;
    report::export_equivalence(os, rows);
    emit(g, os.str());
  });
  auto* correlate = stats_cmd->add_subcommand("correlate", "split-half correlation with bootstrap CI");
  correlate->add_option("--explanations", st_expl, "explanations (JSONL)")->required();
  correlate->add_option("--doc", st_doc, "document id")->required();
  correlate->add_option("--resamples", st_resamples, "bootstrap resamples");
  correlate->add_option("--level", st_level, "confidence level");
  correlate->callback([&] {
    const auto expl = for_doc(read_explanations_file(st_expl), st_doc);
    std::vector<std::vector<double>> rel;
    for (const auto& e : expl) rel.push_back(e.relevances);
    if (rel.size() % 2) rel.pop_back();
    const auto r = stats::bootstrap_ci(rel, st_resamples, st_level, seed_of(g));
    std::ostringstream os;
    os << "doc_id,explanations,r,lo,hi,level,resamples\n"
       << text::csv_field(st_doc) << ',' << rel.size() << ',' << text::format_g17(r.r) << ','
       << text::format_g17(r.lo) << ',' << text::format_g17(r.hi) << ','
       << text::format_g17(r.level) << ',' << r.resamples << '\n';
    emit(g, os.str());
  });
  auto* characterize = stats_cmd->add_subcommand("characterize", "per-token relevance summary");
  characterize->add_option("--explanations", st_expl, "explanations (JSONL)")->required();
  characterize->add_option("--doc", st_doc, "document id")->required();
  characterize->callback([&] {
    const auto d = stats::characterize_distribution(for_doc(read_explanations_file(st_expl), st_doc));
    std::ostringstream os;
    report::export_boxplot_data(os, d);
    emit(g, os.str());
  });

  // enrich
  auto* enrich_cmd = app.add_subcommand("enrich", "attention-derived token lists and enrichment");
  enrich_cmd->require_subcommand(1);
  enrich_cmd->fallthrough();
  std::string en_expl, en_in, en_lex;
  std::size_t en_min_count = 10, en_top_k = 100, en_min_models = 5, en_per_class = 50;
  auto group_rankings = [&] {
    std::map<std::string, std::vector<explain::Explanation>> by_model;
    for (auto& e : read_explanations_file(en_expl)) by_model[e.model_id].push_back(std::move(e));
    std::vector<std::pair<std::string, enrich::ClassRankings>> out;
    for (const auto& [id, maps] : by_model) out.emplace_back(id, enrich::rank_tokens(maps, en_min_count));
    return out;
  };
  auto* rank = enrich_cmd->add_subcommand("rank", "per-model token rankings by mean attention");
  rank->add_option("--explanations", en_expl, "explanations (JSONL)")->required();
  rank->add_option("--min-count", en_min_count, "minimum occurrences per class");
  rank->callback([&] {
    std::ostringstream os;
    os << "model_id,class,rank,token,mean_attention,count\n";
    for (const auto& [id, r] : group_rankings()) {
      for (const auto* cls : {&r.opinion, &r.news}) {
        for (std::size_t i = 0; i < cls->entries.size(); ++i) {
          const auto& t = cls->entries[i];
          os << text::csv_field(id) << ',' << corpus::label_name(cls->label) << ',' << i + 1 << ','
             << text::csv_field(t.token) << ',' << text::format_g17(t.mean_attention) << ','
             << t.count << '\n';
        }
      }
    }
    emit(g, os.str());
  });
  auto* stable = enrich_cmd->add_subcommand("stable", "tokens stable across model rankings");
  stable->add_option("--explanations", en_expl, "explanations of several models (JSONL)")->required();
  stable->add_option("--min-count", en_min_count, "minimum occurrences per class");
  stable->add_option("--top-k", en_top_k, "ranking depth");
  stable->add_option("--min-models", en_min_models, "supporting models required");
  stable->add_option("--per-class", en_per_class, "list length per class");
  stable->callback([&] {
    std::vector<enrich::ClassRankings> rankings;
    for (auto& [id, r] : group_rankings()) rankings.push_back(std::move(r));
    const auto lists = enrich::class_token_lists(
        enrich::stable_top_tokens(rankings, en_top_k, en_min_models), en_per_class);
    const fs::path dir = require_out(g);
    std::ostringstream op, nw;
    enrich::write_token_list_csv(op, lists.opinion);
    enrich::write_token_list_csv(nw, lists.news);
    io::write_file(dir / "opinion.csv", op.str());
    io::write_file(dir / "news.csv", nw.str());
  });
  auto* compare = enrich_cmd->add_subcommand("compare", "baseline vs enriched feature model");
  compare->add_option("--in", en_in, "corpus with splits (JSONL)")->required();
  compare->add_option("--lexicons", en_lex, "lexicon directory");
  compare->callback([&] {
    const auto config = load_config(g);
    const auto lexicons = lexicons_for(g, en_lex);
    const auto splits = corpus::materialize_splits(corpus::load_corpus(en_in));
    const auto r = enrich::enrich_and_compare(
        splits.train, lingfeat::baseline_registry(), lingfeat::enriched_registry(), lexicons,
        {{"test", splits.test}, {"validation", splits.validation}}, config.logreg);
    std::ostringstream os;
    report::export_comparisons(os, r.rows);
    emit(g, os.str());
  });

  // report
  auto* report_cmd = app.add_subcommand("report", "static reports");
  report_cmd->require_subcommand(1);
  report_cmd->fallthrough();
  std::string rp_in, rp_expl, rp_doc, rp_model, rp_palette = "blue";
  auto* map = report_cmd->add_subcommand("map", "HTML attention map of one explanation");
  map->add_option("--in", rp_in, "corpus (JSONL)")->required();
  map->add_option("--explanations", rp_expl, "explanations (JSONL)")->required();
  map->add_option("--doc", rp_doc, "document id")->required();
  map->add_option("--model-id", rp_model, "model id (default: first for the document)");
  map->add_option("--palette", rp_palette, "orange | blue");
  map->callback([&] {
    const auto store = corpus::load_corpus(rp_in);
    const auto* doc = store.find(rp_doc);
    if (!doc) throw DataError("document '" + rp_doc + "' not in corpus");
    auto expl = for_doc(read_explanations_file(rp_expl), rp_doc);
    const explain::Explanation* chosen = &expl.front();
    if (!rp_model.empty()) {
      chosen = nullptr;
      for (const auto& e : expl) {
        if (e.model_id == rp_model) chosen = &e;
      }
      if (!chosen) throw DataError("no explanation from model '" + rp_model + "'");
    }
    emit(g, report::render_attention_map(*doc, *chosen, report::parse_palette(rp_palette)));
  });
  auto* boxplot = report_cmd->add_subcommand("boxplot", "box-plot data for one document");
  boxplot->add_option("--explanations", rp_expl, "explanations (JSONL)")->required();
  boxplot->add_option("--doc", rp_doc, "document id")->required();
  boxplot->callback([&] {
    const auto d = stats::characterize_distribution(for_doc(read_explanations_file(rp_expl), rp_doc));
    std::ostringstream os;
    report::export_boxplot_data(os, d);
    emit(g, os.str());
  });

  // pipeline
  auto* pipeline_cmd = app.add_subcommand("pipeline", "end-to-end run");
  pipeline_cmd->require_subcommand(1);
  pipeline_cmd->fallthrough();
  auto* run = pipeline_cmd->add_subcommand("run", "run every stage and write a manifest");
  run->callback([&] {
    if (g.config.empty()) throw ConfigError("pipeline run needs --config");
    const auto result = pipeline::run_pipeline(load_config(g), &std::cerr);
    std::cout << result.manifest.string() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    return fail(e, 2);
  } catch (const std::exception& e) {
    return fail(e, 1);
  }
  return 0;
}

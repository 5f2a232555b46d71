#include "seedex/enrich.hpp"

#include "seedex/error.hpp"
#include "seedex/text.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace seedex::enrich {

using corpus::Label;

namespace {

struct Accumulator {
  double sum = 0;
  std::size_t count = 0;
};

TokenAttentionRanking finish(Label label, const std::map<std::string, Accumulator>& acc,
                             std::size_t min_count) {
  TokenAttentionRanking r{label, {}};
  for (const auto& [token, a] : acc) {
    if (a.count < min_count) continue;
    r.entries.push_back({token, a.sum / static_cast<double>(a.count), a.count});
  }
  std::stable_sort(r.entries.begin(), r.entries.end(), [](const auto& x, const auto& y) {
    if (x.mean_attention != y.mean_attention) return x.mean_attention > y.mean_attention;
    return x.token < y.token;
  });
  return r;
}

}  // namespace

ClassRankings rank_tokens(std::span<const explain::Explanation> maps, std::size_t min_count) {
  if (maps.empty()) throw DataError("token ranking over an empty map set");
  std::map<std::string, Accumulator> news, opinion;
  for (const auto& e : maps) {
    if (e.tokens.size() != e.relevances.size()) {
      throw ContractError("explanation of " + e.doc_id + " has mismatched token/relevance counts");
    }
    auto& acc = e.predicted == Label::opinion ? opinion : news;
    for (std::size_t i = 0; i < e.tokens.size(); ++i) {
      auto& a = acc[text::casefold(e.tokens[i])];
      a.sum += e.relevances[i];
      ++a.count;
    }
  }
  ClassRankings r;
  r.news = finish(Label::news, news, min_count);
  r.opinion = finish(Label::opinion, opinion, min_count);
  return r;
}

StableTokens stable_top_tokens(std::span<const ClassRankings> rankings, std::size_t top_k,
                               std::size_t min_models) {
  if (top_k == 0 || min_models == 0) throw ConfigError("top_k and min_models must be positive");
  if (min_models > rankings.size()) {
    throw ConfigError("min_models = " + std::to_string(min_models) + " exceeds the " +
                      std::to_string(rankings.size()) + " rankings supplied");
  }
  auto one_class = [&](Label label) {
    std::map<std::string, Accumulator> support;
    for (const auto& r : rankings) {
      const auto& entries = r.of(label).entries;
      const std::size_t k = std::min(top_k, entries.size());
      for (std::size_t i = 0; i < k; ++i) {
        auto& a = support[entries[i].token];
        a.sum += entries[i].mean_attention;
        ++a.count;
      }
    }
    std::vector<StableToken> out;
    for (const auto& [token, a] : support) {
      if (a.count >= min_models) {
        out.push_back({token, a.count, a.sum / static_cast<double>(a.count)});
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
      if (x.support != y.support) return x.support > y.support;
      if (x.mean_attention != y.mean_attention) return x.mean_attention > y.mean_attention;
      return x.token < y.token;
    });
    return out;
  };
  return {one_class(Label::news), one_class(Label::opinion)};
}

StableTokens class_token_lists(const StableTokens& stable, std::size_t per_class) {
  StableTokens out = stable;
  if (out.news.size() > per_class) out.news.resize(per_class);
  if (out.opinion.size() > per_class) out.opinion.resize(per_class);
  return out;
}

Comparison compare_accuracies(std::string test_set, double baseline, double enriched,
                              std::size_t n) {
  Comparison c;
  c.test_set = std::move(test_set);
  c.n = n;
  c.baseline_accuracy = baseline;
  c.enriched_accuracy = enriched;
  if (baseline != enriched) {
    const auto t = stats::z_statistic(baseline, enriched, n);
    c.z = t.z;
    c.p = t.p;
  }
  c.significant = c.z > stats::kCriticalZ;
  return c;
}

EnrichmentReport enrich_and_compare(std::span<const corpus::AnnotatedDocument> train,
                                    const lingfeat::FeatureRegistry& base,
                                    const lingfeat::FeatureRegistry& enriched,
                                    const lingfeat::LexiconSet& lexicons,
                                    const std::vector<NamedTestSet>& test_sets,
                                    const models::TrainConfig& config) {
  lingfeat::check_lexicons(base, lexicons);
  lingfeat::check_lexicons(enriched, lexicons);
  for (const auto& [name, docs] : test_sets) {
    if (docs.empty()) throw DataError("test set '" + name + "' is empty");
  }
  const auto base_train = models::featurize(train, base, lexicons);
  const auto rich_train = models::featurize(train, enriched, lexicons);

  EnrichmentReport report;
  report.baseline = models::train_logreg(base_train.features, base_train.labels, config);
  report.enriched = models::train_logreg(rich_train.features, rich_train.labels, config);
  for (const auto& [name, docs] : test_sets) {
    const double a = models::accuracy(report.baseline, models::featurize(docs, base, lexicons));
    const double b = models::accuracy(report.enriched, models::featurize(docs, enriched, lexicons));
    report.rows.push_back(compare_accuracies(name, a, b, docs.size()));
  }
  return report;
}

TokenListExtension token_list_features(const StableTokens& lists) {
  TokenListExtension ext;
  auto add = [&](const std::vector<StableToken>& tokens, const std::string& name,
                 const std::string& description) {
    if (tokens.empty()) return;
    lingfeat::Lexicon lex{name, lingfeat::LexiconKind::membership, {}};
    for (const auto& t : tokens) lex.entries[t.token] = 1.0;
    ext.lexicons.emplace(name, std::move(lex));
    ext.features.push_back(lingfeat::wordlist_feature(name, name, description));
  };
  add(lists.opinion, "attention_opinion_tokens", "stable high-attention tokens of opinion maps");
  add(lists.news, "attention_news_tokens", "stable high-attention tokens of news maps");
  return ext;
}

void write_token_list_csv(std::ostream& out, std::span<const StableToken> tokens) {
  out << "token,supporting_model_count\n";
  for (const auto& t : tokens) out << text::csv_field(t.token) << ',' << t.support << '\n';
  if (!out) throw IoError("failed to write token list");
}

}  // namespace seedex::enrich

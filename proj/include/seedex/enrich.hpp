#pragma once

#include "seedex/corpus.hpp"
#include "seedex/explain.hpp"
#include "seedex/lingfeat.hpp"
#include "seedex/logreg.hpp"
#include "seedex/stats.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace seedex::enrich {

struct RankedToken {
  std::string token;  // case-folded
  double mean_attention = 0;
  std::size_t count = 0;
};

// Descending by mean attention, ties alphabetical.
struct TokenAttentionRanking {
  corpus::Label label = corpus::Label::news;
  std::vector<RankedToken> entries;
};

struct ClassRankings {
  TokenAttentionRanking news{corpus::Label::news, {}};
  TokenAttentionRanking opinion{corpus::Label::opinion, {}};

  const TokenAttentionRanking& of(corpus::Label label) const {
    return label == corpus::Label::opinion ? opinion : news;
  }
};

// Pools the maps of one model by predicted class. A token is kept in a class
// ranking when it occurs at least `min_count` times across that class's maps.
ClassRankings rank_tokens(std::span<const explain::Explanation> maps, std::size_t min_count = 10);

struct StableToken {
  std::string token;
  std::size_t support = 0;     // rankings that have it in their top k
  double mean_attention = 0;   // mean over those rankings
};

struct StableTokens {
  std::vector<StableToken> news;
  std::vector<StableToken> opinion;
};

// Tokens in the top `top_k` of at least `min_models` rankings, ordered by
// support, then mean attention, then alphabetically.
StableTokens stable_top_tokens(std::span<const ClassRankings> rankings, std::size_t top_k = 100,
                               std::size_t min_models = 5);

// Truncates each class list to `per_class` entries.
StableTokens class_token_lists(const StableTokens& stable, std::size_t per_class = 50);

struct Comparison {
  std::string test_set;
  std::size_t n = 0;
  double baseline_accuracy = 0;
  double enriched_accuracy = 0;
  double z = 0;
  double p = 0.5;
  bool significant = false;  // z > kCriticalZ
};

// Equal accuracies give z = 0 and p = 0.5 without evaluating the variance.
Comparison compare_accuracies(std::string test_set, double baseline, double enriched, std::size_t n);

using NamedTestSet = std::pair<std::string, std::vector<corpus::AnnotatedDocument>>;

struct EnrichmentReport {
  models::LogRegModel baseline;
  models::LogRegModel enriched;
  std::vector<Comparison> rows;
};

EnrichmentReport enrich_and_compare(std::span<const corpus::AnnotatedDocument> train,
                                    const lingfeat::FeatureRegistry& base,
                                    const lingfeat::FeatureRegistry& enriched,
                                    const lingfeat::LexiconSet& lexicons,
                                    const std::vector<NamedTestSet>& test_sets,
                                    const models::TrainConfig& config);

// Registry extension built from class token lists: one wordlist feature per
// non-empty class list ("attention_opinion_tokens", "attention_news_tokens"),
// each backed by a membership lexicon of the same name.
struct TokenListExtension {
  std::vector<lingfeat::FeatureDefinition> features;
  lingfeat::LexiconSet lexicons;
};
TokenListExtension token_list_features(const StableTokens& lists);

// Header "token,supporting_model_count", one row per token.
void write_token_list_csv(std::ostream& out, std::span<const StableToken> tokens);

}  // namespace seedex::enrich

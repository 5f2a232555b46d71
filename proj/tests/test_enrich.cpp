#include "seedex/enrich.hpp"
#include "seedex/error.hpp"
#include "seedex/serialize.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace seedex;
using namespace seedex::enrich;
using corpus::Label;

namespace {

explain::Explanation map_of(std::vector<std::string> tokens, std::vector<double> relevances,
                            Label predicted, std::string doc = "d") {
  explain::Explanation e;
  e.doc_id = std::move(doc);
  e.model_id = "m";
  e.method = "lrp";
  e.predicted = predicted;
  e.tokens = std::move(tokens);
  e.relevances = std::move(relevances);
  return e;
}

// Ranking whose opinion list is exactly `tokens`, in order.
ClassRankings ranking_of(const std::vector<std::string>& tokens) {
  ClassRankings r;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    r.opinion.entries.push_back({tokens[i], 1.0 / (i + 1), 10});
  }
  return r;
}

std::vector<std::string> names(const std::vector<StableToken>& v) {
  std::vector<std::string> out;
  for (const auto& t : v) out.push_back(t.token);
  return out;
}

const RankedToken* find(const TokenAttentionRanking& r, const std::string& token) {
  for (const auto& e : r.entries) {
    if (e.token == token) return &e;
  }
  return nullptr;
}

}  // namespace

TEST(RankTokens, MinCountExcludesRareTokens) {
  std::vector<explain::Explanation> maps;
  for (int i = 0; i < 9; ++i) maps.push_back(map_of({"rare", "commun"}, {0.9, 0.1}, Label::opinion));
  maps.push_back(map_of({"commun"}, {1.0}, Label::opinion));
  const auto r = rank_tokens(maps, 10);
  EXPECT_EQ(find(r.opinion, "rare"), nullptr);
  ASSERT_NE(find(r.opinion, "commun"), nullptr);
  EXPECT_EQ(find(r.opinion, "commun")->count, 10u);
  EXPECT_TRUE(r.news.entries.empty());
}

TEST(RankTokens, MeanOfConstantAttention) {
  std::vector<std::string> toks(10, "certes");
  const auto r = rank_tokens(std::vector{map_of(toks, std::vector<double>(10, 0.5), Label::opinion)});
  ASSERT_EQ(r.opinion.entries.size(), 1u);
  EXPECT_EQ(r.opinion.entries[0].mean_attention, 0.5);
}

TEST(RankTokens, MeanOfTwelveHandValues) {
  const std::vector<double> vals{0.1, 0.2, 0.05, 0.3, 0.0, 0.15, 0.25, 0.4, 0.1, 0.05, 0.2, 0.2};
  std::vector<explain::Explanation> maps;
  for (std::size_t i = 0; i < vals.size(); i += 3) {
    maps.push_back(map_of({"Chat", "le", "chat", "chat"},
                          {vals[i], 0.0, vals[i + 1], vals[i + 2]}, Label::news));
  }
  const auto r = rank_tokens(maps, 10);
  const auto* e = find(r.news, "chat");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->count, 12u);
  EXPECT_NEAR(e->mean_attention, 2.0 / 12.0, 1e-15);
  EXPECT_EQ(find(r.news, "le"), nullptr);
}

TEST(RankTokens, AttributionFollowsPrediction) {
  std::vector<explain::Explanation> maps;
  for (int i = 0; i < 10; ++i) maps.push_back(map_of({"x"}, {1.0}, i < 5 ? Label::news : Label::opinion));
  EXPECT_TRUE(rank_tokens(maps, 10).news.entries.empty());
  EXPECT_EQ(rank_tokens(maps, 5).news.entries.size(), 1u);
}

TEST(RankTokens, OrderDescendingThenAlphabetical) {
  std::vector<explain::Explanation> maps;
  maps.push_back(map_of({"b", "a", "c"}, {0.2, 0.2, 0.6}, Label::opinion));
  const auto r = rank_tokens(maps, 1);
  ASSERT_EQ(r.opinion.entries.size(), 3u);
  EXPECT_EQ(r.opinion.entries[0].token, "c");
  EXPECT_EQ(r.opinion.entries[1].token, "a");
  EXPECT_EQ(r.opinion.entries[2].token, "b");
}

TEST(RankTokens, PermutationInvariant) {
  RandomStream rng(1, "perm");
  const std::vector<std::string> vocab{"le", "chat", "dort", "je", "pense", "certes", "hier"};
  std::vector<explain::Explanation> maps;
  for (int k = 0; k < 30; ++k) {
    std::vector<std::string> t;
    std::vector<double> r;
    for (int i = 0; i < 8; ++i) {
      t.push_back(vocab[rng.below(vocab.size())]);
      r.push_back(rng.below(8) / 8.0);
    }
    maps.push_back(map_of(t, r, rng.bernoulli(0.5) ? Label::news : Label::opinion));
  }
  const auto a = rank_tokens(maps, 3);
  rng.shuffle(std::span(maps));
  const auto b = rank_tokens(maps, 3);
  for (Label l : {Label::news, Label::opinion}) {
    ASSERT_EQ(a.of(l).entries.size(), b.of(l).entries.size());
    for (std::size_t i = 0; i < a.of(l).entries.size(); ++i) {
      EXPECT_EQ(a.of(l).entries[i].token, b.of(l).entries[i].token);
      EXPECT_EQ(a.of(l).entries[i].count, b.of(l).entries[i].count);
      EXPECT_NEAR(a.of(l).entries[i].mean_attention, b.of(l).entries[i].mean_attention, 1e-15);
    }
  }
}

TEST(RankTokens, Errors) {
  EXPECT_THROW(rank_tokens(std::vector<explain::Explanation>{}), DataError);
  EXPECT_THROW(rank_tokens(std::vector{map_of({"a", "b"}, {1.0}, Label::news)}), ContractError);
}

TEST(StableTopTokens, SupportThreshold) {
  std::vector<ClassRankings> rankings;
  for (int m = 0; m < 10; ++m) {
    std::vector<std::string> t{"toujours"};
    if (m < 4) t.push_back("parfois");
    if (m < 5) t.push_back("moitie");
    rankings.push_back(ranking_of(t));
  }
  const auto s = stable_top_tokens(rankings, 100, 5);
  EXPECT_EQ(names(s.opinion), (std::vector<std::string>{"toujours", "moitie"}));
  EXPECT_EQ(s.opinion[0].support, 10u);
  EXPECT_EQ(s.opinion[1].support, 5u);
  EXPECT_TRUE(s.news.empty());
}

TEST(StableTopTokens, IdenticalRankingsReturnTopK) {
  std::vector<std::string> tokens;
  for (int i = 0; i < 150; ++i) tokens.push_back("t" + std::to_string(1000 + i));
  const std::vector<ClassRankings> rankings(10, ranking_of(tokens));
  const auto s = stable_top_tokens(rankings, 100, 5);
  EXPECT_EQ(names(s.opinion), std::vector<std::string>(tokens.begin(), tokens.begin() + 100));
}

TEST(StableTopTokens, MonotoneInMinModels) {
  RandomStream rng(2, "stable");
  std::vector<ClassRankings> rankings;
  for (int m = 0; m < 10; ++m) {
    std::vector<std::string> t;
    for (int i = 0; i < 30; ++i) t.push_back("w" + std::to_string(rng.below(60)));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    rng.shuffle(std::span(t));
    rankings.push_back(ranking_of(t));
  }
  auto prev = names(stable_top_tokens(rankings, 20, 1).opinion);
  std::sort(prev.begin(), prev.end());
  for (std::size_t mm = 2; mm <= 10; ++mm) {
    auto cur = names(stable_top_tokens(rankings, 20, mm).opinion);
    std::sort(cur.begin(), cur.end());
    EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    prev = cur;
  }
  EXPECT_THROW(stable_top_tokens(rankings, 20, 11), ConfigError);
  EXPECT_THROW(stable_top_tokens(rankings, 0, 1), ConfigError);
}

TEST(ClassTokenLists, Truncation) {
  StableTokens s;
  for (int i = 0; i < 120; ++i) s.opinion.push_back({"o" + std::to_string(i), 5, 0.1});
  for (int i = 0; i < 30; ++i) s.news.push_back({"n" + std::to_string(i), 5, 0.1});
  const auto l = class_token_lists(s, 50);
  ASSERT_EQ(l.opinion.size(), 50u);
  EXPECT_EQ(l.opinion.front().token, "o0");
  EXPECT_EQ(l.opinion.back().token, "o49");
  EXPECT_EQ(l.news.size(), 30u);
}

TEST(CompareAccuracies, SignificanceVerdicts) {
  EXPECT_FALSE(compare_accuracies("t", 0.889, 0.896, 1000).significant);
  const auto c = compare_accuracies("t", 0.768, 0.806, 1000);
  EXPECT_TRUE(c.significant);
  EXPECT_GT(c.z, 1.96);
  const auto same = compare_accuracies("t", 0.9, 0.9, 100);
  EXPECT_EQ(same.z, 0.0);
  EXPECT_EQ(same.p, 0.5);
  EXPECT_FALSE(same.significant);
}

TEST(EnrichAndCompare, IdenticalRegistriesAndBaselineRegression) {
  corpus::SynthSpec spec;
  spec.docs_per_class = 60;
  const auto splits =
      corpus::materialize_splits(corpus::split_corpus(corpus::synth_corpus(spec, 3), {}, 3));
  const auto reg = lingfeat::baseline_registry();
  const auto lex = fixtures::complete_lexicons(lingfeat::enriched_registry());
  const models::TrainConfig config;
  const auto r = enrich_and_compare(splits.train, reg, reg, lex, {{"test", splits.test}}, config);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].baseline_accuracy, r.rows[0].enriched_accuracy);
  EXPECT_EQ(r.rows[0].z, 0.0);
  EXPECT_EQ(r.rows[0].n, splits.test.size());

  const auto train = models::featurize(splits.train, reg, lex);
  EXPECT_EQ(io::to_json(r.baseline).dump(),
            io::to_json(models::train_logreg(train.features, train.labels, config)).dump());
  EXPECT_THROW(enrich_and_compare(splits.train, reg, reg, lex, {{"empty", {}}}, config), DataError);
}

TEST(TokenListFeatures, BuildsWordlistFeatures) {
  StableTokens s;
  s.opinion = {{"certes", 7, 0.2}, {"navrant", 6, 0.1}};
  const auto ext = token_list_features(s);
  ASSERT_EQ(ext.features.size(), 1u);
  EXPECT_EQ(ext.features[0].id, "attention_opinion_tokens");
  const auto& lex = ext.lexicons.at("attention_opinion_tokens");
  EXPECT_TRUE(lex.lookup("certes"));
  EXPECT_FALSE(lex.lookup("communiqué"));

  auto ids = lingfeat::baseline_registry().ids();
  ids.push_back("attention_opinion_tokens");
  const auto reg = lingfeat::registry_from_ids(ids, ext.features);
  auto all = fixtures::complete_lexicons(lingfeat::baseline_registry());
  all.insert(ext.lexicons.begin(), ext.lexicons.end());
  const auto v = lingfeat::extract_features(fixtures::make_doc("d", {"Certes", "non"}), reg, all);
  EXPECT_EQ(v.values.back(), 0.5);
}

TEST(TokenListCsv, HeaderAndRows) {
  std::ostringstream out;
  const std::vector<StableToken> t{{"certes", 7, 0.2}, {"a,b", 5, 0.1}};
  write_token_list_csv(out, t);
  EXPECT_EQ(out.str(), "token,supporting_model_count\ncertes,7\n\"a,b\",5\n");
}

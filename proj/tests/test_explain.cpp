#include "seedex/error.hpp"
#include "seedex/explain.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace seedex;
using namespace seedex::explain;
using corpus::Label;
using fixtures::make_doc;

namespace {

models::LogRegModel toy_model(std::vector<double> coefficients) {
  models::LogRegModel m;
  m.registry_version = "toy";
  m.mean.assign(coefficients.size(), 0.0);
  m.scale.assign(coefficients.size(), 1.0);
  m.coefficients = std::move(coefficients);
  return m;
}

models::NeuralModel wrap(models::NeuralParams params, models::TrainConfig config) {
  models::NeuralModel m;
  m.config = config;
  m.config.buckets = params.buckets;
  m.config.embedding_dim = params.dim;
  m.config.hidden_dim = params.hidden;
  m.params = std::move(params);
  return m;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Lam, CategoricalSharesTimesCoefficient) {
  const auto doc = make_doc("d", {"a", "v1", "b", "v2", "v3"});
  lingfeat::IncidenceMatrix inc("d", "toy", 5, 1);
  for (std::size_t i : {1u, 3u, 4u}) inc.at(i, 0) = 1;
  const auto e = lam_explain(toy_model({0.6}), doc, inc, Label::opinion);
  EXPECT_EQ(e.method, "lam");
  EXPECT_EQ(e.model_id, "ling-lr");
  const std::vector<double> expected{0, 0.2, 0, 0.2, 0.2};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e.relevances[i], expected[i], 1e-15);
}

TEST(Lam, OppositeSignFeatureContributesNothing) {
  const auto doc = make_doc("d", {"a", "b"});
  lingfeat::IncidenceMatrix inc("d", "toy", 2, 2);
  inc.at(0, 0) = 1;
  inc.at(1, 1) = 1;
  const auto e = lam_explain(toy_model({-0.6, 0.4}), doc, inc, Label::opinion);
  EXPECT_EQ(e.relevances[0], 0.0);
  EXPECT_DOUBLE_EQ(e.relevances[1], 0.4);
  EXPECT_EQ(e.per_feature[0 * 2 + 0], 0.0);

  // For a news prediction the gate keeps negative coefficients.
  const auto n = lam_explain(toy_model({-0.6, 0.4}), doc, inc, Label::news);
  EXPECT_DOUBLE_EQ(n.relevances[0], -0.6);
  EXPECT_EQ(n.relevances[1], 0.0);
}

TEST(Lam, UnmatchedTokenIsZero) {
  const auto doc = make_doc("d", {"a", "b", "c"});
  lingfeat::IncidenceMatrix inc("d", "toy", 3, 1);
  inc.at(0, 0) = 2;
  const auto e = lam_explain(toy_model({1.5}), doc, inc, Label::opinion);
  EXPECT_EQ(e.relevances[1], 0.0);
  EXPECT_EQ(e.relevances[2], 0.0);
  EXPECT_DOUBLE_EQ(e.relevances[0], 1.5);
}

TEST(Lam, ContractErrors) {
  const auto doc = make_doc("d", {"a", "b"});
  EXPECT_THROW(lam_explain(toy_model({1.0}), doc, lingfeat::IncidenceMatrix("d", "toy", 2, 2),
                           Label::opinion),
               ContractError);
  EXPECT_THROW(lam_explain(toy_model({1.0}), doc, lingfeat::IncidenceMatrix("d", "toy", 3, 1),
                           Label::opinion),
               ContractError);
  EXPECT_THROW(lam_explain(toy_model({1.0}), doc, lingfeat::IncidenceMatrix("d", "other", 2, 1),
                           Label::opinion),
               ContractError);
}

TEST(Lam, RealRegistryRowSumsAndDeterminism) {
  const auto reg = lingfeat::baseline_registry();
  const auto lex = fixtures::complete_lexicons(reg);
  const auto doc = make_doc(
      "d", fixtures::Tagged{{"Je", "PRON"}, {"pense", "VERB"}, {"que", "PRON"}, {"c'", "PRON"},
                           {"est", "AUX"}, {"extraordinaire", "ADJ"}, {"!", "PUNCT"}});
  models::LogRegModel m;
  m.registry_version = reg.version();
  RandomStream rng(2, "coef");
  for (std::size_t j = 0; j < reg.size(); ++j) m.coefficients.push_back(rng.normal());
  m.mean.assign(reg.size(), 0);
  m.scale.assign(reg.size(), 1);
  const auto inc = lingfeat::build_incidence(doc, reg, lex);
  const auto a = lam_explain(m, doc, inc, Label::opinion);
  const auto b = lam_explain(m, doc, inc, Label::opinion);
  ASSERT_EQ(a.feature_count, reg.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    double row = 0;
    for (std::size_t j = 0; j < reg.size(); ++j) row += a.per_feature[i * reg.size() + j];
    EXPECT_EQ(row, a.relevances[i]);
    EXPECT_GE(a.relevances[i], 0.0);
  }
  std::ostringstream sa, sb;
  write_explanation(sa, a);
  write_explanation(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Lrp, LinearNetworkRelevanceIsInputTimesWeight) {
  // Identity hidden layer, zero biases: logit_c = sum_d w_out[c][d] * x_d with
  // x = mean of the token embeddings, so token i's share is (e_i . w_c) / N.
  // The oracle is the epsilon -> 0 limit, so the trace runs with epsilon 0.
  RandomStream rng(3, "linear");
  const std::size_t dim = 4;
  auto p = fixtures::random_params(rng, 16, dim, dim);
  std::fill(p.w_hidden.begin(), p.w_hidden.end(), 0.0);
  for (std::size_t k = 0; k < dim; ++k) p.w_hidden[k * dim + k] = 1.0;
  std::fill(p.b_hidden.begin(), p.b_hidden.end(), 0.0);
  std::fill(p.b_out.begin(), p.b_out.end(), 0.0);
  models::TrainConfig c;
  c.activation = models::Activation::identity;
  const auto model = wrap(p, c);
  const auto doc = make_doc("d", {"le", "chat", "dort", "bien"});
  const auto ids = models::encode(doc, 16);

  const auto trace = lrp_trace(model, doc, 0.0);
  const std::size_t cls = trace.predicted == Label::opinion ? 1 : 0;
  std::vector<double> oracle;
  for (auto id : ids) {
    double s = 0;
    for (std::size_t k = 0; k < dim; ++k) s += p.embedding[id * dim + k] * p.w_out[cls * dim + k];
    oracle.push_back(s / ids.size());
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_NEAR(trace.token_relevance[i], oracle[i], 1e-12);
  }
  // With the default epsilon the leakage stays within a few eps / |z|.
  const auto stabilized = lrp_trace(model, doc);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_NEAR(stabilized.token_relevance[i], oracle[i], 1e-7);
  }
  EXPECT_NEAR(trace.output, sum(oracle), 1e-12);
}

TEST(Lrp, RepeatedTokensShareRelevanceEqually) {
  RandomStream rng(4, "repeat");
  const auto model = wrap(fixtures::random_params(rng, 32, 6, 5), {});
  const auto e = lrp_explain(model, make_doc("d", std::vector<std::string>(5, "chat")));
  for (double r : e.relevances) EXPECT_NEAR(r, 0.2, 1e-12);
}

TEST(Lrp, NormalizedSumAndConservation) {
  RandomStream rng(5, "conserve");
  const std::vector<std::string> words{"le", "chat", "dort", "sur", "un", "tapis", "rouge", "!"};
  for (int trial = 0; trial < 50; ++trial) {
    models::TrainConfig c;
    c.pooling = trial % 2 ? models::Pooling::attention : models::Pooling::mean;
    const auto model = wrap(fixtures::random_params(rng, 64, 8, 6), c);
    std::vector<std::string> toks;
    for (std::size_t i = 0, n = 1 + rng.below(12); i < n; ++i) {
      toks.push_back(words[rng.below(words.size())]);
    }
    const auto doc = make_doc("d", toks);
    const auto t = lrp_trace(model, doc);
    const double tol = 1e-6 * std::max(1.0, std::abs(t.output));
    EXPECT_NEAR(t.hidden, t.output, tol);
    EXPECT_NEAR(t.pooled, t.output, tol);
    EXPECT_NEAR(t.tokens, t.output, tol);
    const auto e = lrp_explain(model, doc);
    EXPECT_NEAR(sum(e.relevances), 1.0, 1e-12);
    EXPECT_LE(e.leakage, tol);
    for (double r : e.relevances) EXPECT_TRUE(std::isfinite(r));
    EXPECT_EQ(e.model_id, "neural-seed-0");
  }
}

TEST(Lrp, NonFiniteModelIsRejected) {
  RandomStream rng(6, "nan");
  auto p = fixtures::random_params(rng, 8, 3, 3);
  p.w_out[0] = std::nan("");
  EXPECT_THROW(lrp_explain(wrap(p, {}), make_doc("d", {"a"})), ModelError);
}

TEST(Subtokens, SingletonSpansAreIdentity) {
  const std::vector<double> r{0.1, 0.5, 0.4};
  EXPECT_EQ(aggregate_subtokens(r, SubtokenSpanMap{{1, 1, 1}}), r);
}

TEST(Subtokens, MeanAndSum) {
  const std::vector<double> r{0.2, 0.4, 0.4};
  const auto mean = aggregate_subtokens(r, SubtokenSpanMap{{2, 1}});
  EXPECT_NEAR(mean[0], 0.3, 1e-15);
  EXPECT_EQ(mean[1], 0.4);
  const auto total = aggregate_subtokens(r, SubtokenSpanMap{{2, 1}}, SubtokenReduce::sum);
  EXPECT_NEAR(total[0], 0.6, 1e-15);
}

TEST(Subtokens, ContractErrors) {
  const std::vector<double> r{0.2, 0.4};
  EXPECT_THROW(aggregate_subtokens(r, SubtokenSpanMap{{2, 0}}), ContractError);
  EXPECT_THROW(aggregate_subtokens(r, SubtokenSpanMap{{3}}), ContractError);
}

TEST(Subtokens, FromDocument) {
  auto doc = make_doc("d", {"anticonstitutionnellement", "le"});
  doc.tokens[0].subtoken_count = 4;
  const auto spans = SubtokenSpanMap::from_document(doc);
  EXPECT_EQ(spans.counts, (std::vector<std::size_t>{4, 1}));
  EXPECT_EQ(spans.total(), 5u);
}

TEST(Minimality, CountsAboveThreshold) {
  Explanation e;
  e.relevances = {0.5, 0.005, 0.3, 0.01, 0.185};
  EXPECT_EQ(minimality(e), 3u);
  EXPECT_EQ(minimality(e, 0.2), 2u);
}

TEST(ExplanationIo, RoundTripIsBitExact) {
  RandomStream rng(7, "io");
  std::vector<Explanation> in;
  for (int k = 0; k < 5; ++k) {
    Explanation e;
    e.doc_id = "doc,\"" + std::to_string(k);
    e.model_id = "neural-seed-" + std::to_string(k);
    e.method = k % 2 ? "lam" : "lrp";
    e.predicted = k % 2 ? Label::opinion : Label::news;
    for (int i = 0; i < 4; ++i) {
      e.tokens.push_back("tök" + std::to_string(i));
      e.relevances.push_back(rng.normal() / 3);
    }
    if (e.method == "lam") {
      e.feature_count = 2;
      for (int i = 0; i < 8; ++i) e.per_feature.push_back(rng.uniform());
    } else {
      e.leakage = rng.uniform() * 1e-9;
    }
    in.push_back(e);
  }
  std::stringstream io;
  for (const auto& e : in) write_explanation(io, e);
  const auto out = read_explanations(io);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    EXPECT_EQ(out[k].doc_id, in[k].doc_id);
    EXPECT_EQ(out[k].model_id, in[k].model_id);
    EXPECT_EQ(out[k].method, in[k].method);
    EXPECT_EQ(out[k].predicted, in[k].predicted);
    EXPECT_EQ(out[k].tokens, in[k].tokens);
    EXPECT_EQ(out[k].relevances, in[k].relevances);
    EXPECT_EQ(out[k].per_feature, in[k].per_feature);
    EXPECT_EQ(out[k].leakage, in[k].leakage);
  }
}

TEST(ExplanationIo, MalformedLineNamesLineNumber) {
  std::istringstream in(
      R"({"model_id":"m","doc_id":"d","method":"lrp","predicted_label":"news","tokens":["a"],"relevances":[1]})"
      "\n{broken\n");
  try {
    read_explanations(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

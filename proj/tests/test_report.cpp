#include "seedex/error.hpp"
#include "seedex/report.hpp"
#include "seedex/text.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

using namespace seedex;
using namespace seedex::report;

namespace {

explain::Explanation expl_for(const corpus::AnnotatedDocument& doc, std::vector<double> r) {
  explain::Explanation e;
  e.doc_id = doc.id;
  e.model_id = "neural-seed-1";
  e.method = "lrp";
  for (const auto& t : doc.tokens) e.tokens.push_back(t.surface);
  e.relevances = std::move(r);
  return e;
}

}  // namespace

TEST(Opacities, MaxNormalization) {
  EXPECT_EQ(token_opacities(std::vector<double>{0.2, 0.4}), (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(token_opacities(std::vector<double>{1.0}), (std::vector<double>{1.0}));
  EXPECT_EQ(token_opacities(std::vector<double>{0, 0, 0}), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(token_opacities(std::vector<double>{-0.3, 0.6}), (std::vector<double>{0, 1.0}));
}

TEST(AttentionMap, EveryTokenOnceInOrder) {
  const auto doc = fixtures::make_doc(
      "d<1>", {"Le", "«", "chat", "»", "a", "dit", ":", "<b>", "&", "l'été", "chat"});
  RandomStream rng(1, "html");
  std::vector<double> r;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) r.push_back(rng.uniform());
  const std::string html = render_attention_map(doc, expl_for(doc, r), Palette::orange);

  const std::regex span(R"re(<span class="tok" data-index="(\d+)"[^>]*>([^<]*)</span>)re");
  std::vector<std::string> seen;
  std::size_t expected_index = 0;
  for (auto it = std::sregex_iterator(html.begin(), html.end(), span); it != std::sregex_iterator();
       ++it) {
    EXPECT_EQ(std::stoul((*it)[1]), expected_index++);
    seen.push_back((*it)[2]);
  }
  ASSERT_EQ(seen.size(), doc.tokens.size());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i], text::html_escape(doc.tokens[i].surface));
  }
  EXPECT_NE(html.find("255,140,0"), std::string::npos);
  EXPECT_EQ(html.find("<b>"), std::string::npos);
}

TEST(AttentionMap, ZeroRelevanceIsUnshaded) {
  const auto doc = fixtures::make_doc("d", {"a", "b"});
  const std::string html = render_attention_map(doc, expl_for(doc, {0, 0}), Palette::blue);
  EXPECT_NE(html.find("rgba(30,100,255,0)"), std::string::npos);
  EXPECT_EQ(html.find("rgba(30,100,255,1)"), std::string::npos);
}

TEST(AttentionMap, LengthMismatchIsContractError) {
  const auto doc = fixtures::make_doc("d", {"a", "b"});
  EXPECT_THROW(render_attention_map(doc, expl_for(doc, {1.0}), Palette::blue), ContractError);
  EXPECT_THROW(parse_palette("green"), ConfigError);
}

TEST(BoxplotCsv, RowsAndBitExactRoundTrip) {
  RandomStream rng(2, "box");
  std::vector<std::vector<double>> r(7, std::vector<double>(3));
  for (auto& v : r) {
    for (auto& x : v) x = rng.normal() / 7;
  }
  const auto d = stats::characterize_distribution(r, {"le", "chat, noir", "\"dort\""});
  std::stringstream io;
  export_boxplot_data(io, d);
  const std::string text = io.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  const auto back = read_boxplot_data(io);
  ASSERT_EQ(back.tokens.size(), 3u);
  EXPECT_EQ(back.surfaces, d.surfaces);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.tokens[i].min, d.tokens[i].min);
    EXPECT_EQ(back.tokens[i].q1, d.tokens[i].q1);
    EXPECT_EQ(back.tokens[i].median, d.tokens[i].median);
    EXPECT_EQ(back.tokens[i].q3, d.tokens[i].q3);
    EXPECT_EQ(back.tokens[i].max, d.tokens[i].max);
    EXPECT_EQ(back.tokens[i].mean, d.tokens[i].mean);
    EXPECT_EQ(back.tokens[i].nonzero_count, d.tokens[i].nonzero_count);
  }
}

TEST(BoxplotCsv, EmptyDistributionIsHeaderOnly) {
  std::ostringstream out;
  export_boxplot_data(out, stats::TokenDistribution{});
  EXPECT_EQ(out.str(), "token_index,surface,min,q1,median,q3,max,mean,nonzero_count\n");
}

TEST(BoxplotCsv, MalformedRowNamesLine) {
  std::istringstream in("token_index,surface,min,q1,median,q3,max,mean,nonzero_count\n0,a,1,2\n");
  try {
    read_boxplot_data(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(EquivalenceCsv, Columns) {
  const std::vector<double> acc{0.90, 0.91, 0.92, 0.99};
  const std::vector<std::uint64_t> ids{1, 2, 3, 4};
  const std::vector<NamedEquivalence> rows{
      {"neural-3", stats::select_equivalent(acc, ids, 3, stats::EquivalenceMode::closest, 100)}};
  std::ostringstream out;
  export_equivalence(out, rows);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "name,mode,k,min_accuracy,max_accuracy,epsilon,z,p,equivalent");
  const auto f = split_csv_line(row);
  ASSERT_EQ(f.size(), 9u);
  EXPECT_EQ(f[0], "neural-3");
  EXPECT_EQ(f[1], "closest");
  EXPECT_EQ(f[2], "3");
  EXPECT_EQ(f[8], "true");
}

TEST(SplitCsvLine, Quoting) {
  EXPECT_EQ(split_csv_line("a,\"b,c\",\"d\"\"e\",,"),
            (std::vector<std::string>{"a", "b,c", "d\"e", "", ""}));
  EXPECT_THROW(split_csv_line("\"open"), DataError);
}

#pragma once

#include "seedex/corpus.hpp"
#include "seedex/enrich.hpp"
#include "seedex/explain.hpp"
#include "seedex/stats.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace seedex::report {

enum class Palette { orange, blue };
Palette parse_palette(std::string_view name);

// Opacity of each token: max(relevance, 0) / max relevance of the document,
// or 0 when no relevance is positive.
std::vector<double> token_opacities(std::span<const double> relevances);

// Self-contained HTML page; each token is one <span> with its relevance in
// the title attribute, in document order.
std::string render_attention_map(const corpus::AnnotatedDocument& doc,
                                 const explain::Explanation& explanation, Palette palette);

// Columns token_index, surface, min, q1, median, q3, max, mean,
// nonzero_count; numbers use 17 significant digits.
void export_boxplot_data(std::ostream& out, const stats::TokenDistribution& distribution);
stats::TokenDistribution read_boxplot_data(std::istream& in);

struct NamedEquivalence {
  std::string name;
  stats::EquivalenceSet set;
};

// Columns name, mode, k, min_accuracy, max_accuracy, epsilon, z, p,
// equivalent.
void export_equivalence(std::ostream& out, std::span<const NamedEquivalence> rows);

void export_comparisons(std::ostream& out, std::span<const enrich::Comparison> rows);

// RFC 4180 record splitting for the files written above.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace seedex::report

#include "seedex/report.hpp"

#include "seedex/error.hpp"
#include "seedex/text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace seedex::report {

using text::csv_field;
using text::format_g17;

Palette parse_palette(std::string_view name) {
  if (name == "orange") return Palette::orange;
  if (name == "blue") return Palette::blue;
  throw ConfigError("unknown palette '" + std::string(name) + "'");
}

std::vector<double> token_opacities(std::span<const double> relevances) {
  double peak = 0;
  for (double r : relevances) peak = std::max(peak, r);
  std::vector<double> out;
  out.reserve(relevances.size());
  for (double r : relevances) out.push_back(peak > 0 ? std::max(r, 0.0) / peak : 0.0);
  return out;
}

std::string render_attention_map(const corpus::AnnotatedDocument& doc,
                                 const explain::Explanation& e, Palette palette) {
  if (e.relevances.size() != doc.tokens.size()) {
    throw ContractError("explanation has " + std::to_string(e.relevances.size()) +
                        " relevances for a document of " + std::to_string(doc.tokens.size()) +
                        " tokens");
  }
  const char* rgb = palette == Palette::orange ? "255,140,0" : "30,100,255";
  const auto opacity = token_opacities(e.relevances);
  const std::string title = text::html_escape(doc.id + " | " + e.model_id + " | " + e.method +
                                              " | predicted " +
                                              std::string(corpus::label_name(e.predicted)));
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>" << title
       << "</title>\n<style>\nbody { font-family: serif; line-height: 1.9; max-width: 48em; }\n"
       << ".tok { padding: 0 1px; border-radius: 2px; }\n</style>\n</head>\n<body>\n<h1>"
       << title << "</h1>\n<p class=\"map\">\n";
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    html << "<span class=\"tok\" data-index=\"" << i << "\" style=\"background-color: rgba("
         << rgb << ',' << format_g17(opacity[i]) << ")\" title=\"" << format_g17(e.relevances[i])
         << "\">" << text::html_escape(doc.tokens[i].surface) << "</span>\n";
  }
  html << "</p>\n</body>\n</html>\n";
  return html.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  return fields;
}

void export_boxplot_data(std::ostream& out, const stats::TokenDistribution& d) {
  out << "token_index,surface,min,q1,median,q3,max,mean,nonzero_count\n";
  for (std::size_t i = 0; i < d.tokens.size(); ++i) {
    const auto& t = d.tokens[i];
    out << i << ',' << csv_field(i < d.surfaces.size() ? d.surfaces[i] : "") << ','
        << format_g17(t.min) << ',' << format_g17(t.q1) << ',' << format_g17(t.median) << ','
        << format_g17(t.q3) << ',' << format_g17(t.max) << ',' << format_g17(t.mean) << ','
        << t.nonzero_count << '\n';
  }
  if (!out) throw IoError("failed to write box-plot data");
}

stats::TokenDistribution read_boxplot_data(std::istream& in) {
  stats::TokenDistribution d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const DataError& e) {
      throw ParseError(lineno, e.what());
    }
    if (f.size() != 9) throw ParseError(lineno, "expected 9 columns");
    try {
      if (std::stoul(f[0]) != d.tokens.size()) throw ParseError(lineno, "token_index out of order");
      d.surfaces.push_back(f[1]);
      stats::TokenSummary t;
      t.min = std::stod(f[2]);
      t.q1 = std::stod(f[3]);
      t.median = std::stod(f[4]);
      t.q3 = std::stod(f[5]);
      t.max = std::stod(f[6]);
      t.mean = std::stod(f[7]);
      t.nonzero_count = std::stoul(f[8]);
      d.tokens.push_back(t);
    } catch (const std::invalid_argument&) {
      throw ParseError(lineno, "non-numeric field");
    } catch (const std::out_of_range&) {
      throw ParseError(lineno, "numeric field out of range");
    }
  }
  return d;
}

void export_equivalence(std::ostream& out, std::span<const NamedEquivalence> rows) {
  out << "name,mode,k,min_accuracy,max_accuracy,epsilon,z,p,equivalent\n";
  for (const auto& [name, s] : rows) {
    out << csv_field(name) << ',' << stats::mode_name(s.mode) << ',' << s.members.size() << ','
        << format_g17(s.min_accuracy) << ',' << format_g17(s.max_accuracy) << ','
        << format_g17(s.epsilon) << ',' << format_g17(s.z) << ',' << format_g17(s.p) << ','
        << (s.equivalent ? "true" : "false") << '\n';
  }
  if (!out) throw IoError("failed to write equivalence table");
}

void export_comparisons(std::ostream& out, std::span<const enrich::Comparison> rows) {
  out << "test_set,n,baseline_accuracy,enriched_accuracy,z,p,significant\n";
  for (const auto& c : rows) {
    out << csv_field(c.test_set) << ',' << c.n << ',' << format_g17(c.baseline_accuracy) << ','
        << format_g17(c.enriched_accuracy) << ',' << format_g17(c.z) << ',' << format_g17(c.p)
        << ',' << (c.significant ? "true" : "false") << '\n';
  }
  if (!out) throw IoError("failed to write comparison table");
}

}  // namespace seedex::report

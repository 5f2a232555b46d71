#include "seedex/explain.hpp"

#include "seedex/error.hpp"
#include "seedex/text.hpp"

#include "json.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace seedex::explain {

using corpus::AnnotatedDocument;
using corpus::Label;

namespace {

std::vector<std::string> surfaces(const AnnotatedDocument& doc) {
  std::vector<std::string> out;
  out.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) out.push_back(t.surface);
  return out;
}

double stabilizer(double z, double epsilon) { return z + (z >= 0 ? epsilon : -epsilon); }

}  // namespace

Explanation lam_explain(const models::LogRegModel& model, const AnnotatedDocument& doc,
                        const lingfeat::IncidenceMatrix& incidence, Label predicted,
                        std::string model_id) {
  if (incidence.registry_version() != model.registry_version ||
      incidence.feature_count() != model.feature_count()) {
    throw ContractError("incidence registry " + incidence.registry_version() +
                        " does not match model registry " + model.registry_version);
  }
  if (incidence.token_count() != doc.tokens.size() || incidence.doc_id() != doc.id) {
    throw ContractError("incidence matrix was built for a different document");
  }
  const std::size_t n = doc.tokens.size(), p = model.feature_count();
  Explanation e;
  e.doc_id = doc.id;
  e.model_id = std::move(model_id);
  e.method = "lam";
  e.predicted = predicted;
  e.tokens = surfaces(doc);
  e.relevances.assign(n, 0.0);
  e.per_feature.assign(n * p, 0.0);
  e.feature_count = p;

  const int want = corpus::sign(predicted);
  for (std::size_t j = 0; j < p; ++j) {
    const double coef = model.coefficients[j];
    const int sign = coef > 0 ? 1 : (coef < 0 ? -1 : 0);
    if (sign != want) continue;
    const double total = incidence.column_sum(j);
    if (!(total > 0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      e.per_feature[i * p + j] = incidence.at(i, j) / total * coef;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < p; ++j) s += e.per_feature[i * p + j];
    e.relevances[i] = s;
  }
  return e;
}

LrpTrace lrp_trace(const models::NeuralModel& model, const AnnotatedDocument& doc,
                   double epsilon) {
  const auto& params = model.params;
  if (!params.all_finite()) throw ModelError("model parameters contain NaN or infinity");
  const models::ForwardPass f =
      models::forward(params, model.config, models::encode(doc, model.config.buckets));
  const std::size_t n = f.ids.size(), d = params.dim, h = params.hidden;

  LrpTrace trace;
  trace.predicted = models::decide(f.logits[0], f.logits[1]);
  const std::size_t out = trace.predicted == Label::opinion ? 1 : 0;
  trace.output = f.logits[out];

  std::vector<double> r_hidden(h, 0.0);
  {
    double z = 0;
    for (std::size_t k = 0; k < h; ++k) z += f.hidden[k] * params.w_out[out * h + k];
    const double denom = stabilizer(z, epsilon);
    for (std::size_t k = 0; k < h; ++k) {
      r_hidden[k] = f.hidden[k] * params.w_out[out * h + k] / denom * trace.output;
      trace.hidden += r_hidden[k];
    }
  }

  std::vector<double> r_pooled(d, 0.0);
  for (std::size_t k = 0; k < h; ++k) {
    double z = 0;
    for (std::size_t m = 0; m < d; ++m) z += f.pooled[m] * params.w_hidden[k * d + m];
    const double denom = stabilizer(z, epsilon);
    for (std::size_t m = 0; m < d; ++m) {
      r_pooled[m] += f.pooled[m] * params.w_hidden[k * d + m] / denom * r_hidden[k];
    }
  }
  for (double r : r_pooled) trace.pooled += r;

  trace.token_relevance.assign(n, 0.0);
  for (std::size_t m = 0; m < d; ++m) {
    const double denom = stabilizer(f.pooled[m], epsilon);
    for (std::size_t i = 0; i < n; ++i) {
      const double contribution = f.weights[i] * params.embedding[f.ids[i] * d + m];
      trace.token_relevance[i] += contribution / denom * r_pooled[m];
    }
  }
  for (double r : trace.token_relevance) trace.tokens += r;
  return trace;
}

Explanation lrp_explain(const models::NeuralModel& model, const AnnotatedDocument& doc,
                        std::string model_id, double epsilon) {
  LrpTrace trace = lrp_trace(model, doc, epsilon);
  Explanation e;
  e.doc_id = doc.id;
  e.model_id = model_id.empty() ? "neural-seed-" + std::to_string(model.seed) : std::move(model_id);
  e.method = "lrp";
  e.predicted = trace.predicted;
  e.tokens = surfaces(doc);
  e.leakage = std::abs(trace.output - trace.tokens);
  e.relevances = std::move(trace.token_relevance);
  if (trace.tokens != 0 && std::isfinite(trace.tokens)) {
    for (double& r : e.relevances) r /= trace.tokens;
  }
  return e;
}

SubtokenSpanMap SubtokenSpanMap::from_document(const AnnotatedDocument& doc) {
  SubtokenSpanMap m;
  for (const auto& t : doc.tokens) m.counts.push_back(t.subtoken_count);
  return m;
}

std::size_t SubtokenSpanMap::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::vector<double> aggregate_subtokens(std::span<const double> values,
                                        const SubtokenSpanMap& spans, SubtokenReduce reduce) {
  for (auto c : spans.counts) {
    if (c == 0) throw ContractError("subtoken span of length zero");
  }
  if (spans.total() != values.size()) {
    throw ContractError("subtoken spans cover " + std::to_string(spans.total()) +
                        " pieces but " + std::to_string(values.size()) + " relevances were given");
  }
  std::vector<double> out;
  out.reserve(spans.counts.size());
  std::size_t pos = 0;
  for (auto c : spans.counts) {
    double s = 0;
    for (std::size_t k = 0; k < c; ++k) s += values[pos + k];
    out.push_back(reduce == SubtokenReduce::mean ? s / static_cast<double>(c) : s);
    pos += c;
  }
  return out;
}

std::size_t minimality(const Explanation& e, double threshold) {
  std::size_t n = 0;
  for (double r : e.relevances) n += r > threshold;
  return n;
}

void write_explanation(std::ostream& out, const Explanation& e) {
  using nlohmann::json;
  auto doubles = [](std::span<const double> values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ',';
      s += text::format_g17(values[i]);
    }
    return s + "]";
  };
  out << "{\"model_id\":" << json(e.model_id).dump() << ",\"doc_id\":" << json(e.doc_id).dump()
      << ",\"method\":" << json(e.method).dump() << ",\"predicted_label\":\""
      << corpus::label_name(e.predicted) << "\",\"tokens\":" << json(e.tokens).dump()
      << ",\"relevances\":" << doubles(e.relevances)
      << ",\"leakage\":" << text::format_g17(e.leakage);
  if (!e.per_feature.empty()) {
    out << ",\"feature_count\":" << e.feature_count << ",\"per_feature\":" << doubles(e.per_feature);
  }
  out << "}\n";
}

std::vector<Explanation> read_explanations(std::istream& in) {
  using nlohmann::json;
  std::vector<Explanation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Explanation e;
      e.model_id = j.at("model_id").get<std::string>();
      e.doc_id = j.at("doc_id").get<std::string>();
      e.method = j.at("method").get<std::string>();
      e.predicted = corpus::parse_label(j.at("predicted_label").get<std::string>());
      e.tokens = j.at("tokens").get<std::vector<std::string>>();
      e.relevances = j.at("relevances").get<std::vector<double>>();
      e.leakage = j.value("leakage", 0.0);
      if (j.contains("per_feature")) {
        e.per_feature = j.at("per_feature").get<std::vector<double>>();
        e.feature_count = j.at("feature_count").get<std::size_t>();
      }
      if (e.tokens.size() != e.relevances.size()) {
        throw ParseError(lineno, "token and relevance counts differ");
      }
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ParseError(lineno, ex.what());
    }
  }
  return out;
}

}  // namespace seedex::explain

#include "seedex/corpus.hpp"

#include "seedex/error.hpp"
#include "seedex/rng.hpp"
#include "seedex/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace seedex::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

Label parse_label(std::string_view name) {
  if (name == "news") return Label::news;
  if (name == "opinion") return Label::opinion;
  throw LabelError("unknown label '" + std::string(name) + "' (expected news|opinion)");
}

std::string_view label_name(Label label) {
  return label == Label::opinion ? "opinion" : "news";
}

Token make_token(std::string surface, std::string pos, std::size_t start, std::size_t end,
                 std::optional<std::string> lemma, std::size_t subtoken_count) {
  Token t;
  t.lower = text::casefold(surface);
  t.surface = std::move(surface);
  t.pos = std::move(pos);
  t.lemma = std::move(lemma);
  t.start = start;
  t.end = end;
  t.subtoken_count = subtoken_count;
  return t;
}

std::string check_document(const AnnotatedDocument& doc) {
  if (doc.tokens.empty()) return "document '" + doc.id + "' has no tokens";
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    const std::string where = "token " + std::to_string(i) + " of '" + doc.id + "'";
    if (t.start >= t.end) return where + ": empty or inverted span";
    if (i > 0 && t.start < prev_end) return where + ": span overlaps its predecessor";
    if (t.subtoken_count == 0) return where + ": subtoken_count must be positive";
    if (t.lower != text::casefold(t.surface)) return where + ": lower is not the case-folded surface";
    prev_end = t.end;
  }
  return {};
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  throw DataError("unknown split '" + std::string(name) + "'");
}

CorpusStore::CorpusStore(std::vector<AnnotatedDocument> documents,
                         std::optional<SplitAssignment> splits)
    : documents_(std::move(documents)), splits_(std::move(splits)) {
  std::set<std::string_view> seen;
  for (const auto& d : documents_) {
    if (!seen.insert(d.id).second) throw IntegrityError("duplicate document id '" + d.id + "'");
  }
  if (splits_) {
    if (splits_->size() != documents_.size()) {
      throw IntegrityError("split assignment does not cover exactly the corpus ids");
    }
    for (const auto& d : documents_) {
      if (!splits_->count(d.id)) throw IntegrityError("document '" + d.id + "' has no split");
    }
  }
}

const AnnotatedDocument* CorpusStore::find(std::string_view id) const {
  for (const auto& d : documents_) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

std::vector<AnnotatedDocument> CorpusStore::subset(Split split) const {
  if (!splits_) throw DataError("corpus has no split assignment");
  std::vector<AnnotatedDocument> out;
  for (const auto& d : documents_) {
    if (splits_->at(d.id) == split) out.push_back(d);
  }
  return out;
}

CorpusSplits materialize_splits(const CorpusStore& store) {
  return {store.subset(Split::train), store.subset(Split::validation), store.subset(Split::test)};
}

// --- tokenizer -------------------------------------------------------------

namespace {

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0xA0 || cp == 0x202F || cp == 0x2009;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xAB: case 0xBB:                      // « »
    case 0xA1: case 0xBF:                      // ¡ ¿
    case 0x2018: case 0x2019: case 0x201C:     // ‘ ’ “
    case 0x201D: case 0x201E:                  // ” „
    case 0x2013: case 0x2014: case 0x2026:     // en dash, em dash, ellipsis
    case 0x2022: case 0xB7:                    // • ·
      return true;
    default:
      return false;
  }
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
bool is_letter(char32_t cp) { return !is_space(cp) && !is_punct(cp) && !is_digit(cp); }

struct CodePoint {
  char32_t cp;
  std::size_t pos;
  std::size_t width;
};

}  // namespace

std::vector<Token> tokenize_fallback(std::string_view raw, const TagLexicon* tags) {
  std::vector<CodePoint> cps;
  for (std::size_t pos = 0; pos < raw.size();) {
    std::size_t w = 1;
    const char32_t cp = text::decode_utf8(raw, pos, &w);
    cps.push_back({cp, pos, w});
    pos += w;
  }

  std::vector<Token> tokens;
  auto emit = [&](std::size_t start, std::size_t end) {
    std::string surface(raw.substr(start, end - start));
    std::string pos;
    if (tags) {
      auto it = tags->find(text::casefold(surface));
      if (it != tags->end()) pos = it->second;
    }
    tokens.push_back(make_token(std::move(surface), std::move(pos), start, end));
  };

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t word_start = kNone;
  auto flush = [&](std::size_t end) {
    if (word_start != kNone) emit(word_start, end);
    word_start = kNone;
  };

  for (std::size_t i = 0; i < cps.size();) {
    const CodePoint& c = cps[i];
    if (is_space(c.cp)) {
      flush(c.pos);
      ++i;
      continue;
    }
    if (is_punct(c.cp)) {
      const bool has_prev = i > 0 && word_start != kNone;
      const bool has_next = i + 1 < cps.size();
      const char32_t prev = has_prev ? cps[i - 1].cp : 0;
      const char32_t next = has_next ? cps[i + 1].cp : 0;
      const bool joiner = c.cp == U'\'' || c.cp == 0x2019 || c.cp == U'-';
      const bool decimal = c.cp == U'.' || c.cp == U',';
      if (has_prev && has_next &&
          ((joiner && is_letter(prev) && is_letter(next)) ||
           (decimal && is_digit(prev) && is_digit(next)))) {
        ++i;
        continue;
      }
      flush(c.pos);
      std::size_t j = i + 1;
      while (j < cps.size() && cps[j].cp == c.cp) ++j;
      emit(c.pos, cps[j - 1].pos + cps[j - 1].width);
      i = j;
      continue;
    }
    if (word_start == kNone) word_start = c.pos;
    ++i;
  }
  flush(raw.size());
  return tokens;
}

// --- JSONL -----------------------------------------------------------------

namespace {

AnnotatedDocument parse_record(const json& rec, std::size_t line) {
  if (!rec.is_object()) throw ParseError(line, "record is not a JSON object");
  AnnotatedDocument doc;
  if (!rec.contains("id") || !rec["id"].is_string()) throw ParseError(line, "missing string 'id'");
  doc.id = rec["id"].get<std::string>();
  if (!rec.contains("label") || !rec["label"].is_string()) {
    throw ParseError(line, "missing string 'label'");
  }
  try {
    doc.label = parse_label(rec["label"].get<std::string>());
  } catch (const LabelError& e) {
    throw LabelError("line " + std::to_string(line) + ": " + e.what());
  }
  if (rec.contains("source")) {
    if (!rec["source"].is_string()) throw ParseError(line, "'source' must be a string");
    doc.source = rec["source"].get<std::string>();
  }

  if (rec.contains("tokens")) {
    const json& toks = rec["tokens"];
    if (!toks.is_array()) throw ParseError(line, "'tokens' must be an array");
    for (const json& t : toks) {
      if (!t.is_object() || !t.contains("surface") || !t["surface"].is_string() ||
          !t.contains("start") || !t["start"].is_number_unsigned() || !t.contains("end") ||
          !t["end"].is_number_unsigned()) {
        throw ParseError(line, "token needs string 'surface' and unsigned 'start'/'end'");
      }
      std::optional<std::string> lemma;
      if (t.contains("lemma") && !t["lemma"].is_null()) {
        if (!t["lemma"].is_string()) throw ParseError(line, "'lemma' must be a string");
        lemma = t["lemma"].get<std::string>();
      }
      std::string pos;
      if (t.contains("pos")) {
        if (!t["pos"].is_string()) throw ParseError(line, "'pos' must be a string");
        pos = t["pos"].get<std::string>();
      }
      std::size_t subtokens = 1;
      if (t.contains("subtoken_count")) {
        if (!t["subtoken_count"].is_number_unsigned()) {
          throw ParseError(line, "'subtoken_count' must be a positive integer");
        }
        subtokens = t["subtoken_count"].get<std::size_t>();
      }
      doc.tokens.push_back(make_token(t["surface"].get<std::string>(), std::move(pos),
                                      t["start"].get<std::size_t>(),
                                      t["end"].get<std::size_t>(), std::move(lemma), subtokens));
    }
  } else if (rec.contains("text")) {
    if (!rec["text"].is_string()) throw ParseError(line, "'text' must be a string");
    doc.tokens = tokenize_fallback(rec["text"].get<std::string>());
  } else {
    throw ParseError(line, "record needs 'text' or 'tokens'");
  }

  if (auto problem = check_document(doc); !problem.empty()) throw ParseError(line, problem);
  return doc;
}

}  // namespace

CorpusStore read_corpus(std::istream& in) {
  std::vector<AnnotatedDocument> docs;
  SplitAssignment splits;
  std::set<std::string> ids;
  std::string buf;
  std::size_t line = 0;
  while (std::getline(in, buf)) {
    ++line;
    if (buf.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(buf);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("invalid JSON: ") + e.what());
    }
    AnnotatedDocument doc = parse_record(rec, line);
    if (!ids.insert(doc.id).second) {
      throw IntegrityError("line " + std::to_string(line) + ": duplicate document id '" + doc.id +
                           "'");
    }
    if (rec.contains("split")) {
      if (!rec["split"].is_string()) throw ParseError(line, "'split' must be a string");
      try {
        splits[doc.id] = parse_split(rec["split"].get<std::string>());
      } catch (const DataError& e) {
        throw ParseError(line, e.what());
      }
    }
    docs.push_back(std::move(doc));
  }
  if (!splits.empty() && splits.size() != docs.size()) {
    throw IntegrityError("either every record or no record may carry a 'split'");
  }
  if (splits.empty()) return CorpusStore(std::move(docs));
  return CorpusStore(std::move(docs), std::move(splits));
}

CorpusStore load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const CorpusStore& store) {
  for (const auto& doc : store.documents()) {
    ordered_json rec;
    rec["id"] = doc.id;
    rec["label"] = label_name(doc.label);
    rec["source"] = doc.source;
    if (store.split_assignment()) rec["split"] = split_name(store.split_assignment()->at(doc.id));
    ordered_json toks = ordered_json::array();
    for (const auto& t : doc.tokens) {
      ordered_json jt;
      jt["surface"] = t.surface;
      jt["pos"] = t.pos;
      if (t.lemma) jt["lemma"] = *t.lemma;
      jt["start"] = t.start;
      jt["end"] = t.end;
      jt["subtoken_count"] = t.subtoken_count;
      toks.push_back(std::move(jt));
    }
    rec["tokens"] = std::move(toks);
    out << rec.dump() << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const CorpusStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  write_corpus(out, store);
  if (!out) throw IoError("write failed for " + path.string());
}

// --- splitting -------------------------------------------------------------

CorpusStore split_corpus(const CorpusStore& store, const SplitRatios& ratios,
                         std::uint64_t seed) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1 (got " +
                      text::format_g17(sum) + ")");
  }

  SplitAssignment assignment;
  for (Label label : {Label::news, Label::opinion}) {
    std::vector<std::string> ids;
    for (const auto& d : store.documents()) {
      if (d.label == label) ids.push_back(d.id);
    }
    const std::size_t n = ids.size();
    // Largest remainder: floors first, leftover documents to the largest
    // fractional parts, training first on ties. The epsilon absorbs
    // representation error such as 0.1 * 30 = 3.0000000000000004.
    const double quota[3] = {n * ratios.train, n * ratios.validation, n * ratios.test};
    std::size_t count[3];
    double frac[3];
    std::size_t assigned = 0;
    for (int s = 0; s < 3; ++s) {
      count[s] = static_cast<std::size_t>(std::floor(quota[s] + 1e-9));
      frac[s] = quota[s] - static_cast<double>(count[s]);
      assigned += count[s];
    }
    int order[3] = {0, 1, 2};
    std::stable_sort(order, order + 3, [&](int a, int b) { return frac[a] > frac[b] + 1e-9; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++count[order[k % 3]];
    const std::size_t n_train = count[0], n_val = count[1], n_test = count[2];
    if ((ratios.train > 0 && n_train == 0) || (ratios.validation > 0 && n_val == 0) ||
        (ratios.test > 0 && n_test == 0)) {
      throw DataError("class '" + std::string(label_name(label)) + "' has " + std::to_string(n) +
                      " documents, too few for a non-empty split under these ratios");
    }
    RandomStream rng(seed, std::string("split/") + std::string(label_name(label)));
    rng.shuffle(std::span<std::string>(ids));
    for (std::size_t i = 0; i < n; ++i) {
      Split s = Split::train;
      if (i >= n_train) s = (i < n_train + n_val) ? Split::validation : Split::test;
      assignment[ids[i]] = s;
    }
  }
  return CorpusStore(store.documents(), std::move(assignment));
}

// --- synthetic corpus ------------------------------------------------------

namespace {

constexpr std::string_view kSyllables[] = {"ba", "ca", "de", "fi", "go", "lu", "ma",
                                           "ne", "po", "ri", "sa", "te", "vo", "zu"};
constexpr std::size_t kSyllableCount = std::size(kSyllables);

// Injective: three syllables for indices below 14^3, more above.
std::string pseudo_word(std::size_t index) {
  std::string digits;
  std::size_t k = index;
  std::size_t count = 0;
  do {
    digits.insert(0, kSyllables[k % kSyllableCount]);
    k /= kSyllableCount;
    ++count;
  } while (k > 0);
  while (count < 3) {
    digits.insert(0, kSyllables[0]);
    ++count;
  }
  return digits;
}

constexpr std::string_view kFillerPos[] = {"NOUN", "VERB", "DET", "ADP",
                                           "ADJ",  "ADV",  "NOUN", "PRON"};

struct VocabEntry {
  std::string surface;
  std::string pos;
};

}  // namespace

CorpusStore synth_corpus(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.shared_vocab_size == 0) throw ConfigError("synthetic vocabulary must be non-empty");
  if (spec.min_length == 0 || spec.max_length < spec.min_length) {
    throw ConfigError("synthetic document lengths need 1 <= min_length <= max_length");
  }
  if (spec.class_word_rate < 0 || spec.class_word_rate > 1 || spec.sentence_rate < 0 ||
      spec.sentence_rate > 1) {
    throw ConfigError("synthetic rates must lie in [0, 1]");
  }
  if (spec.class_word_rate > 0 && spec.class_vocab_size == 0) {
    throw ConfigError("class_word_rate > 0 needs a non-empty class vocabulary");
  }
  std::set<std::string> planted_forms;
  for (const auto& p : spec.planted) {
    if (p.surface.empty()) throw ConfigError("planted token with empty surface");
    if (p.p_opinion < 0 || p.p_opinion > 1 || p.p_news < 0 || p.p_news > 1) {
      throw ConfigError("planted token '" + p.surface + "' probabilities must lie in [0, 1]");
    }
    planted_forms.insert(text::casefold(p.surface));
  }

  // Vocabulary indices skip anything that would collide with a planted token.
  std::size_t next_index = 0;
  auto fresh_word = [&]() {
    std::string w;
    do {
      w = pseudo_word(next_index++);
    } while (planted_forms.count(w));
    return w;
  };
  std::vector<VocabEntry> shared, opinion_words, news_words;
  for (std::size_t k = 0; k < spec.shared_vocab_size; ++k) {
    shared.push_back({fresh_word(), std::string(kFillerPos[k % std::size(kFillerPos)])});
  }
  for (std::size_t k = 0; k < spec.class_vocab_size; ++k) {
    opinion_words.push_back({fresh_word(), k % 2 == 0 ? "ADJ" : "NOUN"});
  }
  for (std::size_t k = 0; k < spec.class_vocab_size; ++k) {
    news_words.push_back({fresh_word(), k % 2 == 0 ? "PROPN" : "NOUN"});
  }

  // Zipf(1) cumulative weights over the shared vocabulary.
  std::vector<double> cumulative(shared.size());
  double total = 0;
  for (std::size_t k = 0; k < shared.size(); ++k) {
    total += 1.0 / static_cast<double>(k + 1);
    cumulative[k] = total;
  }

  RandomStream rng(seed, "synth");
  std::vector<AnnotatedDocument> docs;
  for (std::size_t k = 0; k < spec.docs_per_class; ++k) {
    for (Label label : {Label::news, Label::opinion}) {
      const auto& class_words = label == Label::opinion ? opinion_words : news_words;
      const std::size_t length =
          spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
      std::vector<VocabEntry> words;
      for (std::size_t i = 0; i < length; ++i) {
        if (!class_words.empty() && rng.bernoulli(spec.class_word_rate)) {
          words.push_back(class_words[rng.below(class_words.size())]);
        } else {
          const double u = rng.uniform() * total;
          const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
          const auto idx = std::min<std::size_t>(it - cumulative.begin(), shared.size() - 1);
          words.push_back(shared[idx]);
        }
      }
      for (const auto& p : spec.planted) {
        const double prob = label == Label::opinion ? p.p_opinion : p.p_news;
        if (rng.bernoulli(prob)) {
          const auto at = rng.below(words.size() + 1);
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), {p.surface, p.pos});
        }
      }

      AnnotatedDocument doc;
      doc.id = std::string(label == Label::opinion ? "synth-op-" : "synth-nw-") +
               std::to_string(k);
      doc.label = label;
      doc.source = "synthetic";
      std::size_t offset = 0;
      auto append = [&](const std::string& surface, const std::string& pos) {
        if (offset > 0) ++offset;  // single space separator
        doc.tokens.push_back(make_token(surface, pos, offset, offset + surface.size()));
        offset += surface.size();
      };
      for (std::size_t i = 0; i < words.size(); ++i) {
        append(words[i].surface, words[i].pos);
        const bool last = i + 1 == words.size();
        if (last || rng.bernoulli(spec.sentence_rate)) append(".", "PUNCT");
      }
      docs.push_back(std::move(doc));
    }
  }
  return CorpusStore(std::move(docs));
}

}  // namespace seedex::corpus

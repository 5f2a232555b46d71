#include "seedex/lingfeat.hpp"

#include "seedex/error.hpp"
#include "seedex/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace seedex::lingfeat {

using corpus::AnnotatedDocument;
using corpus::Token;

std::optional<double> Lexicon::lookup(const std::string& form) const {
  auto it = entries.find(form);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

Lexicon parse_lexicon(std::istream& in, std::string name, LexiconKind kind) {
  Lexicon lex{std::move(name), kind, {}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab);
    double value = 1.0;
    if (tab != std::string::npos) {
      const std::string v = line.substr(tab + 1);
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
      if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(lineno, "lexicon '" + lex.name + "': bad value '" + v + "'");
      }
    }
    if (!std::isfinite(value)) {
      throw ParseError(lineno, "lexicon '" + lex.name + "': non-finite value");
    }
    if (word.empty()) continue;
    lex.entries[text::casefold(word)] = value;
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, std::string name, LexiconKind kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file " + path.string());
  return parse_lexicon(in, std::move(name), kind);
}

namespace {

Lexicon word_set(std::string name, std::initializer_list<const char*> words) {
  Lexicon lex{std::move(name), LexiconKind::membership, {}};
  for (const char* w : words) lex.entries[text::casefold(w)] = 1.0;
  return lex;
}

}  // namespace

LexiconSet builtin_lexicons() {
  LexiconSet set;
  auto add = [&](Lexicon lex) { set.emplace(lex.name, std::move(lex)); };
  add(word_set("first_person_pronouns", {"je", "j'", "j’", "me", "m'", "m’", "moi", "nous"}));
  add(word_set("first_person_determiners", {"mon", "ma", "mes", "notre", "nos"}));
  add(word_set("relative_pronouns",
               {"qui", "que", "qu'", "qu’", "dont", "où", "lequel", "laquelle", "lesquels",
                "lesquelles", "auquel", "auxquels", "auxquelles", "duquel", "desquels",
                "desquelles"}));
  add(word_set("indefinite_on", {"on"}));
  add(word_set("negation_words", {"ne", "n'", "n’", "pas", "jamais", "rien", "aucun", "aucune",
                                  "guère", "nullement", "ni", "personne"}));
  add(word_set("deictic_temporal",
               {"aujourd'hui", "aujourd’hui", "hier", "demain", "maintenant", "actuellement",
                "désormais", "dorénavant", "récemment", "bientôt", "naguère", "avant-hier",
                "après-demain"}));
  add(word_set("non_deictic_temporal",
               {"lundi", "mardi", "mercredi", "jeudi", "vendredi", "samedi", "dimanche",
                "janvier", "février", "mars", "avril", "mai", "juin", "juillet", "août",
                "septembre", "octobre", "novembre", "décembre", "gmt", "veille", "lendemain"}));
  add(word_set("thinking_verbs",
               {"penser", "pense", "penses", "pensons", "pensez", "pensent", "pensé",
                "croire", "crois", "croit", "croyons", "croyez", "croient", "cru",
                "imaginer", "imagine", "imaginez", "imaginons", "imaginé", "oublier",
                "oublie", "oubliez", "oublions", "oublié", "estimer", "estime", "estimé",
                "considérer", "considère", "considéré", "juger", "juge", "jugé", "supposer",
                "suppose", "supposé", "douter", "doute", "douté", "réfléchir", "réfléchit"}));
  add(word_set("quoting_verbs",
               {"préciser", "précise", "précisé", "indiquer", "indique", "indiqué",
                "expliquer", "explique", "expliqué", "affirmer", "affirme", "affirmé",
                "déclarer", "déclare", "déclaré", "souligner", "souligne", "souligné",
                "ajouter", "ajoute", "ajouté", "assurer", "assure", "assuré", "rappeler",
                "rappelle", "rappelé", "poursuivre", "poursuit", "poursuivi", "conclure",
                "conclut", "conclu", "annoncer", "annonce", "annoncé", "confirmer",
                "confirme", "confirmé"}));
  add(word_set("discourse_markers",
               {"bref", "certes", "d'ailleurs", "d’ailleurs", "toutefois", "pourtant",
                "cependant", "néanmoins", "ainsi", "donc", "enfin", "évidemment",
                "effectivement", "finalement", "voire", "notamment", "or"}));
  add(word_set("passive_auxiliaries",
               {"être", "est", "sont", "suis", "es", "sommes", "êtes", "été", "était",
                "étaient", "sera", "seront", "serait", "seraient", "fut", "furent", "soit",
                "soient"}));
  return set;
}

// --- registry --------------------------------------------------------------

FeatureDefinition wordlist_feature(std::string id, std::string lexicon, std::string description) {
  FeatureDefinition d;
  d.id = std::move(id);
  d.matcher = Matcher::wordlist;
  d.lexicon = std::move(lexicon);
  d.description = std::move(description);
  return d;
}

FeatureDefinition scalar_feature(std::string id, std::string lexicon, std::string description) {
  FeatureDefinition d = wordlist_feature(std::move(id), std::move(lexicon), std::move(description));
  d.matcher = Matcher::scalar_lexicon;
  return d;
}

namespace {

FeatureDefinition pos_feature(std::string id, std::vector<std::string> tags, std::string desc) {
  FeatureDefinition d;
  d.id = std::move(id);
  d.matcher = Matcher::pos;
  d.forms = std::move(tags);
  d.description = std::move(desc);
  return d;
}

FeatureDefinition surface_feature(std::string id, std::vector<std::string> forms,
                                  std::string desc) {
  FeatureDefinition d;
  d.id = std::move(id);
  d.matcher = Matcher::surface;
  d.forms = std::move(forms);
  d.description = std::move(desc);
  return d;
}

FeatureDefinition simple_feature(std::string id, FeatureKind kind, Matcher m, std::string desc) {
  FeatureDefinition d;
  d.id = std::move(id);
  d.kind = kind;
  d.matcher = m;
  d.description = std::move(desc);
  return d;
}

const std::vector<FeatureDefinition>& catalog() {
  static const std::vector<FeatureDefinition> kCatalog = [] {
    std::vector<FeatureDefinition> c;
    c.push_back(pos_feature("adjectives", {"ADJ"}, "proportion of adjectives"));
    c.push_back(pos_feature("verbs", {"VERB"}, "proportion of verbs"));
    c.push_back(wordlist_feature("first_person_pronouns", "first_person_pronouns",
                                 "first person pronouns"));
    c.push_back(wordlist_feature("first_person_determiners", "first_person_determiners",
                                 "first person determiners"));
    c.push_back(wordlist_feature("relative_pronouns", "relative_pronouns", "relative pronouns"));
    c.push_back(wordlist_feature("indefinite_on", "indefinite_on", "indefinite pronoun 'on'"));
    c.push_back(surface_feature("semicolons", {";"}, "semicolons"));
    c.push_back(surface_feature("exclamation_marks", {"!"}, "exclamation marks"));
    c.push_back(surface_feature("question_marks", {"?"}, "question marks"));
    c.push_back(surface_feature("inverted_commas", {"«", "»", "\"", "“", "”", "„"},
                                "inverted commas"));
    c.push_back(simple_feature("numbers", FeatureKind::token_incidence, Matcher::number,
                               "numbers"));
    c.push_back(wordlist_feature("negation_words", "negation_words", "negation words"));
    c.push_back(simple_feature("long_words", FeatureKind::token_incidence, Matcher::long_word,
                               "words longer than seven characters"));
    c.push_back(wordlist_feature("positive_sentiment", "sentiment_positive",
                                 "positive sentiment lexicon words"));
    c.push_back(wordlist_feature("negative_sentiment", "sentiment_negative",
                                 "negative sentiment lexicon words"));
    c.push_back(wordlist_feature("nrc_words", "nrc", "NRC emotion lexicon words"));
    c.push_back(wordlist_feature("user_lexicon", "user", "user-supplied lexicon words"));
    c.push_back(simple_feature("cttr", FeatureKind::global, Matcher::cttr,
                               "corrected type-token ratio"));
    c.push_back(simple_feature("avg_word_length", FeatureKind::global, Matcher::avg_word_length,
                               "average word length"));
    // enrichment
    c.push_back(wordlist_feature("deictic_temporal", "deictic_temporal",
                                 "deictic temporal markers"));
    c.push_back(wordlist_feature("non_deictic_temporal", "non_deictic_temporal",
                                 "non-deictic temporal markers"));
    c.push_back(wordlist_feature("thinking_verbs", "thinking_verbs", "verbs of thought"));
    c.push_back(wordlist_feature("quoting_verbs", "quoting_verbs", "verbs of quotation"));
    FeatureDefinition passive = simple_feature("passive_verbs", FeatureKind::token_incidence,
                                               Matcher::passive, "passive verbs");
    passive.lexicon = "passive_auxiliaries";
    c.push_back(std::move(passive));
    c.push_back(wordlist_feature("discourse_markers", "discourse_markers", "discourse markers"));
    c.push_back(scalar_feature("concreteness", "concreteness", "mean concreteness"));
    c.push_back(scalar_feature("imageability", "imageability", "mean imageability"));
    c.push_back(scalar_feature("subjective_frequency", "subjective_frequency",
                               "mean subjective frequency"));
    return c;
  }();
  return kCatalog;
}

constexpr std::size_t kBaselineCount = 19;
constexpr std::size_t kEnrichedCount = 28;
constexpr const char* kBaselineVersion = "ling19-v1";
constexpr const char* kEnrichedVersion = "ling28-v1";

std::vector<std::string> catalog_ids(std::size_t count) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < count; ++i) ids.push_back(catalog()[i].id);
  return ids;
}

}  // namespace

FeatureRegistry::FeatureRegistry(std::string version, std::vector<FeatureDefinition> features)
    : version_(std::move(version)), features_(std::move(features)) {
  std::set<std::string_view> seen;
  for (const auto& f : features_) {
    if (f.id.empty()) throw ConfigError("feature with empty id");
    if (!seen.insert(f.id).second) throw ConfigError("duplicate feature id '" + f.id + "'");
    const bool global = f.matcher == Matcher::cttr || f.matcher == Matcher::avg_word_length;
    if (global != (f.kind == FeatureKind::global)) {
      throw ConfigError("feature '" + f.id + "' has a kind inconsistent with its matcher");
    }
    const bool needs_lexicon = f.matcher == Matcher::wordlist ||
                               f.matcher == Matcher::scalar_lexicon ||
                               f.matcher == Matcher::passive;
    if (needs_lexicon && f.lexicon.empty()) {
      throw ConfigError("feature '" + f.id + "' needs a lexicon name");
    }
  }
}

std::optional<std::size_t> FeatureRegistry::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::string> FeatureRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& f : features_) out.push_back(f.id);
  return out;
}

std::vector<std::string> FeatureRegistry::required_lexicons() const {
  std::vector<std::string> out;
  for (const auto& f : features_) {
    if (!f.lexicon.empty() && std::find(out.begin(), out.end(), f.lexicon) == out.end()) {
      out.push_back(f.lexicon);
    }
  }
  return out;
}

FeatureDefinition catalog_feature(std::string_view id) {
  for (const auto& f : catalog()) {
    if (f.id == id) return f;
  }
  throw ConfigError("unknown feature id '" + std::string(id) + "'");
}

FeatureRegistry registry_from_ids(const std::vector<std::string>& ids,
                                  const std::vector<FeatureDefinition>& custom) {
  std::vector<FeatureDefinition> defs;
  for (const auto& id : ids) {
    auto it = std::find_if(custom.begin(), custom.end(),
                           [&](const FeatureDefinition& d) { return d.id == id; });
    defs.push_back(it != custom.end() ? *it : catalog_feature(id));
  }
  std::string version;
  if (custom.empty() && ids == catalog_ids(kBaselineCount)) {
    version = kBaselineVersion;
  } else if (custom.empty() && ids == catalog_ids(kEnrichedCount)) {
    version = kEnrichedVersion;
  } else {
    std::string key;
    for (const auto& d : defs) {
      key += d.id + '|' + d.lexicon + '|' + std::to_string(static_cast<int>(d.matcher)) + ';';
    }
    version = "custom-" + text::hex64(text::fnv1a64(key));
  }
  return FeatureRegistry(std::move(version), std::move(defs));
}

FeatureRegistry baseline_registry() { return registry_from_ids(catalog_ids(kBaselineCount)); }
FeatureRegistry enriched_registry() { return registry_from_ids(catalog_ids(kEnrichedCount)); }

// --- incidence -------------------------------------------------------------

IncidenceMatrix::IncidenceMatrix(std::string doc_id, std::string registry_version,
                                 std::size_t tokens, std::size_t features)
    : doc_id_(std::move(doc_id)),
      registry_version_(std::move(registry_version)),
      tokens_(tokens),
      features_(features),
      w_(tokens * features, 0.0) {}

double IncidenceMatrix::column_sum(std::size_t feature) const {
  double s = 0;
  for (std::size_t i = 0; i < tokens_; ++i) s += at(i, feature);
  return s;
}

double IncidenceMatrix::share(std::size_t token, std::size_t feature) const {
  const double total = column_sum(feature);
  return total > 0 ? at(token, feature) / total : 0.0;
}

void check_lexicons(const FeatureRegistry& registry, const LexiconSet& lexicons) {
  for (const auto& name : registry.required_lexicons()) {
    if (!lexicons.count(name)) {
      throw ConfigError("registry " + registry.version() + " needs lexicon '" + name +
                        "', which was not supplied");
    }
  }
}

namespace {

bool is_punct_token(const Token& t) {
  if (t.pos == "PUNCT") return true;
  for (unsigned char c : t.surface) {
    if (std::isalnum(c) || c >= 0x80) return false;
  }
  return true;
}

bool is_number_token(const Token& t) {
  if (t.pos == "NUM") return true;
  bool digit = false;
  for (unsigned char c : t.surface) {
    if (std::isdigit(c)) {
      digit = true;
    } else if (c != '.' && c != ',') {
      return false;
    }
  }
  return digit;
}

// Incidence weight of token i for feature f, or nullopt when it does not match.
std::optional<double> token_weight(const FeatureDefinition& f, const AnnotatedDocument& doc,
                                   std::size_t i, const LexiconSet& lexicons) {
  const Token& t = doc.tokens[i];
  auto in_forms = [&](const std::string& s) {
    return std::find(f.forms.begin(), f.forms.end(), s) != f.forms.end();
  };
  switch (f.matcher) {
    case Matcher::pos:
      return in_forms(t.pos) ? std::optional<double>(1.0) : std::nullopt;
    case Matcher::surface:
      return in_forms(t.lower) ? std::optional<double>(1.0) : std::nullopt;
    case Matcher::wordlist:
      return lexicons.at(f.lexicon).lookup(t.lookup_form()) ? std::optional<double>(1.0)
                                                             : std::nullopt;
    case Matcher::scalar_lexicon: {
      auto v = lexicons.at(f.lexicon).lookup(t.lookup_form());
      if (v && *v < 0) {
        throw DataError("lexicon '" + f.lexicon + "' has a negative value for '" +
                        t.lookup_form() + "'; incidence weights must be non-negative");
      }
      return v;
    }
    case Matcher::long_word:
      return (!is_punct_token(t) && text::utf8_length(t.surface) > 7) ? std::optional<double>(1.0)
                                                                       : std::nullopt;
    case Matcher::number:
      return is_number_token(t) ? std::optional<double>(1.0) : std::nullopt;
    case Matcher::passive:
      return (t.pos == "VERB" && i > 0 &&
              lexicons.at(f.lexicon).lookup(doc.tokens[i - 1].lookup_form()))
                 ? std::optional<double>(1.0)
                 : std::nullopt;
    case Matcher::cttr:
    case Matcher::avg_word_length:
      return std::nullopt;
  }
  return std::nullopt;
}

void require_tokens(const AnnotatedDocument& doc) {
  if (doc.tokens.empty()) {
    throw DataError("document '" + doc.id + "' is empty; feature ratios are undefined");
  }
}

}  // namespace

double cttr(const AnnotatedDocument& doc) {
  require_tokens(doc);
  std::unordered_set<std::string> types;
  for (const auto& t : doc.tokens) types.insert(t.lower);
  return static_cast<double>(types.size()) / std::sqrt(2.0 * static_cast<double>(doc.tokens.size()));
}

double avg_word_length(const AnnotatedDocument& doc) {
  require_tokens(doc);
  std::size_t chars = 0, words = 0;
  for (const auto& t : doc.tokens) {
    if (t.pos == "PUNCT") continue;
    chars += text::utf8_length(t.surface);
    ++words;
  }
  if (words == 0) {
    throw DataError("document '" + doc.id + "' has no non-punctuation tokens");
  }
  return static_cast<double>(chars) / static_cast<double>(words);
}

FeatureVector extract_features(const AnnotatedDocument& doc, const FeatureRegistry& registry,
                               const LexiconSet& lexicons) {
  require_tokens(doc);
  check_lexicons(registry, lexicons);
  FeatureVector fv{registry.version(), std::vector<double>(registry.size(), 0.0)};
  const double n = static_cast<double>(doc.tokens.size());
  for (std::size_t j = 0; j < registry.size(); ++j) {
    const FeatureDefinition& f = registry.features()[j];
    if (f.matcher == Matcher::cttr) {
      fv.values[j] = cttr(doc);
      continue;
    }
    if (f.matcher == Matcher::avg_word_length) {
      fv.values[j] = avg_word_length(doc);
      continue;
    }
    double sum = 0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (auto w = token_weight(f, doc, i, lexicons)) {
        sum += *w;
        ++matches;
      }
    }
    if (f.is_scalar()) {
      fv.values[j] = matches ? sum / static_cast<double>(matches) : 0.0;
    } else {
      fv.values[j] = static_cast<double>(matches) / n;
    }
  }
  return fv;
}

IncidenceMatrix build_incidence(const AnnotatedDocument& doc, const FeatureRegistry& registry,
                                const LexiconSet& lexicons) {
  require_tokens(doc);
  check_lexicons(registry, lexicons);
  IncidenceMatrix m(doc.id, registry.version(), doc.tokens.size(), registry.size());
  for (std::size_t j = 0; j < registry.size(); ++j) {
    const FeatureDefinition& f = registry.features()[j];
    if (f.kind == FeatureKind::global) continue;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (auto w = token_weight(f, doc, i, lexicons)) m.at(i, j) = *w;
    }
  }
  return m;
}

}  // namespace seedex::lingfeat

#pragma once

#include "seedex/corpus.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace seedex::lingfeat {

enum class LexiconKind { membership, scalar };

struct Lexicon {
  std::string name;
  LexiconKind kind = LexiconKind::membership;
  std::unordered_map<std::string, double> entries;  // case-folded keys

  std::optional<double> lookup(const std::string& form) const;
};

// One entry per line, `word<TAB>value`; the value defaults to 1.0. Blank
// lines and lines starting with '#' are skipped.
Lexicon parse_lexicon(std::istream& in, std::string name, LexiconKind kind);
Lexicon load_lexicon(const std::filesystem::path& path, std::string name, LexiconKind kind);

using LexiconSet = std::map<std::string, Lexicon>;

// French closed-class word lists (pronouns, negation, temporal markers,
// thinking/quoting verbs, discourse markers, passive auxiliaries). Loaded
// files with the same name replace these.
LexiconSet builtin_lexicons();

enum class FeatureKind { token_incidence, global };

enum class Matcher {
  pos,              // token POS tag in `forms`
  surface,          // case-folded surface in `forms`
  wordlist,         // lookup form present in lexicon `lexicon`
  scalar_lexicon,   // lexicon value of the lookup form, averaged over matches
  long_word,        // more than 7 characters, not punctuation
  number,           // NUM tag or a digit string
  passive,          // VERB right after an auxiliary from lexicon `lexicon`
  cttr,
  avg_word_length,
};

struct FeatureDefinition {
  std::string id;
  FeatureKind kind = FeatureKind::token_incidence;
  Matcher matcher = Matcher::pos;
  std::vector<std::string> forms;
  std::string lexicon;
  std::string description;

  bool is_scalar() const { return matcher == Matcher::scalar_lexicon; }
  bool is_categorical() const { return kind == FeatureKind::token_incidence && !is_scalar(); }
};

FeatureDefinition wordlist_feature(std::string id, std::string lexicon, std::string description = {});
FeatureDefinition scalar_feature(std::string id, std::string lexicon, std::string description = {});

class FeatureRegistry {
 public:
  FeatureRegistry(std::string version, std::vector<FeatureDefinition> features);

  const std::string& version() const { return version_; }
  const std::vector<FeatureDefinition>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::vector<std::string> ids() const;
  std::vector<std::string> required_lexicons() const;

 private:
  std::string version_;
  std::vector<FeatureDefinition> features_;
};

// The 19 default features. The grouping in the source literature is coarse,
// so this decomposition is the toolkit's own:
//   adjectives, verbs, first_person_pronouns, first_person_determiners,
//   relative_pronouns, indefinite_on, semicolons, exclamation_marks,
//   question_marks, inverted_commas, numbers, negation_words, long_words,
//   positive_sentiment, negative_sentiment, nrc_words, user_lexicon,
//   cttr, avg_word_length
FeatureRegistry baseline_registry();

// baseline + deictic_temporal, non_deictic_temporal, thinking_verbs,
// quoting_verbs, passive_verbs, discourse_markers, concreteness,
// imageability, subjective_frequency (28 total).
FeatureRegistry enriched_registry();

// Definition from the built-in catalog; throws ConfigError for unknown ids.
FeatureDefinition catalog_feature(std::string_view id);

// Registry from an ordered id list, resolving ids against `custom` first and
// the catalog second. The two default id lists keep their named versions;
// anything else gets a digest-based version.
FeatureRegistry registry_from_ids(const std::vector<std::string>& ids,
                                  const std::vector<FeatureDefinition>& custom = {});

struct FeatureVector {
  std::string registry_version;
  std::vector<double> values;
};

// Per-token weights w_ij, row-major over (token, feature).
class IncidenceMatrix {
 public:
  IncidenceMatrix(std::string doc_id, std::string registry_version, std::size_t tokens,
                  std::size_t features);

  const std::string& doc_id() const { return doc_id_; }
  const std::string& registry_version() const { return registry_version_; }
  std::size_t token_count() const { return tokens_; }
  std::size_t feature_count() const { return features_; }

  double at(std::size_t token, std::size_t feature) const { return w_[token * features_ + feature]; }
  double& at(std::size_t token, std::size_t feature) { return w_[token * features_ + feature]; }
  double column_sum(std::size_t feature) const;
  // w_ij / sum_i w_ij, or 0 when the column is empty.
  double share(std::size_t token, std::size_t feature) const;

 private:
  std::string doc_id_;
  std::string registry_version_;
  std::size_t tokens_;
  std::size_t features_;
  std::vector<double> w_;
};

// Carroll's corrected type-token ratio T / sqrt(2N) over case-folded types.
double cttr(const corpus::AnnotatedDocument& doc);

// Mean code-point length of the tokens whose POS is not PUNCT.
double avg_word_length(const corpus::AnnotatedDocument& doc);

FeatureVector extract_features(const corpus::AnnotatedDocument& doc,
                               const FeatureRegistry& registry, const LexiconSet& lexicons);

IncidenceMatrix build_incidence(const corpus::AnnotatedDocument& doc,
                                const FeatureRegistry& registry, const LexiconSet& lexicons);

// Throws ConfigError naming the first lexicon the registry needs but
// `lexicons` lacks.
void check_lexicons(const FeatureRegistry& registry, const LexiconSet& lexicons);

}  // namespace seedex::lingfeat

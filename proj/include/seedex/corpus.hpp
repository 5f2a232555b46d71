#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seedex::corpus {

// Opinion is +1 and news is -1 so that the sign of a prediction can be
// compared directly with the sign of a regression coefficient.
enum class Label : int { news = -1, opinion = 1 };

Label parse_label(std::string_view name);  // throws LabelError
std::string_view label_name(Label label);
inline int sign(Label label) { return static_cast<int>(label); }

struct Token {
  std::string surface;
  std::string lower;  // casefold(surface)
  std::string pos;
  std::optional<std::string> lemma;
  std::size_t start = 0;  // byte offsets into the raw document, [start, end)
  std::size_t end = 0;
  std::size_t subtoken_count = 1;

  // Form used for lexicon lookups: the lemma when present, else `lower`.
  const std::string& lookup_form() const { return lemma ? *lemma : lower; }
};

Token make_token(std::string surface, std::string pos, std::size_t start, std::size_t end,
                 std::optional<std::string> lemma = std::nullopt,
                 std::size_t subtoken_count = 1);

struct AnnotatedDocument {
  std::string id;
  std::vector<Token> tokens;
  Label label = Label::news;
  std::string source;
};

// Checks the document invariants (non-empty, increasing non-overlapping
// spans, lower == casefold(surface), subtoken_count >= 1). Returns an
// empty string when valid, otherwise a description of the first violation.
std::string check_document(const AnnotatedDocument& doc);

enum class Split { train, validation, test };
std::string_view split_name(Split split);
Split parse_split(std::string_view name);

using SplitAssignment = std::map<std::string, Split>;

class CorpusStore {
 public:
  CorpusStore() = default;
  // Throws IntegrityError on duplicate ids, or when `splits` does not assign
  // exactly the stored ids.
  explicit CorpusStore(std::vector<AnnotatedDocument> documents,
                       std::optional<SplitAssignment> splits = std::nullopt);

  const std::vector<AnnotatedDocument>& documents() const { return documents_; }
  const std::optional<SplitAssignment>& split_assignment() const { return splits_; }
  std::size_t size() const { return documents_.size(); }
  const AnnotatedDocument* find(std::string_view id) const;

  // Documents assigned to `split`, in corpus order. Throws DataError when the
  // store carries no split assignment.
  std::vector<AnnotatedDocument> subset(Split split) const;

 private:
  std::vector<AnnotatedDocument> documents_;
  std::optional<SplitAssignment> splits_;
};

struct CorpusSplits {
  std::vector<AnnotatedDocument> train;
  std::vector<AnnotatedDocument> validation;
  std::vector<AnnotatedDocument> test;
};

CorpusSplits materialize_splits(const CorpusStore& store);

// lower-cased word -> POS tag
using TagLexicon = std::unordered_map<std::string, std::string>;

// Whitespace split with punctuation detached into separate tokens. An
// apostrophe or hyphen between two letters stays inside the word
// ("aujourd'hui", "a-t-il"), as does a '.' or ',' between two digits. A run
// of the same punctuation mark ("...", "!!") forms one token.
std::vector<Token> tokenize_fallback(std::string_view raw, const TagLexicon* tags = nullptr);

CorpusStore read_corpus(std::istream& in);
CorpusStore load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const CorpusStore& store);
void save_corpus(const std::filesystem::path& path, const CorpusStore& store);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

// Stratified per class; within a class the order comes from a seeded
// shuffle. Sizes use largest-remainder rounding of n * ratio, so each is
// within 1 of its quota; ties favor training.
CorpusStore split_corpus(const CorpusStore& store, const SplitRatios& ratios,
                         std::uint64_t seed);

struct PlantedToken {
  std::string surface;
  std::string pos;
  double p_opinion = 0.0;  // probability that an opinion document contains it
  double p_news = 0.0;
};

struct SynthSpec {
  std::size_t docs_per_class = 100;
  std::size_t shared_vocab_size = 300;  // Zipf-distributed filler words
  std::size_t class_vocab_size = 40;    // words specific to each class
  double class_word_rate = 0.05;
  std::size_t min_length = 30;
  std::size_t max_length = 80;
  double sentence_rate = 0.08;
  std::vector<PlantedToken> planted;
};

CorpusStore synth_corpus(const SynthSpec& spec, std::uint64_t seed);

}  // namespace seedex::corpus

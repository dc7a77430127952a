#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "reprrec/entity.hpp"
#include "reprrec/error.hpp"

namespace reprrec {

struct RatingScale {
  double min = 0.5;
  double max = 5.0;

  bool contains(double v) const { return v >= min && v <= max; }
  double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
  double midpoint() const { return 0.5 * (min + max); }
};

struct RatingRecord {
  EntityToken user;
  EntityToken movie;
  double rating = 0.0;
  std::optional<std::int64_t> timestamp;
};

struct TagRecord {
  EntityToken user;
  EntityToken movie;
  EntityToken tag;  // lowercased, trimmed, inner whitespace collapsed
};

struct ItemMetadata {
  EntityToken movie;
  std::optional<EntityToken> director;
  std::vector<EntityToken> actors;  // billing order, duplicates dropped
};

// One rating event rendered as training text:
// [user, movie, tags..., director?, actors...], length >= 2.
using Sentence = std::vector<EntityToken>;

// lowercase, trim, collapse inner whitespace runs to single spaces
std::string normalize_tag(std::string_view text);

// CSV "userId,movieId,rating[,timestamp]"; optional header line beginning "userId"
std::vector<RatingRecord> parse_ratings(std::istream& source, RatingScale scale);

// CSV "userId,movieId,tagText[,timestamp]"; duplicates preserved
std::vector<TagRecord> parse_tags(std::istream& source);

// TSV "movieId<TAB>director<TAB>actor1|actor2|..."; one line per movie
std::vector<ItemMetadata> parse_metadata(std::istream& source);

// One sentence per rating record, in rating order. Tags are the ones this
// user applied to this movie, deduplicated and sorted; movies missing from
// metadata contribute user+movie+tags only.
std::vector<Sentence> build_sentences(std::span<const RatingRecord> ratings,
                                      std::span<const TagRecord> tags,
                                      std::span<const ItemMetadata> metadata,
                                      int max_actors = 5);

class Vocabulary {
 public:
  Vocabulary() = default;

  // Tokens below min_count are dropped; indices run by descending count,
  // ties by canonical string ascending. Throws if nothing survives.
  static Vocabulary build(const std::vector<Sentence>& sentences, std::int64_t min_count);

  int size() const { return static_cast<int>(tokens_.size()); }
  int index_of(const EntityToken& t) const;  // -1 when out of vocabulary
  const EntityToken& token(int index) const { return tokens_[index]; }
  std::int64_t count(int index) const { return counts_[index]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t total_count() const { return total_; }

  // drops out-of-vocabulary tokens, order preserved
  std::vector<int> encode(const Sentence& sentence) const;

  // text form: "<canonical><TAB><count>" per line, index order
  void save(std::ostream& sink) const;
  static Vocabulary load(std::istream& source);

 private:
  std::vector<EntityToken> tokens_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
  std::unordered_map<EntityToken, int> index_;
};

// sentence export: canonical tokens separated by single spaces, one per line
void write_sentences(std::ostream& sink, const std::vector<Sentence>& sentences);

// Inverse of write_sentences. Canonical tokens may contain spaces, so a new
// token starts at every field matching "<prefix>:".
std::vector<Sentence> read_sentences(std::istream& source);

}  // namespace reprrec

#include "reprrec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>

namespace reprrec {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

double parse_real(std::string_view field, const char* what, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

std::int64_t parse_int(std::string_view field, const char* what, std::size_t line) {
  field = trim(field);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

// strips a UTF-8 BOM on the first line; returns false at end of stream
bool next_line(std::istream& in, std::string& line, std::size_t& line_number) {
  if (!std::getline(in, line)) return false;
  ++line_number;
  if (line_number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::string normalize_tag(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::vector<RatingRecord> parse_ratings(std::istream& source, RatingScale scale) {
  std::vector<RatingRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (next_line(source, line, line_number)) {
    if (blank(line)) continue;
    if (line_number == 1 && line.rfind("userId", 0) == 0) continue;  // header
    auto fields = split(line, ',');
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError("expected userId,movieId,rating[,timestamp], got " +
                           std::to_string(fields.size()) + " fields",
                       line_number);
    }
    auto user = trim(fields[0]);
    auto movie = trim(fields[1]);
    if (user.empty() || movie.empty()) throw ParseError("empty userId or movieId", line_number);
    RatingRecord rec{user_token(std::string(user)), movie_token(std::string(movie)),
                     parse_real(fields[2], "rating", line_number), std::nullopt};
    if (!scale.contains(rec.rating)) {
      throw ParseError("rating " + std::string(trim(fields[2])) + " outside scale [" +
                           std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]",
                       line_number);
    }
    if (fields.size() == 4) rec.timestamp = parse_int(fields[3], "timestamp", line_number);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TagRecord> parse_tags(std::istream& source) {
  std::vector<TagRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (next_line(source, line, line_number)) {
    if (blank(line)) continue;
    if (line_number == 1 && line.rfind("userId", 0) == 0) continue;
    auto fields = split(line, ',');
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError("expected userId,movieId,tag[,timestamp], got " +
                           std::to_string(fields.size()) + " fields",
                       line_number);
    }
    auto user = trim(fields[0]);
    auto movie = trim(fields[1]);
    if (user.empty() || movie.empty()) throw ParseError("empty userId or movieId", line_number);
    std::string tag = normalize_tag(fields[2]);
    if (tag.empty()) throw ParseError("empty tag", line_number);
    if (fields.size() == 4) parse_int(fields[3], "timestamp", line_number);
    records.push_back({user_token(std::string(user)), movie_token(std::string(movie)),
                       tag_token(std::move(tag))});
  }
  return records;
}

std::vector<ItemMetadata> parse_metadata(std::istream& source) {
  std::vector<ItemMetadata> records;
  std::unordered_map<EntityToken, std::size_t> seen;
  std::string line;
  std::size_t line_number = 0;
  while (next_line(source, line, line_number)) {
    if (blank(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("expected movieId<TAB>director<TAB>actors, got " +
                           std::to_string(fields.size()) + " fields",
                       line_number);
    }
    auto movie_id = trim(fields[0]);
    if (movie_id.empty()) throw ParseError("empty movieId", line_number);
    ItemMetadata meta{movie_token(std::string(movie_id)), std::nullopt, {}};
    auto [it, inserted] = seen.emplace(meta.movie, line_number);
    if (!inserted) {
      throw ParseError("duplicate metadata for movie '" + meta.movie.canonical() +
                           "', first seen at line " + std::to_string(it->second),
                       line_number);
    }
    auto director = trim(fields[1]);
    if (!director.empty()) meta.director = director_token(std::string(director));
    for (auto part : split(fields[2], '|')) {
      auto name = trim(part);
      if (name.empty()) continue;
      EntityToken actor = actor_token(std::string(name));
      if (std::find(meta.actors.begin(), meta.actors.end(), actor) == meta.actors.end()) {
        meta.actors.push_back(std::move(actor));
      }
    }
    records.push_back(std::move(meta));
  }
  return records;
}

std::vector<Sentence> build_sentences(std::span<const RatingRecord> ratings,
                                      std::span<const TagRecord> tags,
                                      std::span<const ItemMetadata> metadata,
                                      int max_actors) {
  if (max_actors < 0) throw Error("max_actors must be non-negative");

  struct PairHash {
    std::size_t operator()(const std::pair<EntityToken, EntityToken>& p) const noexcept {
      std::size_t h = std::hash<EntityToken>{}(p.first);
      return h ^ (std::hash<EntityToken>{}(p.second) + 0x9e3779b97f4a7c15ull + (h << 6));
    }
  };
  std::unordered_map<std::pair<EntityToken, EntityToken>, std::set<EntityToken>, PairHash>
      tags_by_pair;
  for (const auto& t : tags) tags_by_pair[{t.user, t.movie}].insert(t.tag);

  std::unordered_map<EntityToken, const ItemMetadata*> meta_by_movie;
  for (const auto& m : metadata) meta_by_movie.emplace(m.movie, &m);

  std::vector<Sentence> sentences;
  sentences.reserve(ratings.size());
  for (const auto& r : ratings) {
    Sentence s;
    s.push_back(r.user);
    s.push_back(r.movie);
    if (auto it = tags_by_pair.find({r.user, r.movie}); it != tags_by_pair.end()) {
      s.insert(s.end(), it->second.begin(), it->second.end());  // set is canonical-sorted
    }
    if (auto it = meta_by_movie.find(r.movie); it != meta_by_movie.end()) {
      const ItemMetadata& meta = *it->second;
      if (meta.director) s.push_back(*meta.director);
      int take = std::min<int>(max_actors, static_cast<int>(meta.actors.size()));
      s.insert(s.end(), meta.actors.begin(), meta.actors.begin() + take);
    }
    sentences.push_back(std::move(s));
  }
  return sentences;
}

Vocabulary Vocabulary::build(const std::vector<Sentence>& sentences, std::int64_t min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::unordered_map<EntityToken, std::int64_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s) ++counts[t];
  }

  std::vector<std::pair<EntityToken, std::int64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) throw Error("vocabulary is empty after min_count filtering");

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.tokens_.reserve(kept.size());
  vocab.counts_.reserve(kept.size());
  for (auto& [token, count] : kept) {
    vocab.index_.emplace(token, static_cast<int>(vocab.tokens_.size()));
    vocab.tokens_.push_back(std::move(token));
    vocab.counts_.push_back(count);
    vocab.total_ += count;
  }
  return vocab;
}

int Vocabulary::index_of(const EntityToken& t) const {
  auto it = index_.find(t);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> Vocabulary::encode(const Sentence& sentence) const {
  std::vector<int> out;
  out.reserve(sentence.size());
  for (const auto& t : sentence) {
    if (int idx = index_of(t); idx >= 0) out.push_back(idx);
  }
  return out;
}

void Vocabulary::save(std::ostream& sink) const {
  for (int i = 0; i < size(); ++i) {
    sink << tokens_[i].canonical() << '\t' << counts_[i] << '\n';
  }
}

Vocabulary Vocabulary::load(std::istream& source) {
  Vocabulary vocab;
  std::string line;
  std::size_t line_number = 0;
  while (next_line(source, line, line_number)) {
    if (blank(line)) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError("expected <token><TAB><count>", line_number);
    EntityToken token = EntityToken::parse(std::string_view(line).substr(0, tab));
    std::int64_t count = parse_int(std::string_view(line).substr(tab + 1), "count", line_number);
    if (count < 1) throw ParseError("count must be >= 1", line_number);
    auto [it, inserted] = vocab.index_.emplace(token, static_cast<int>(vocab.tokens_.size()));
    if (!inserted) throw ParseError("duplicate token '" + token.canonical() + "'", line_number);
    vocab.tokens_.push_back(std::move(token));
    vocab.counts_.push_back(count);
    vocab.total_ += count;
  }
  if (vocab.tokens_.empty()) throw Error("vocabulary file is empty");
  return vocab;
}

void write_sentences(std::ostream& sink, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i > 0) sink << ' ';
      sink << s[i].canonical();
    }
    sink << '\n';
  }
}

std::vector<Sentence> read_sentences(std::istream& source) {
  std::vector<Sentence> sentences;
  std::string line;
  std::size_t line_number = 0;
  auto starts_token = [](std::string_view field) {
    return field.size() >= 3 && field[1] == ':' && kind_from_prefix(field[0]).has_value();
  };
  while (next_line(source, line, line_number)) {
    if (blank(line)) continue;
    Sentence s;
    std::string current;
    for (auto field : split(line, ' ')) {
      if (starts_token(field)) {
        if (!current.empty()) s.push_back(EntityToken::parse(current));
        current = std::string(field);
      } else if (!current.empty()) {
        current.push_back(' ');  // continuation of a token containing spaces
        current.append(field);
      } else {
        throw ParseError("sentence does not start with a canonical token", line_number);
      }
    }
    if (!current.empty()) s.push_back(EntityToken::parse(current));
    sentences.push_back(std::move(s));
  }
  return sentences;
}

}  // namespace reprrec

#include "reprrec/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "reprrec/error.hpp"
#include "reprrec/rng.hpp"

namespace reprrec {

namespace {

std::string cluster_name(const char* role, int cluster, int index) {
  return std::string(role) + " C" + std::to_string(cluster + 1) + " N" + std::to_string(index + 1);
}

std::string fmt_rating(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

constexpr double kInClusterRatings[] = {4.0, 4.5, 5.0};
constexpr double kOutClusterRatings[] = {1.0, 1.5, 2.0, 2.5};
constexpr std::int64_t kTimestampBase = 1000000000;

}  // namespace

void SynthConfig::validate() const {
  if (users < 0) throw Error("synth: users must be non-negative");
  if (movies < 0) throw Error("synth: movies must be non-negative");
  if (clusters < 1) throw Error("synth: need at least one cluster");
  if (users > 0 && movies == 0 && ratings_per_user > 0)
    throw Error("synth: cannot rate without movies");
  if (ratings_per_user < 0 || ratings_per_user > movies)
    throw Error("synth: ratings_per_user must lie in [0, movies]");
  if (in_cluster_prob < 0.0 || in_cluster_prob > 1.0)
    throw Error("synth: in_cluster_prob must lie in [0, 1]");
  if (tag_prob < 0.0 || tag_prob > 1.0) throw Error("synth: tag_prob must lie in [0, 1]");
  if (actors_per_movie < 0 || actors_per_movie > actors_per_cluster)
    throw Error("synth: actors_per_movie must lie in [0, actors_per_cluster]");
  if (directors_per_cluster < 1) throw Error("synth: need at least one director per cluster");
  if (tags_per_cluster < 1) throw Error("synth: need at least one tag per cluster");
  if (!(scale.min < scale.max)) throw Error("synth: invalid rating scale");
  for (double r : kInClusterRatings) {
    if (!scale.contains(r)) throw Error("synth: rating scale must cover 4.0..5.0");
  }
  for (double r : kOutClusterRatings) {
    if (!scale.contains(r)) throw Error("synth: rating scale must cover 1.0..2.5");
  }
}

int synth_movie_cluster(const SynthConfig& config, int movie_id) {
  return (movie_id - 1) % config.clusters;
}

Dataset generate_synthetic(const SynthConfig& config) {
  config.validate();
  Dataset data;
  data.scale = config.scale;

  Rng meta_rng(derive_seed(config.seed, "synth-meta"));
  for (int m = 1; m <= config.movies; ++m) {
    int c = synth_movie_cluster(config, m);
    int within = (m - 1) / config.clusters;
    ItemMetadata meta{movie_token(std::to_string(m)), std::nullopt, {}};
    meta.director =
        director_token(cluster_name("Director", c, within % config.directors_per_cluster));
    std::vector<int> pool(config.actors_per_cluster);
    std::iota(pool.begin(), pool.end(), 0);
    meta_rng.shuffle(pool);
    for (int a = 0; a < config.actors_per_movie; ++a) {
      meta.actors.push_back(actor_token(cluster_name("Actor", c, pool[a])));
    }
    data.metadata.push_back(std::move(meta));
  }

  std::vector<std::vector<int>> cluster_movies(config.clusters);
  for (int m = 1; m <= config.movies; ++m) {
    cluster_movies[synth_movie_cluster(config, m)].push_back(m);
  }

  std::int64_t timestamp = kTimestampBase;
  for (int u = 1; u <= config.users; ++u) {
    Rng rng(derive_seed(config.seed, "synth-user", static_cast<std::uint64_t>(u)));
    int pref = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.clusters)));

    std::vector<int> inside = cluster_movies[pref];
    std::vector<int> outside;
    for (int c = 0; c < config.clusters; ++c) {
      if (c == pref) continue;
      outside.insert(outside.end(), cluster_movies[c].begin(), cluster_movies[c].end());
    }
    rng.shuffle(inside);
    rng.shuffle(outside);

    EntityToken user = user_token(std::to_string(u));
    for (int t = 0; t < config.ratings_per_user; ++t) {
      bool want_inside = rng.next_double() < config.in_cluster_prob;
      int movie;
      if (want_inside && !inside.empty()) {
        movie = inside.back();
        inside.pop_back();
      } else if (!outside.empty()) {
        movie = outside.back();
        outside.pop_back();
      } else if (!inside.empty()) {
        movie = inside.back();
        inside.pop_back();
      } else {
        break;
      }
      bool liked = synth_movie_cluster(config, movie) == pref;
      double rating = liked ? kInClusterRatings[rng.next_below(3)]
                            : kOutClusterRatings[rng.next_below(4)];
      data.ratings.push_back(
          {user, movie_token(std::to_string(movie)), rating, timestamp++});
      if (rng.next_double() < config.tag_prob) {
        int tc = synth_movie_cluster(config, movie);
        int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.tags_per_cluster)));
        data.tags.push_back({user, movie_token(std::to_string(movie)),
                             tag_token("c" + std::to_string(tc + 1) + " mood " +
                                       std::to_string(j + 1))});
      }
    }
  }
  return data;
}

void write_ratings_csv(std::ostream& out, std::span<const RatingRecord> records) {
  out << "userId,movieId,rating,timestamp\n";
  for (const RatingRecord& r : records) {
    out << r.user.raw << ',' << r.movie.raw << ',' << fmt_rating(r.rating);
    if (r.timestamp) out << ',' << *r.timestamp;
    out << '\n';
  }
}

void write_tags_csv(std::ostream& out, std::span<const TagRecord> records) {
  out << "userId,movieId,tag\n";
  for (const TagRecord& r : records) {
    out << r.user.raw << ',' << r.movie.raw << ',' << r.tag.raw << '\n';
  }
}

void write_metadata_tsv(std::ostream& out, std::span<const ItemMetadata> records) {
  for (const ItemMetadata& m : records) {
    out << m.movie.raw << '\t' << (m.director ? m.director->raw : "") << '\t';
    for (std::size_t i = 0; i < m.actors.size(); ++i) {
      if (i) out << '|';
      out << m.actors[i].raw;
    }
    out << '\n';
  }
}

}  // namespace reprrec

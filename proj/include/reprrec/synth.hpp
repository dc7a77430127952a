#pragma once

#include <cstdint>
#include <iosfwd>

#include "reprrec/eval.hpp"

namespace reprrec {

// Planted-cluster fixture: movies belong to round-robin clusters, each user
// prefers one cluster and rates inside it high (4.0..5.0) and outside it low
// (1.0..2.5); directors, actors, and tags are drawn from per-cluster pools so
// the artificial sentences carry the cluster signal.
struct SynthConfig {
  int users = 200;
  int movies = 80;
  int clusters = 4;
  int ratings_per_user = 25;
  double in_cluster_prob = 0.8;
  double tag_prob = 0.25;
  int actors_per_movie = 3;
  int actors_per_cluster = 10;
  int directors_per_cluster = 3;
  int tags_per_cluster = 5;
  RatingScale scale;
  std::uint64_t seed = 1;

  void validate() const;
};

// movie ids are 1-based; cluster of movie id = (id - 1) % clusters
int synth_movie_cluster(const SynthConfig& config, int movie_id);

Dataset generate_synthetic(const SynthConfig& config);

// MovieLens-shaped exports consumed by parse_ratings / parse_tags / parse_metadata
void write_ratings_csv(std::ostream& out, std::span<const RatingRecord> records);
void write_tags_csv(std::ostream& out, std::span<const TagRecord> records);
void write_metadata_tsv(std::ostream& out, std::span<const ItemMetadata> records);

}  // namespace reprrec

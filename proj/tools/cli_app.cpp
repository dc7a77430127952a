#include "cli_app.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reprrec/corpus.hpp"
#include "reprrec/embedding.hpp"
#include "reprrec/embedding_io.hpp"
#include "reprrec/entity.hpp"
#include "reprrec/error.hpp"
#include "reprrec/eval.hpp"
#include "reprrec/hybrid.hpp"
#include "reprrec/log.hpp"
#include "reprrec/manifest.hpp"
#include "reprrec/ratings.hpp"
#include "reprrec/recommender.hpp"
#include "reprrec/synth.hpp"
#include "reprrec/vectorspace.hpp"

namespace reprrec::cli {

namespace {

using nlohmann::ordered_json;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <class Fn>
auto parse_file(const std::string& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

// all artifacts land atomically: write to .tmp, then rename over the target
void write_text_file(const std::string& path,
                     const std::function<void(std::ostream&)>& writer) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write '" + tmp + "'");
    writer(out);
    out.flush();
    if (!out.good()) throw Error("failed while writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

LossKind to_loss(const std::string& s) {
  if (s == "ns") return LossKind::NegativeSampling;
  if (s == "hs") return LossKind::HierarchicalSoftmax;
  if (s == "exact") return LossKind::ExactSoftmax;
  throw Error("unknown loss '" + s + "' (expected ns, hs, or exact)");
}

ModelKind to_model_kind(const std::string& s) {
  if (s == "cbow") return ModelKind::Cbow;
  if (s == "sg") return ModelKind::SkipGram;
  throw Error("unknown embedding model '" + s + "' (expected cbow or sg)");
}

std::optional<EntityKind> to_kind_filter(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "u" || s == "user") return EntityKind::User;
  if (s == "m" || s == "movie") return EntityKind::Movie;
  if (s == "d" || s == "director") return EntityKind::Director;
  if (s == "a" || s == "actor") return EntityKind::Actor;
  if (s == "t" || s == "tag") return EntityKind::Tag;
  throw Error("unknown entity type '" + s + "' (expected u, m, d, a, or t)");
}

EntityToken token_arg(const std::string& s) {
  try {
    return EntityToken::parse(s);
  } catch (const std::exception&) {
    throw Error("token '" + s + "' must be canonical, e.g. m:42 or a:Some Actor");
  }
}

Dataset load_dataset(const std::string& ratings_path, const std::string& tags_path,
                     const std::string& metadata_path, RatingScale scale) {
  Dataset d;
  d.scale = scale;
  d.ratings =
      parse_file(ratings_path, [&](std::istream& in) { return parse_ratings(in, scale); });
  if (!tags_path.empty())
    d.tags = parse_file(tags_path, [](std::istream& in) { return parse_tags(in); });
  if (!metadata_path.empty())
    d.metadata = parse_file(metadata_path, [](std::istream& in) { return parse_metadata(in); });
  return d;
}

std::vector<std::pair<EntityToken, EntityToken>> parse_pairs(std::istream& in) {
  std::vector<std::pair<EntityToken, EntityToken>> out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (ln == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (ln == 1 && line.rfind("userId", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > 4)
      throw ParseError("expected userId,movieId per line", ln);
    auto strip = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t");
      std::size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string user = strip(fields[0]), movie = strip(fields[1]);
    if (user.empty() || movie.empty()) throw ParseError("empty userId or movieId", ln);
    out.emplace_back(user_token(user), movie_token(movie));
  }
  return out;
}

RepresentationStore load_store(const std::string& path) {
  return parse_file(path, [](std::istream& in) { return load_embeddings(in); });
}

void print_neighbors(std::span<const Neighbor> neighbors, bool as_json) {
  if (as_json) {
    ordered_json arr = ordered_json::array();
    for (const Neighbor& n : neighbors) {
      arr.push_back({{"token", n.token.canonical()}, {"similarity", n.similarity}});
    }
    std::cout << arr.dump(2) << "\n";
    return;
  }
  for (const Neighbor& n : neighbors) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", n.similarity);
    std::cout << n.token.canonical() << "\t" << buf << "\n";
  }
}

// ---- synth ----------------------------------------------------------------

struct SynthOpts {
  std::string out_dir;
  SynthConfig cfg;
};

void cmd_synth(const SynthOpts& o) {
  Timer timer;
  Dataset data = generate_synthetic(o.cfg);
  std::filesystem::create_directories(o.out_dir);
  std::string ratings = o.out_dir + "/ratings.csv";
  std::string tags = o.out_dir + "/tags.csv";
  std::string metadata = o.out_dir + "/metadata.tsv";
  write_text_file(ratings, [&](std::ostream& out) { write_ratings_csv(out, data.ratings); });
  write_text_file(tags, [&](std::ostream& out) { write_tags_csv(out, data.tags); });
  write_text_file(metadata, [&](std::ostream& out) { write_metadata_tsv(out, data.metadata); });

  RunManifest man("synth", o.cfg.seed);
  man.set_config({{"users", o.cfg.users},
                  {"movies", o.cfg.movies},
                  {"clusters", o.cfg.clusters},
                  {"ratings_per_user", o.cfg.ratings_per_user},
                  {"in_cluster_prob", o.cfg.in_cluster_prob},
                  {"tag_prob", o.cfg.tag_prob},
                  {"actors_per_movie", o.cfg.actors_per_movie},
                  {"actors_per_cluster", o.cfg.actors_per_cluster},
                  {"directors_per_cluster", o.cfg.directors_per_cluster},
                  {"tags_per_cluster", o.cfg.tags_per_cluster},
                  {"scale_min", o.cfg.scale.min},
                  {"scale_max", o.cfg.scale.max}});
  man.add_output(ratings);
  man.add_output(tags);
  man.add_output(metadata);
  man.add_timing("synth", timer.seconds());
  man.write_beside(o.out_dir + "/synth");
  std::cout << "ratings: " << data.ratings.size() << "\ntags: " << data.tags.size()
            << "\nmovies: " << data.metadata.size() << "\n";
}

// ---- corpus ---------------------------------------------------------------

struct CorpusOpts {
  std::string ratings, tags, metadata, sentences_out, vocab_out;
  std::int64_t min_count = 1;
  int max_actors = 5;
  double scale_min = 0.5, scale_max = 5.0;
};

void cmd_corpus(const CorpusOpts& o) {
  Timer timer;
  Dataset data = load_dataset(o.ratings, o.tags, o.metadata, {o.scale_min, o.scale_max});
  std::vector<Sentence> sentences =
      build_sentences(data.ratings, data.tags, data.metadata, o.max_actors);
  Vocabulary vocab = Vocabulary::build(sentences, o.min_count);
  write_text_file(o.sentences_out, [&](std::ostream& out) { write_sentences(out, sentences); });
  write_text_file(o.vocab_out, [&](std::ostream& out) { vocab.save(out); });

  std::int64_t tokens = 0;
  for (const Sentence& s : sentences) tokens += static_cast<std::int64_t>(s.size());
  RunManifest man("corpus", 0);
  man.set_config({{"min_count", o.min_count},
                  {"max_actors", o.max_actors},
                  {"scale_min", o.scale_min},
                  {"scale_max", o.scale_max}});
  man.add_input(o.ratings);
  if (!o.tags.empty()) man.add_input(o.tags);
  if (!o.metadata.empty()) man.add_input(o.metadata);
  man.add_output(o.sentences_out);
  man.add_output(o.vocab_out);
  man.add_timing("corpus", timer.seconds());
  man.write_beside(o.sentences_out);
  std::cout << "sentences: " << sentences.size() << "\ntokens: " << tokens
            << "\nvocabulary: " << vocab.size() << "\n";
}

// ---- train ----------------------------------------------------------------

struct TrainOpts {
  std::string sentences, vocab, out;
  std::string model = "cbow", loss = "ns";
  int dim = 100, window = 10, epochs = 5, negatives = 5, workers = 1;
  double lr = 0.0, lr_final = 1e-4, noise_exponent = 0.75;
  bool lr_set = false;
  std::uint64_t seed = 1;
};

void cmd_train(const TrainOpts& o) {
  Timer timer;
  std::vector<Sentence> sentences =
      parse_file(o.sentences, [](std::istream& in) { return read_sentences(in); });
  Vocabulary vocab = parse_file(o.vocab, [](std::istream& in) { return Vocabulary::load(in); });

  EmbeddingConfig cfg;
  cfg.model = to_model_kind(o.model);
  cfg.loss = to_loss(o.loss);
  cfg.dim = o.dim;
  cfg.window = o.window;
  cfg.epochs = o.epochs;
  cfg.negatives = o.negatives;
  if (o.lr_set) cfg.lr_initial = o.lr;
  cfg.lr_final = o.lr_final;
  cfg.noise_exponent = o.noise_exponent;
  cfg.seed = o.seed;
  cfg.workers = o.workers;

  EmbeddingModel model = train(sentences, vocab, cfg);
  write_text_file(o.out, [&](std::ostream& out) { save_embeddings(model, out); });

  RunManifest man("train", o.seed);
  man.set_config({{"model", o.model},
                  {"loss", o.loss},
                  {"dim", o.dim},
                  {"window", o.window},
                  {"epochs", o.epochs},
                  {"negatives", o.negatives},
                  {"lr", o.lr_set ? fmt(o.lr) : "default"},
                  {"lr_final", o.lr_final},
                  {"noise_exponent", o.noise_exponent},
                  {"workers", o.workers}});
  man.add_input(o.sentences);
  man.add_input(o.vocab);
  man.add_output(o.out);
  man.add_timing("train", timer.seconds());
  man.write_beside(o.out);
  std::cout << "trained " << o.model << " on " << sentences.size() << " sentences (vocabulary "
            << vocab.size() << ", dim " << o.dim << ")\n";
}

// ---- query ----------------------------------------------------------------

struct QueryOpts {
  std::string embeddings;
  std::string token, type;
  std::vector<std::string> plus, minus;
  int k = 5;
  bool json = false;
  bool keep_operands = false;
};

void cmd_query_similar(const QueryOpts& o) {
  RepresentationStore store = load_store(o.embeddings);
  EntityToken token = token_arg(o.token);
  const StoreEntry* entry = store.find(token);
  if (!entry) throw Error("unknown token '" + token.canonical() + "'");
  if (entry->norm == 0.0) throw Error("token '" + token.canonical() + "' has a zero vector");
  print_neighbors(nearest(store, entry->vec, o.k, to_kind_filter(o.type), {token}), o.json);
}

void cmd_query_analogy(const QueryOpts& o) {
  RepresentationStore store = load_store(o.embeddings);
  ArithmeticQuery q;
  for (const std::string& s : o.plus) q.plus.push_back(token_arg(s));
  for (const std::string& s : o.minus) q.minus.push_back(token_arg(s));
  q.filter = to_kind_filter(o.type);
  q.k = o.k;
  q.exclude_operands = !o.keep_operands;
  print_neighbors(combine(q, store).neighbors, o.json);
}

// ---- predict --------------------------------------------------------------

struct PredictOpts {
  std::string ratings, pairs, out;
  std::string model, weights;
  std::string embeddings, cbow_embeddings, sg_embeddings;
  int k = 5;
  bool topk_first = false;
  double scale_min = 0.5, scale_max = 5.0;
};

struct ComponentRun {
  ModelId id;
  std::vector<Prediction> predictions;
};

void cmd_predict(const PredictOpts& o) {
  Timer timer;
  RatingScale scale{o.scale_min, o.scale_max};
  std::vector<RatingRecord> records =
      parse_file(o.ratings, [&](std::istream& in) { return parse_ratings(in, scale); });
  RatingsStore store(records, scale);
  auto pairs = parse_file(o.pairs, [](std::istream& in) { return parse_pairs(in); });

  std::optional<RepresentationStore> single_emb, cbow_emb, sg_emb;
  std::vector<ComponentRun> runs;
  HybridWeights weights;
  bool hybrid = !o.weights.empty();

  if (hybrid) {
    weights = parse_file(o.weights, [](std::istream& in) { return HybridWeights::load(in); });
    for (const std::string& name : weights.names) {
      auto id = parse_model_id(name);
      if (!id) throw Error("weights file names unknown component '" + name + "'");
      if (model_uses_embeddings(*id)) {
        bool is_cbow = model_embedding_kind(*id) == ModelKind::Cbow;
        const std::string& path = is_cbow ? o.cbow_embeddings : o.sg_embeddings;
        if (path.empty())
          throw Error(std::string("component ") + name + " needs --" +
                      (is_cbow ? "cbow" : "sg") + "-embeddings");
        auto& slot = is_cbow ? cbow_emb : sg_emb;
        if (!slot) slot = load_store(path);
      }
      runs.push_back({*id, {}});
    }
  } else {
    auto id = parse_model_id(o.model);
    if (!id)
      throw Error("unknown model '" + o.model +
                  "' (expected UBCF, IBCF, UBCB, UBSG, IBCB, or IBSG)");
    if (model_uses_embeddings(*id)) {
      if (o.embeddings.empty())
        throw Error("model " + o.model + " needs --embeddings (a trained vector file)");
      single_emb = load_store(o.embeddings);
    }
    runs.push_back({*id, {}});
  }

  for (ComponentRun& run : runs) {
    PredictorSpec spec;
    spec.target = model_target(run.id);
    spec.source = model_source(run.id);
    spec.k = o.k;
    spec.filter_first = !o.topk_first;
    if (model_uses_embeddings(run.id)) {
      if (hybrid) {
        spec.embeddings = model_embedding_kind(run.id) == ModelKind::Cbow ? &*cbow_emb : &*sg_emb;
      } else {
        spec.embeddings = &*single_emb;
      }
    }
    run.predictions = predict_batch(pairs, spec, store);
  }

  write_text_file(o.out, [&](std::ostream& out) {
    out << "userId,movieId,prediction,fallback\n";
    std::vector<double> components(runs.size());
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      double value;
      Fallback fb = runs[0].predictions[t].fallback;
      if (hybrid) {
        for (std::size_t j = 0; j < runs.size(); ++j) {
          components[j] = runs[j].predictions[t].value;
          if (runs[j].predictions[t].fallback != fb) fb = Fallback::None;
        }
        value = blend(components, weights, scale);
      } else {
        value = runs[0].predictions[t].value;
      }
      out << pairs[t].first.raw << ',' << pairs[t].second.raw << ',' << fmt(value) << ','
          << fallback_name(fb) << '\n';
    }
  });

  RunManifest man("predict", 0);
  man.set_config({{"model", hybrid ? "hybrid" : o.model},
                  {"k", o.k},
                  {"neighborhood_order", o.topk_first ? "topk-first" : "filter-first"},
                  {"scale_min", o.scale_min},
                  {"scale_max", o.scale_max}});
  man.add_input(o.ratings);
  man.add_input(o.pairs);
  if (!o.weights.empty()) man.add_input(o.weights);
  if (!o.embeddings.empty()) man.add_input(o.embeddings);
  if (!o.cbow_embeddings.empty()) man.add_input(o.cbow_embeddings);
  if (!o.sg_embeddings.empty()) man.add_input(o.sg_embeddings);
  man.add_output(o.out);
  man.add_timing("predict", timer.seconds());
  man.write_beside(o.out);
  std::cout << "predicted " << pairs.size() << " pairs\n";
}

// ---- fit-hybrid -----------------------------------------------------------

struct FitOpts {
  std::string predictions, out;
};

void cmd_fit_hybrid(const FitOpts& o) {
  Timer timer;
  // CSV whose header names the components; the last column is the true rating
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<double> truths;
  parse_file(o.predictions, [&](std::istream& in) {
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string f;
      while (std::getline(ss, f, ',')) fields.push_back(f);
      if (ln == 1) {
        if (fields.size() < 2)
          throw ParseError("header must name at least one component and the truth column", ln);
        names.assign(fields.begin(), fields.end() - 1);
        continue;
      }
      if (fields.size() != names.size() + 1)
        throw ParseError("expected " + std::to_string(names.size() + 1) + " columns", ln);
      std::vector<double> row(names.size());
      for (std::size_t i = 0; i < fields.size(); ++i) {
        std::size_t used = 0;
        double v;
        try {
          v = std::stod(fields[i], &used);
        } catch (const std::exception&) {
          throw ParseError("invalid number '" + fields[i] + "'", ln);
        }
        if (used != fields[i].size()) throw ParseError("invalid number '" + fields[i] + "'", ln);
        if (i + 1 == fields.size()) {
          truths.push_back(v);
        } else {
          row[i] = v;
        }
      }
      rows.push_back(std::move(row));
    }
    return 0;
  });
  if (names.empty()) throw Error(o.predictions + ": missing header row");

  FitResult fit = fit_weights(rows, truths, names);
  write_text_file(o.out, [&](std::ostream& out) { fit.weights.save(out); });

  RunManifest man("fit-hybrid", 0);
  man.set_config({{"components", names}});
  man.add_input(o.predictions);
  man.add_output(o.out);
  man.add_timing("fit-hybrid", timer.seconds());
  man.write_beside(o.out);
  std::cout << "tuning rmse: " << fmt(fit.rmse) << "\n";
  fit.weights.save(std::cout);
}

// ---- evaluate ---------------------------------------------------------------

struct EvalOpts {
  std::string ratings, tags, metadata, json_out;
  std::vector<std::string> models{"UBCF", "IBCF", "UBCB", "UBSG", "IBCB", "IBSG"};
  std::vector<int> ks{5, 10, 20, 50, 100};
  std::vector<int> dims{100};
  std::vector<int> epochs{5};
  int window = 10, negatives = 5, max_actors = 5, workers = 1;
  std::int64_t min_count = 1;
  std::string loss = "ns";
  std::uint64_t seed = 1;
  bool no_hybrid = false, topk_first = false;
  double scale_min = 0.5, scale_max = 5.0;
};

void cmd_evaluate(const EvalOpts& o) {
  Timer timer;
  Dataset data = load_dataset(o.ratings, o.tags, o.metadata, {o.scale_min, o.scale_max});

  EvalConfig cfg;
  cfg.models.clear();
  for (const std::string& name : o.models) {
    auto id = parse_model_id(name);
    if (!id)
      throw Error("unknown model '" + name +
                  "' (expected UBCF, IBCF, UBCB, UBSG, IBCB, or IBSG)");
    cfg.models.push_back(*id);
  }
  cfg.ks = o.ks;
  cfg.dims = o.dims;
  cfg.epoch_grid = o.epochs;
  cfg.window = o.window;
  cfg.negatives = o.negatives;
  cfg.min_count = o.min_count;
  cfg.max_actors = o.max_actors;
  cfg.loss = to_loss(o.loss);
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.include_hybrid = !o.no_hybrid;
  cfg.filter_first = !o.topk_first;

  EvalReport report = evaluate(data, cfg);
  std::cout << report.to_table();

  if (!o.json_out.empty()) {
    write_text_file(o.json_out, [&](std::ostream& out) { out << report.to_json(); });
    RunManifest man("evaluate", o.seed);
    man.set_config({{"models", o.models},
                    {"ks", o.ks},
                    {"dims", o.dims},
                    {"epochs", o.epochs},
                    {"window", o.window},
                    {"negatives", o.negatives},
                    {"min_count", o.min_count},
                    {"max_actors", o.max_actors},
                    {"loss", o.loss},
                    {"workers", o.workers},
                    {"hybrid", !o.no_hybrid},
                    {"neighborhood_order", o.topk_first ? "topk-first" : "filter-first"},
                    {"scale_min", o.scale_min},
                    {"scale_max", o.scale_max}});
    man.add_input(o.ratings);
    if (!o.tags.empty()) man.add_input(o.tags);
    if (!o.metadata.empty()) man.add_input(o.metadata);
    man.add_output(o.json_out);
    man.add_timing("evaluate", timer.seconds());
    man.write_beside(o.json_out);
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"distributed-representation recommender toolkit"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "read flags from an INI file (key = value)");
  app.require_subcommand(1);

  // synth
  auto synth = std::make_shared<SynthOpts>();
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a planted-cluster fixture");
  synth_cmd->add_option("--out-dir", synth->out_dir, "directory for ratings.csv, tags.csv, metadata.tsv")->required();
  synth_cmd->add_option("--users", synth->cfg.users, "number of users");
  synth_cmd->add_option("--movies", synth->cfg.movies, "number of movies");
  synth_cmd->add_option("--clusters", synth->cfg.clusters, "number of planted clusters");
  synth_cmd->add_option("--ratings-per-user", synth->cfg.ratings_per_user, "ratings per user");
  synth_cmd->add_option("--in-cluster-prob", synth->cfg.in_cluster_prob, "chance a rating stays in the preferred cluster");
  synth_cmd->add_option("--tag-prob", synth->cfg.tag_prob, "chance a rating event also gets a tag");
  synth_cmd->add_option("--actors-per-movie", synth->cfg.actors_per_movie, "actors listed per movie");
  synth_cmd->add_option("--actors-per-cluster", synth->cfg.actors_per_cluster, "actor pool per cluster");
  synth_cmd->add_option("--directors-per-cluster", synth->cfg.directors_per_cluster, "director pool per cluster");
  synth_cmd->add_option("--tags-per-cluster", synth->cfg.tags_per_cluster, "tag pool per cluster");
  synth_cmd->add_option("--scale-min", synth->cfg.scale.min, "rating scale lower bound");
  synth_cmd->add_option("--scale-max", synth->cfg.scale.max, "rating scale upper bound");
  synth_cmd->add_option("--seed", synth->cfg.seed, "generator seed");
  synth_cmd->callback([synth] { cmd_synth(*synth); });

  // corpus
  auto corpus = std::make_shared<CorpusOpts>();
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "build artificial sentences and a vocabulary");
  corpus_cmd->add_option("--ratings", corpus->ratings, "ratings CSV (userId,movieId,rating[,timestamp])")->required()->check(CLI::ExistingFile);
  corpus_cmd->add_option("--tags", corpus->tags, "tags CSV (userId,movieId,tag[,timestamp])")->check(CLI::ExistingFile);
  corpus_cmd->add_option("--metadata", corpus->metadata, "metadata TSV (movieId, director, actor|actor|...)")->check(CLI::ExistingFile);
  corpus_cmd->add_option("--sentences-out", corpus->sentences_out, "sentence file to write")->required();
  corpus_cmd->add_option("--vocab-out", corpus->vocab_out, "vocabulary file to write")->required();
  corpus_cmd->add_option("--min-count", corpus->min_count, "drop tokens rarer than this");
  corpus_cmd->add_option("--max-actors", corpus->max_actors, "actors kept per sentence");
  corpus_cmd->add_option("--scale-min", corpus->scale_min, "rating scale lower bound");
  corpus_cmd->add_option("--scale-max", corpus->scale_max, "rating scale upper bound");
  corpus_cmd->callback([corpus] { cmd_corpus(*corpus); });

  // train
  auto train_opts = std::make_shared<TrainOpts>();
  CLI::App* train_cmd = app.add_subcommand("train", "train embeddings on a sentence file");
  train_cmd->add_option("--sentences", train_opts->sentences, "sentence file from `corpus`")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--vocab", train_opts->vocab, "vocabulary file from `corpus`")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_opts->out, "embedding text file to write")->required();
  train_cmd->add_option("--model", train_opts->model, "cbow or sg");
  CLI::Option* loss_opt = train_cmd->add_option("--loss", train_opts->loss, "ns, hs, or exact");
  train_cmd->add_option("--dim", train_opts->dim, "representation length");
  train_cmd->add_option("--window", train_opts->window, "context window");
  train_cmd->add_option("--epochs", train_opts->epochs, "training epochs");
  CLI::Option* neg_opt = train_cmd->add_option("--negatives", train_opts->negatives, "negative samples per position (ns only)");
  CLI::Option* lr_opt = train_cmd->add_option("--lr", train_opts->lr, "initial learning rate");
  train_cmd->add_option("--lr-final", train_opts->lr_final, "final learning rate");
  train_cmd->add_option("--noise-exponent", train_opts->noise_exponent, "unigram distortion power");
  train_cmd->add_option("--seed", train_opts->seed, "training seed");
  train_cmd->add_option("--workers", train_opts->workers, "training threads (1 = deterministic)");
  train_cmd->callback([train_opts, loss_opt, neg_opt, lr_opt] {
    train_opts->lr_set = lr_opt->count() > 0;
    if (neg_opt->count() > 0 && train_opts->loss != "ns")
      throw CLI::ValidationError("--negatives only applies to --loss ns");
    (void)loss_opt;
    cmd_train(*train_opts);
  });

  // query
  auto query = std::make_shared<QueryOpts>();
  CLI::App* query_cmd = app.add_subcommand("query", "similarity and analogy queries");
  query_cmd->add_option("--embeddings", query->embeddings, "embedding text file")->required()->check(CLI::ExistingFile);
  query_cmd->require_subcommand(1);
  CLI::App* similar_cmd = query_cmd->add_subcommand("similar", "nearest neighbors of a token");
  similar_cmd->add_option("token", query->token, "canonical token, e.g. m:42")->required();
  similar_cmd->add_option("--k", query->k, "neighbors to print");
  similar_cmd->add_option("--type", query->type, "restrict results to u|m|d|a|t");
  similar_cmd->add_flag("--json", query->json, "print JSON instead of a table");
  similar_cmd->callback([query] { cmd_query_similar(*query); });
  CLI::App* analogy_cmd = query_cmd->add_subcommand("analogy", "vector arithmetic query");
  analogy_cmd->add_option("--plus", query->plus, "token added to the query (repeatable)")->required();
  analogy_cmd->add_option("--minus", query->minus, "token subtracted from the query (repeatable)");
  analogy_cmd->add_option("--k", query->k, "neighbors to print");
  analogy_cmd->add_option("--type", query->type, "restrict results to u|m|d|a|t");
  analogy_cmd->add_flag("--keep-operands", query->keep_operands, "allow operands in the results");
  analogy_cmd->add_flag("--json", query->json, "print JSON instead of a table");
  analogy_cmd->callback([query] { cmd_query_analogy(*query); });

  // predict
  auto predict = std::make_shared<PredictOpts>();
  CLI::App* predict_cmd = app.add_subcommand("predict", "batch rating prediction");
  predict_cmd->add_option("--ratings", predict->ratings, "training ratings CSV")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--pairs", predict->pairs, "CSV of userId,movieId pairs to score")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict->out, "prediction CSV to write")->required();
  CLI::Option* model_opt = predict_cmd->add_option("--model", predict->model, "UBCF, IBCF, UBCB, UBSG, IBCB, or IBSG");
  CLI::Option* weights_opt = predict_cmd->add_option("--weights", predict->weights, "hybrid weights file (NAME = value lines)")->check(CLI::ExistingFile);
  model_opt->excludes(weights_opt);
  weights_opt->excludes(model_opt);
  predict_cmd->add_option("--embeddings", predict->embeddings, "vector file for a single embedding model")->check(CLI::ExistingFile);
  predict_cmd->add_option("--cbow-embeddings", predict->cbow_embeddings, "vector file for UBCB/IBCB components")->check(CLI::ExistingFile);
  predict_cmd->add_option("--sg-embeddings", predict->sg_embeddings, "vector file for UBSG/IBSG components")->check(CLI::ExistingFile);
  predict_cmd->add_option("--k", predict->k, "neighborhood size");
  predict_cmd->add_flag("--topk-first", predict->topk_first, "rank neighbors before filtering to qualifiers");
  predict_cmd->add_option("--scale-min", predict->scale_min, "rating scale lower bound");
  predict_cmd->add_option("--scale-max", predict->scale_max, "rating scale upper bound");
  predict_cmd->callback([predict, model_opt, weights_opt] {
    if (model_opt->count() == 0 && weights_opt->count() == 0)
      throw CLI::ValidationError("predict needs --model or --weights");
    cmd_predict(*predict);
  });

  // fit-hybrid
  auto fit = std::make_shared<FitOpts>();
  CLI::App* fit_cmd = app.add_subcommand("fit-hybrid", "fit blend weights from a prediction CSV");
  fit_cmd->add_option("--predictions", fit->predictions, "CSV: header names components, last column is the true rating")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit->out, "weights file to write")->required();
  fit_cmd->callback([fit] { cmd_fit_hybrid(*fit); });

  // evaluate
  auto eval_opts = std::make_shared<EvalOpts>();
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "run the tuning + cross-validation protocol");
  eval_cmd->add_option("--ratings", eval_opts->ratings, "ratings CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--tags", eval_opts->tags, "tags CSV")->check(CLI::ExistingFile);
  eval_cmd->add_option("--metadata", eval_opts->metadata, "metadata TSV")->check(CLI::ExistingFile);
  eval_cmd->add_option("--models", eval_opts->models, "comma-separated model list")->delimiter(',');
  eval_cmd->add_option("--ks", eval_opts->ks, "neighborhood sizes to sweep")->delimiter(',');
  eval_cmd->add_option("--dims", eval_opts->dims, "representation lengths to tune over")->delimiter(',');
  eval_cmd->add_option("--epochs", eval_opts->epochs, "epoch counts to tune over")->delimiter(',');
  eval_cmd->add_option("--window", eval_opts->window, "context window");
  eval_cmd->add_option("--negatives", eval_opts->negatives, "negative samples per position");
  eval_cmd->add_option("--min-count", eval_opts->min_count, "vocabulary count floor");
  eval_cmd->add_option("--max-actors", eval_opts->max_actors, "actors kept per sentence");
  eval_cmd->add_option("--loss", eval_opts->loss, "ns, hs, or exact");
  eval_cmd->add_option("--seed", eval_opts->seed, "protocol seed");
  eval_cmd->add_option("--workers", eval_opts->workers, "training threads (1 = deterministic)");
  eval_cmd->add_flag("--no-hybrid", eval_opts->no_hybrid, "skip hybrid weight fitting");
  eval_cmd->add_flag("--topk-first", eval_opts->topk_first, "rank neighbors before filtering to qualifiers");
  eval_cmd->add_option("--json-out", eval_opts->json_out, "write the report as JSON here");
  eval_cmd->add_option("--scale-min", eval_opts->scale_min, "rating scale lower bound");
  eval_cmd->add_option("--scale-max", eval_opts->scale_max, "rating scale upper bound");
  eval_cmd->callback([eval_opts] { cmd_evaluate(*eval_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace reprrec::cli

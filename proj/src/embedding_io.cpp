#include "reprrec/embedding_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace reprrec {

namespace {

// Canonical tokens may contain spaces; the file format is space-delimited, so
// the token field percent-encodes ' ' and '%'. Every row is then exactly
// 1 + R fields, which keeps shape violations detectable.
std::string escape_token(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == ' ') {
      out += "%20";
    } else if (c == '%') {
      out += "%25";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape_token(std::string_view field, std::size_t line_number) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '%') {
      out += field[i];
      continue;
    }
    if (i + 2 < field.size() && field[i + 1] == '2' && field[i + 2] == '0') {
      out += ' ';
      i += 2;
    } else if (i + 2 < field.size() && field[i + 1] == '2' && field[i + 2] == '5') {
      out += '%';
      i += 2;
    } else {
      throw ParseError("embeddings: bad token escape in '" + std::string(field) + "'",
                       line_number);
    }
  }
  return out;
}

void write_row(std::ostream& sink, const std::string& token, std::span<const double> vec) {
  sink << escape_token(token);
  char buf[40];
  for (double x : vec) {
    std::snprintf(buf, sizeof(buf), " %.12g", x);
    sink << buf;
  }
  sink << '\n';
}

}  // namespace

void save_embeddings(const EmbeddingModel& model, std::ostream& sink) {
  sink << model.vocab_size() << ' ' << model.dim << '\n';
  for (int i = 0; i < model.vocab_size(); ++i) {
    write_row(sink, model.vocab.token(i).canonical(), model.input_row(i));
  }
}

void save_embeddings(const RepresentationStore& store, std::ostream& sink) {
  sink << store.size() << ' ' << store.dim() << '\n';
  for (const auto& e : store.entries()) write_row(sink, e.token.canonical(), e.vec);
}

RepresentationStore load_embeddings(std::istream& source) {
  std::string line;
  std::size_t line_number = 0;
  if (!std::getline(source, line)) throw Error("embeddings: empty stream");
  ++line_number;

  std::int64_t v = 0;
  int dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> v >> dim) || v < 1 || dim < 1) {
      throw ParseError("embeddings: header must be '<V> <R>' with positive values", line_number);
    }
    std::string extra;
    if (header >> extra) throw ParseError("embeddings: trailing data in header", line_number);
  }

  RepresentationStore store(dim);
  while (std::getline(source, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size()) break;
      std::size_t begin = i;
      while (i < line.size() && line[i] != ' ') ++i;
      fields.emplace_back(line.data() + begin, i - begin);
    }
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw ParseError("embeddings: expected a token plus " + std::to_string(dim) +
                           " components, got " + std::to_string(fields.size()) + " fields",
                       line_number);
    }
    std::vector<double> vec(dim);
    for (int c = 0; c < dim; ++c) {
      std::string_view f = fields[c + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[c]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("embeddings: invalid component '" + std::string(f) + "'", line_number);
      }
    }
    EntityToken token;
    try {
      token = EntityToken::parse(unescape_token(fields[0], line_number));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(std::string("embeddings: ") + e.what(), line_number);
    }
    try {
      store.add(std::move(token), std::move(vec));
    } catch (const Error& e) {
      throw ParseError(std::string("embeddings: ") + e.what(), line_number);
    }
  }
  if (store.size() != v) {
    throw Error("embeddings: header declares " + std::to_string(v) + " rows, file has " +
                std::to_string(store.size()));
  }
  return store;
}

RepresentationStore store_from_model(const EmbeddingModel& model) {
  RepresentationStore store(model.dim);
  for (int i = 0; i < model.vocab_size(); ++i) {
    auto row = model.input_row(i);
    store.add(model.vocab.token(i), std::vector<double>(row.begin(), row.end()));
  }
  return store;
}

}  // namespace reprrec

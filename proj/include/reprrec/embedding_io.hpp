#pragma once

#include <iosfwd>

#include "reprrec/embedding.hpp"
#include "reprrec/vectorspace.hpp"

namespace reprrec {

// word2vec text format: header "V R", then one "<canonical-token> v1 ... vR"
// line per token. Input vectors only; 12 significant digits.
void save_embeddings(const EmbeddingModel& model, std::ostream& sink);
void save_embeddings(const RepresentationStore& store, std::ostream& sink);

// Canonical tokens may contain spaces, so the token field percent-encodes
// ' ' and '%'; every row is exactly 1 + R fields. A single-token store loads
// fine (query-only use); duplicates and shape mismatches throw.
RepresentationStore load_embeddings(std::istream& source);

// in-memory view of the trained input vectors, no file round trip
RepresentationStore store_from_model(const EmbeddingModel& model);

}  // namespace reprrec

#include <algorithm>
#include <queue>

#include "reprrec/embedding.hpp"

namespace reprrec {

namespace {

struct BuildNode {
  std::int64_t weight;
  int lowest_leaf;  // smallest vocabulary index under this node
  int id;           // leaves: [0, V); internal: V + internal id
};

struct NodeOrder {
  bool operator()(const BuildNode& a, const BuildNode& b) const {
    // min-heap: lighter first, equal weights prefer the lower leaf index
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.lowest_leaf > b.lowest_leaf;
  }
};

}  // namespace

HuffmanTree::HuffmanTree(const std::vector<std::int64_t>& counts) : counts_(counts) {
  const int v = static_cast<int>(counts.size());
  if (v < 2) throw Error("Huffman tree needs at least 2 tokens");
  for (std::int64_t c : counts) {
    if (c < 1) throw Error("Huffman tree counts must be positive");
  }
  internal_count_ = v - 1;

  std::priority_queue<BuildNode, std::vector<BuildNode>, NodeOrder> heap;
  for (int i = 0; i < v; ++i) heap.push({counts[i], i, i});

  // parent link and branch bit for every node except the root
  std::vector<std::int32_t> parent(static_cast<std::size_t>(v) + internal_count_, -1);
  std::vector<std::uint8_t> branch(parent.size(), 0);

  for (int next = 0; next < internal_count_; ++next) {
    BuildNode a = heap.top();
    heap.pop();
    BuildNode b = heap.top();
    heap.pop();
    int id = v + next;
    parent[a.id] = id;
    branch[a.id] = 0;  // first-popped child takes bit 0
    parent[b.id] = id;
    branch[b.id] = 1;
    heap.push({a.weight + b.weight, std::min(a.lowest_leaf, b.lowest_leaf), id});
  }

  offsets_.assign(static_cast<std::size_t>(v) + 1, 0);
  std::vector<std::int32_t> rev_path;
  std::vector<std::uint8_t> rev_code;
  for (int leaf = 0; leaf < v; ++leaf) {
    rev_path.clear();
    rev_code.clear();
    for (int node = leaf; parent[node] >= 0; node = parent[node]) {
      rev_code.push_back(branch[node]);
      rev_path.push_back(parent[node] - v);  // internal id
    }
    offsets_[leaf + 1] = offsets_[leaf] + rev_path.size();
    for (std::size_t i = rev_path.size(); i-- > 0;) {
      paths_.push_back(rev_path[i]);
      codes_.push_back(rev_code[i]);
    }
  }
}

std::span<const std::int32_t> HuffmanTree::path(int token) const {
  return {paths_.data() + offsets_[token], offsets_[token + 1] - offsets_[token]};
}

std::span<const std::uint8_t> HuffmanTree::code(int token) const {
  return {codes_.data() + offsets_[token], offsets_[token + 1] - offsets_[token]};
}

std::int64_t HuffmanTree::total_code_length() const {
  std::int64_t total = 0;
  for (int i = 0; i < leaf_count(); ++i) {
    total += counts_[i] * static_cast<std::int64_t>(code(i).size());
  }
  return total;
}

}  // namespace reprrec

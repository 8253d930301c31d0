#pragma once

#include <algorithm>
#include <memory>
#include <vector>

#include "hsp/prefix.hpp"

namespace hsp {

/// Per-family binary radix trie mapping prefixes to payload identifiers.
/// Single-writer construction, then concurrent read-only queries.
template <class Payload>
class PrefixTrie {
 public:
  struct Hit {
    Prefix prefix;
    const std::vector<Payload>* payloads;
  };

  void insert(const Prefix& p, Payload payload) {
    Node* node = &root(p.family);
    for (int i = 0; i < p.length; ++i) {
      auto& child = node->child[bit_at(p.bits, i) ? 1 : 0];
      if (!child) child = std::make_unique<Node>();
      node = child.get();
    }
    node->present = true;
    node->prefix = p;
    node->payloads.push_back(std::move(payload));
    ++size_;
  }

  const std::vector<Payload>* find(const Prefix& p) const {
    const Node* node = descend(p);
    return node && node->present ? &node->payloads : nullptr;
  }

  /// All inserted prefixes covering p (p itself included), most specific first.
  std::vector<Hit> covering(const Prefix& p) const {
    std::vector<Hit> out;
    const Node* node = &root(p.family);
    if (node->present) out.push_back({node->prefix, &node->payloads});
    for (int i = 0; i < p.length && node; ++i) {
      node = node->child[bit_at(p.bits, i) ? 1 : 0].get();
      if (node && node->present) out.push_back({node->prefix, &node->payloads});
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  /// All inserted prefixes that p covers (p itself included), address order.
  std::vector<Hit> covered(const Prefix& p) const {
    std::vector<Hit> out;
    const Node* node = descend(p);
    if (node) collect(node, out);
    return out;
  }

  std::size_t size() const { return size_; }

 private:
  struct Node {
    std::unique_ptr<Node> child[2];
    bool present = false;
    Prefix prefix;
    std::vector<Payload> payloads;
  };

  Node& root(Family f) { return f == Family::v4 ? root4_ : root6_; }
  const Node& root(Family f) const { return f == Family::v4 ? root4_ : root6_; }

  const Node* descend(const Prefix& p) const {
    const Node* node = &root(p.family);
    for (int i = 0; i < p.length && node; ++i)
      node = node->child[bit_at(p.bits, i) ? 1 : 0].get();
    return node;
  }

  static void collect(const Node* node, std::vector<Hit>& out) {
    if (node->present) out.push_back({node->prefix, &node->payloads});
    if (node->child[0]) collect(node->child[0].get(), out);
    if (node->child[1]) collect(node->child[1].get(), out);
  }

  Node root4_;
  Node root6_;
  std::size_t size_ = 0;
};

}  // namespace hsp

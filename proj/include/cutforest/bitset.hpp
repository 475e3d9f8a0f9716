#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace cutforest {

// Fixed-universe dynamic bitset.  All cut algebra runs on these; the
// universe size is the vertex count of the graph the set lives on.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  static Bitset full(std::size_t n) {
    Bitset b(n);
    for (std::size_t i = 0; i < b.words_.size(); ++i) b.words_[i] = ~0ull;
    b.trim();
    return b;
  }

  std::size_t size() const { return size_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set(std::size_t i, bool v = true) {
    if (v)
      words_[i >> 6] |= (1ull << (i & 63));
    else
      words_[i >> 6] &= ~(1ull << (i & 63));
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  Bitset operator&(const Bitset& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a & b; }); }
  Bitset operator|(const Bitset& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a | b; }); }
  Bitset operator^(const Bitset& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a ^ b; }); }
  Bitset operator~() const {
    Bitset r(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    r.trim();
    return r;
  }

  bool operator==(const Bitset& o) const { return size_ == o.size_ && words_ == o.words_; }
  bool operator!=(const Bitset& o) const { return !(*this == o); }

  // Deterministic total order (numeric value, vertex 0 = least significant).
  bool operator<(const Bitset& o) const {
    if (size_ != o.size_) return size_ < o.size_;
    for (std::size_t i = words_.size(); i-- > 0;)
      if (words_[i] != o.words_[i]) return words_[i] < o.words_[i];
    return false;
  }

  bool is_subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  std::vector<std::size_t> bits() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      uint64_t w = words_[i];
      while (w) {
        out.push_back(64 * i + std::countr_zero(w));
        w &= w - 1;
      }
    }
    return out;
  }

  std::size_t hash() const {
    std::size_t h = size_;
    for (auto w : words_) h = h * 1099511628211ull + w;
    return h;
  }

 private:
  template <class F>
  Bitset zip(const Bitset& o, F f) const {
    Bitset r(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = f(words_[i], o.words_[i]);
    return r;
  }

  void trim() {
    if (size_ & 63) words_.back() &= (1ull << (size_ & 63)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<uint64_t> words_;
};

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

}  // namespace cutforest

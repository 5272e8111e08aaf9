#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "grg/errors.hpp"

namespace grg {

/// Dynamic fixed-size bitset tuned for adjacency rows: popcount-heavy set
/// algebra on 64-bit words. Size is fixed at construction.
class DynBitset {
 public:
  DynBitset() = default;
  explicit DynBitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }

  void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }
  bool test(std::size_t i) const {
    return (w_[i >> 6] >> (i & 63)) & 1;
  }

  void clear() { for (auto& w : w_) w = 0; }

  void set_all() {
    for (auto& w : w_) w = ~std::uint64_t{0};
    trim();
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
  }

  bool any() const {
    for (auto w : w_) if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  DynBitset& operator&=(const DynBitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  DynBitset& operator|=(const DynBitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  DynBitset& operator^=(const DynBitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  /// this &= ~o
  DynBitset& subtract(const DynBitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }

  friend DynBitset operator&(DynBitset a, const DynBitset& b) { return a &= b; }
  friend DynBitset operator|(DynBitset a, const DynBitset& b) { return a |= b; }

  bool operator==(const DynBitset& o) const {
    return n_ == o.n_ && w_ == o.w_;
  }

  std::size_t count_and(const DynBitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i)
      c += std::popcount(w_[i] & o.w_[i]);
    return c;
  }

  bool intersects(const DynBitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }

  bool is_subset_of(const DynBitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }

  /// First set bit at or after `from`, or size() if none.
  std::size_t find_next(std::size_t from) const {
    if (from >= n_) return n_;
    std::size_t wi = from >> 6;
    std::uint64_t w = w_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (w) return (wi << 6) + std::countr_zero(w);
      if (++wi == w_.size()) return n_;
      w = w_[wi];
    }
  }
  std::size_t find_first() const { return find_next(0); }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      std::uint64_t w = w_[wi];
      while (w) {
        f((wi << 6) + std::countr_zero(w));
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> to_indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

 private:
  void trim() {
    if (n_ & 63) w_.back() &= (~std::uint64_t{0} >> (64 - (n_ & 63)));
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

}  // namespace grg

#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace scdt {

using LevelId = int;

// Hard limit on levels per categorical variable. Sets are stored as 64-bit masks.
inline constexpr int kMaxLevels = 64;

// A subset of level ids, always sorted and deduplicated by construction.
class LevelSet {
 public:
  constexpr LevelSet() = default;
  constexpr explicit LevelSet(std::uint64_t bits) : bits_(bits) {}
  LevelSet(std::initializer_list<LevelId> ids);

  static LevelSet from_ids(const std::vector<LevelId>& ids);
  static constexpr LevelSet full(int m) {
    return LevelSet(m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1);
  }
  static constexpr LevelSet single(LevelId v) { return LevelSet(std::uint64_t{1} << v); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(LevelId v) const { return v >= 0 && v < 64 && ((bits_ >> v) & 1U); }
  constexpr LevelId min() const { return std::countr_zero(bits_); }
  constexpr LevelId max() const { return 63 - std::countl_zero(bits_); }

  constexpr bool is_subset_of(LevelSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(LevelSet other) const { return (bits_ & other.bits_) != 0; }

  constexpr LevelSet operator|(LevelSet o) const { return LevelSet(bits_ | o.bits_); }
  constexpr LevelSet operator&(LevelSet o) const { return LevelSet(bits_ & o.bits_); }
  constexpr LevelSet operator-(LevelSet o) const { return LevelSet(bits_ & ~o.bits_); }
  constexpr LevelSet& operator|=(LevelSet o) { bits_ |= o.bits_; return *this; }
  constexpr LevelSet& operator&=(LevelSet o) { bits_ &= o.bits_; return *this; }

  std::vector<LevelId> ids() const;
  std::string to_string() const;

  template <typename F>
  void for_each(F&& f) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) f(static_cast<LevelId>(std::countr_zero(b)));
  }

  // Lexicographic order of the sorted id lists.
  friend bool lex_less(LevelSet a, LevelSet b);

  friend constexpr bool operator==(LevelSet, LevelSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

bool lex_less(LevelSet a, LevelSet b);

// Maps a mask over local ids 0..k-1 onto the positions of the set bits of `frame`.
LevelSet expand_into(LevelSet local, LevelSet frame);
// Inverse of expand_into: position of each member of `global` among the bits of `frame`.
LevelSet compress_from(LevelSet global, LevelSet frame);

}  // namespace scdt

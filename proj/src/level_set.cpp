#include "scdt/level_set.hpp"

#include "scdt/error.hpp"

namespace scdt {

namespace {

std::uint64_t bit_for(LevelId v) {
  if (v < 0 || v >= kMaxLevels) {
    throw Error(ErrorCode::OutOfRangeId, "level id " + std::to_string(v) + " outside [0, 64)");
  }
  return std::uint64_t{1} << v;
}

}  // namespace

LevelSet::LevelSet(std::initializer_list<LevelId> ids) {
  for (LevelId v : ids) bits_ |= bit_for(v);
}

LevelSet LevelSet::from_ids(const std::vector<LevelId>& ids) {
  std::uint64_t bits = 0;
  for (LevelId v : ids) bits |= bit_for(v);
  return LevelSet(bits);
}

std::vector<LevelId> LevelSet::ids() const {
  std::vector<LevelId> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](LevelId v) { out.push_back(v); });
  return out;
}

std::string LevelSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for_each([&](LevelId v) {
    if (!first) s += ",";
    s += std::to_string(v);
    first = false;
  });
  return s + "}";
}

bool lex_less(LevelSet a, LevelSet b) {
  const std::uint64_t diff = a.bits_ ^ b.bits_;
  if (diff == 0) return false;
  const int low = std::countr_zero(diff);
  const std::uint64_t at_or_above = ~std::uint64_t{0} << low;
  // Both share every element below `low`. Whoever holds `low` is smaller,
  // unless the other list ends there (then the other is a proper prefix).
  if ((a.bits_ >> low) & 1U) {
    return (b.bits_ & at_or_above) != 0;
  }
  return (a.bits_ & at_or_above) == 0;
}

LevelSet expand_into(LevelSet local, LevelSet frame) {
  std::uint64_t out = 0;
  int pos = 0;
  frame.for_each([&](LevelId v) {
    if (local.contains(pos)) out |= std::uint64_t{1} << v;
    ++pos;
  });
  return LevelSet(out);
}

LevelSet compress_from(LevelSet global, LevelSet frame) {
  std::uint64_t out = 0;
  int pos = 0;
  frame.for_each([&](LevelId v) {
    if (global.contains(v)) out |= std::uint64_t{1} << pos;
    ++pos;
  });
  return LevelSet(out);
}

}  // namespace scdt

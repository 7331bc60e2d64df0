#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wii {

inline constexpr int kNumClasses = 15;

// Class indices 0-9 are IEEE 802.15.1 channels, 10-12 IEEE 802.11 b/g
// channels, 13-14 IEEE 802.15.4 channels.
enum class Technology { kBt15_1, kWlan11bg, kZb15_4 };

inline Technology technology_of(int class_id) {
  if (class_id < 0 || class_id >= kNumClasses)
    throw std::invalid_argument("class id out of range: " + std::to_string(class_id));
  if (class_id <= 9) return Technology::kBt15_1;
  if (class_id <= 12) return Technology::kWlan11bg;
  return Technology::kZb15_4;
}

inline const char* technology_name(Technology t) {
  switch (t) {
    case Technology::kBt15_1: return "802.15.1";
    case Technology::kWlan11bg: return "802.11bg";
    case Technology::kZb15_4: return "802.15.4";
  }
  return "?";
}

inline std::vector<int> classes_of(Technology t) {
  switch (t) {
    case Technology::kBt15_1: return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    case Technology::kWlan11bg: return {10, 11, 12};
    case Technology::kZb15_4: return {13, 14};
  }
  return {};
}

// Multi-label target: a subset of the 15 class identifiers as a bitmask.
class LabelSet {
 public:
  LabelSet() = default;
  static LabelSet from_bits(std::uint16_t bits) {
    if (bits >= (1u << kNumClasses))
      throw std::invalid_argument("label bitmask has bits beyond class 14");
    LabelSet s;
    s.bits_ = bits;
    return s;
  }
  static LabelSet single(int class_id) {
    LabelSet s;
    s.insert(class_id);
    return s;
  }

  void insert(int class_id) {
    if (class_id < 0 || class_id >= kNumClasses)
      throw std::invalid_argument("class id out of range: " + std::to_string(class_id));
    bits_ |= static_cast<std::uint16_t>(1u << class_id);
  }

  bool contains(int class_id) const {
    return class_id >= 0 && class_id < kNumClasses &&
           (bits_ & (1u << class_id)) != 0;
  }

  int count() const { return __builtin_popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint16_t bits() const { return bits_; }

  std::vector<int> ids() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (int c = 0; c < kNumClasses; ++c)
      if (contains(c)) out.push_back(c);
    return out;
  }

  LabelSet united(const LabelSet& other) const {
    LabelSet s;
    s.bits_ = bits_ | other.bits_;
    return s;
  }

  bool operator==(const LabelSet& other) const = default;

 private:
  std::uint16_t bits_ = 0;
};

}  // namespace wii

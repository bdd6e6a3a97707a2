#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace rahp::core {

/// Seeded generator with platform-independent draws. std::mt19937_64 output
/// is fully specified; the standard distributions are not, so the mapping to
/// uniform values and indices is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  /// Uniform on {0, ..., bound - 1}.
  std::size_t index(std::size_t bound) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * bound) >> 64);
  }

  template <typename Item>
  void shuffle(std::vector<Item>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      using std::swap;
      swap(items[i - 1], items[index(i)]);
    }
  }

  /// Independent child stream, e.g. one per epoch.
  Rng fork() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rahp::core

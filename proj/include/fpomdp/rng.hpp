#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace fpomdp {

/// SplitMix64 finalizer. Used to derive independent seeds from labels.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a sequence of labels.
/// The result depends only on the arguments, never on call order elsewhere.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> labels) noexcept {
  std::uint64_t h = mix64(parent);
  for (std::uint64_t label : labels) {
    h = mix64(h ^ mix64(label + 0x632be59bd9b4e019ULL));
  }
  return h;
}

// Stream labels. Kept stable so that golden outputs do not move.
namespace stream_label {
inline constexpr std::uint64_t kEpisode = 0x45504953ULL;      // "EPIS"
inline constexpr std::uint64_t kDecision = 0x44454349ULL;     // "DECI"
inline constexpr std::uint64_t kObservations = 0x4f425356ULL; // "OBSV"
inline constexpr std::uint64_t kChild = 0x4348494cULL;        // "CHIL"
inline constexpr std::uint64_t kHistory = 0x48495354ULL;      // "HIST"
inline constexpr std::uint64_t kGenerator = 0x47454e52ULL;    // "GENR"
inline constexpr std::uint64_t kMeasureL1 = 0x4d4c3145ULL;    // "ML1E"
inline constexpr std::uint64_t kMeasureKl = 0x4d4b4c45ULL;    // "MKLE"
inline constexpr std::uint64_t kDrift = 0x44524654ULL;        // "DRFT"
inline constexpr std::uint64_t kPlanner = 0x504c414eULL;      // "PLAN"
inline constexpr std::uint64_t kCheck = 0x43484b53ULL;        // "CHKS"
}  // namespace stream_label

/// A seeded random stream. Sampling is done from the raw 64-bit engine
/// output so results are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Draws an index from a discrete distribution (weights need not be normalized).
  std::size_t categorical(std::span<const double> weights);

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fpomdp

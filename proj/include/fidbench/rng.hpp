#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

#include "fidbench/qmat.hpp"

namespace fidbench {

/// PCG-XSL-RR 128/64 engine with a selectable stream. Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class Pcg64 {
 public:
  using result_type = std::uint64_t;

  Pcg64(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  void step();

  unsigned __int128 state_ = 0;
  unsigned __int128 increment_ = 1;
};

/// A reproducible random stream identified by (seed, stream id). Identical
/// pairs yield identical sample sequences; distinct stream ids are independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// A new stream derived from this one's identity (not its current position).
  RngStream substream(std::uint64_t id) const;

  double uniform();                 // [0, 1)
  double normal();                  // N(0, 1)
  double gamma(double shape);       // Gamma(shape, 1)
  Complex complex_normal();         // E|z|^2 = 1
  std::size_t index(std::size_t n); // uniform on [0, n)
  /// Draws index j with probability weights[j] / sum(weights).
  std::size_t categorical(std::span<const double> weights);

  Pcg64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  Pcg64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fidbench

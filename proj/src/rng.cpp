#include "fidbench/rng.hpp"

#include <cmath>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr unsigned __int128 kMultiplier =
    (static_cast<unsigned __int128>(0x2360ed051fc65da4ULL) << 64) | 0x4385df649fccf645ULL;

}  // namespace

Pcg64::Pcg64(std::uint64_t seed, std::uint64_t stream) {
  unsigned __int128 inc = (static_cast<unsigned __int128>(splitmix64(stream)) << 64) | stream;
  increment_ = (inc << 1) | 1u;
  unsigned __int128 init = (static_cast<unsigned __int128>(seed) << 64) | splitmix64(seed);
  state_ = 0;
  step();
  state_ += init;
  step();
}

void Pcg64::step() { state_ = state_ * kMultiplier + increment_; }

Pcg64::result_type Pcg64::operator()() {
  step();
  auto hi = static_cast<std::uint64_t>(state_ >> 64);
  auto lo = static_cast<std::uint64_t>(state_);
  std::uint64_t x = hi ^ lo;
  unsigned rot = static_cast<unsigned>(state_ >> 122);
  return (x >> rot) | (x << ((64u - rot) & 63u));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(seed, stream) {}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, splitmix64(stream_ ^ splitmix64(id + 0x51ed27)));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

Complex RngStream::complex_normal() {
  constexpr double kScale = 0.70710678118654752440;
  double re = normal();
  double im = normal();
  return {re * kScale, im * kScale};
}

std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw InvalidArgument("index(0) has no valid outcome");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

std::size_t RngStream::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw InvalidArgument("categorical draw needs positive total weight");
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    if (u < acc) return j;
  }
  // Rounding can leave u == total; return the last positive entry.
  for (std::size_t j = weights.size(); j-- > 0;) {
    if (weights[j] > 0.0) return j;
  }
  return weights.size() - 1;
}

}  // namespace fidbench

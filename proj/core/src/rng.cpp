#include "rislab/rng.hpp"

#include <cmath>
#include <numbers>

namespace rislab {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SeededRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::index(std::size_t n) {
  if (n == 0) throw DomainError("SeededRng::index: empty range");
  // Lemire's multiply-shift with rejection for an unbiased draw.
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    __extension__ using u128 = unsigned __int128;
    const u128 m = static_cast<u128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::size_t>(m >> 64);
    }
  }
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

SeededRng SeededRng::fork(std::uint64_t stream) const {
  return SeededRng(mix64(seed_ ^ mix64(stream + 0x632BE59BD9B4E019ULL)));
}

CVector sample_cn(SeededRng& rng, double variance, std::size_t n) {
  if (!(variance >= 0.0)) throw DomainError("sample_cn: negative variance");
  CVector out(n, cdouble{0.0, 0.0});
  if (variance == 0.0) return out;
  const double sd = std::sqrt(variance / 2.0);
  for (auto& x : out) {
    const double re = rng.normal();
    const double im = rng.normal();
    x = cdouble{sd * re, sd * im};
  }
  return out;
}

}  // namespace rislab

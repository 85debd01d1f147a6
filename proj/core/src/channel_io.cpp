#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rislab/environment.hpp"

// Text layout:
//   rislab-channels 1
//   dims K L M
//   H      <L*M complex entries, row-major>
//   h <k>  <L entries>            (k = 0..K-1)
//   E <k>  <L*M entries>          (k = 0..K-1)
// Each complex entry is written as "re im" with 17 significant digits, so a
// round trip is exact. Cascaded and estimated channels are rebuilt on load.

namespace rislab {

namespace {

constexpr const char* kMagic = "rislab-channels";
constexpr int kVersion = 1;

void write_entries(std::ostream& out, std::span<const cdouble> xs) {
  char buf[96];
  for (const auto& x : xs) {
    std::snprintf(buf, sizeof buf, " %.17g %.17g", x.real(), x.imag());
    out << buf;
  }
  out << '\n';
}

void read_entries(std::istream& in, std::span<cdouble> xs) {
  for (auto& x : xs) {
    std::string re;
    std::string im;
    in >> re >> im;
    if (!in) throw std::runtime_error("read_channels: truncated data");
    x = cdouble{std::stod(re), std::stod(im)};
  }
}

void expect(std::istream& in, const std::string& tag) {
  std::string got;
  in >> got;
  if (got != tag) throw std::runtime_error("read_channels: expected '" + tag + "', got '" + got + "'");
}

}  // namespace

void write_channels(std::ostream& out, const ChannelSet& ch) {
  const std::size_t K = ch.ris_user.size();
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims " << K << ' ' << ch.bs_ris.rows() << ' ' << ch.bs_ris.cols() << '\n';
  out << "H";
  write_entries(out, ch.bs_ris.data());
  for (std::size_t k = 0; k < K; ++k) {
    out << "h " << k;
    write_entries(out, ch.ris_user[k]);
  }
  for (std::size_t k = 0; k < K; ++k) {
    out << "E " << k;
    write_entries(out, ch.errors[k].data());
  }
}

ChannelSet read_channels(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (!in || magic != kMagic) throw std::runtime_error("read_channels: not a channel file");
  if (version != kVersion) {
    throw std::runtime_error("read_channels: unsupported version " + std::to_string(version));
  }
  expect(in, "dims");
  std::size_t K = 0, L = 0, M = 0;
  in >> K >> L >> M;
  if (!in || K == 0 || L == 0 || M == 0) throw std::runtime_error("read_channels: bad dims");

  ChannelSet ch;
  ch.bs_ris = CMatrix(L, M);
  expect(in, "H");
  read_entries(in, ch.bs_ris.data());
  for (std::size_t k = 0; k < K; ++k) {
    expect(in, "h");
    std::size_t idx = 0;
    in >> idx;
    if (idx != k) throw std::runtime_error("read_channels: users out of order");
    CVector h(L);
    read_entries(in, h);
    ch.ris_user.push_back(std::move(h));
  }
  for (std::size_t k = 0; k < K; ++k) {
    expect(in, "E");
    std::size_t idx = 0;
    in >> idx;
    if (idx != k) throw std::runtime_error("read_channels: users out of order");
    CMatrix e(L, M);
    read_entries(in, e.data());
    ch.errors.push_back(std::move(e));
  }
  assemble_cascaded(ch);
  return ch;
}

}  // namespace rislab

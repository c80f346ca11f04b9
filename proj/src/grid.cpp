#include "spikes/grid.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "spikes/errors.hpp"
#include "spikes/io.hpp"

namespace spikes {

Grid make_grid(double L, int n) {
  require(L > 0.0, ErrorKind::BadConfig, "grid half-width must be positive");
  require(n >= 3 && n % 2 == 1, ErrorKind::BadConfig, "grid needs odd n >= 3");
  return Grid{L, n};
}

GridField zero_field(const Grid& g) {
  GridField f;
  f.g = g;
  f.v = Eigen::VectorXd::Zero(static_cast<long>(g.n) * g.n);
  return f;
}

void save_field_csv(const GridField& f, const std::string& path) {
  std::string out = "x,y,value\n";
  out.reserve(f.v.size() * 24);
  for (int i = 0; i < f.g.n; ++i)
    for (int j = 0; j < f.g.n; ++j)
      out += fmt_g17(f.g.x(i)) + "," + fmt_g17(f.g.y(j)) + "," + fmt_g17(f.at(i, j)) + "\n";
  atomic_write(path, out);
}

namespace {
static_assert(sizeof(double) == 8, "binary dump assumes 8-byte doubles");

bool little_endian() {
  const uint16_t probe = 1;
  uint8_t b;
  std::memcpy(&b, &probe, 1);
  return b == 1;
}
}  // namespace

void save_field_binary(const GridField& f, const std::string& path) {
  require(little_endian(), ErrorKind::BadConfig, "binary dump requires a little-endian host");
  std::string out;
  out.resize(4 + 8 + static_cast<size_t>(f.v.size()) * 8);
  const int32_t n = f.g.n;
  std::memcpy(out.data(), &n, 4);
  std::memcpy(out.data() + 4, &f.g.L, 8);
  std::memcpy(out.data() + 12, f.v.data(), static_cast<size_t>(f.v.size()) * 8);
  atomic_write(path, out);
}

GridField load_field_binary(const std::string& path) {
  require(little_endian(), ErrorKind::BadConfig, "binary dump requires a little-endian host");
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::BadConfig, "cannot read field dump " + path);
  int32_t n = 0;
  double L = 0.0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&L), 8);
  require(in.good() && n >= 3, ErrorKind::BadConfig, "corrupt field dump header");
  GridField f = zero_field(make_grid(L, n));
  in.read(reinterpret_cast<char*>(f.v.data()), static_cast<std::streamsize>(f.v.size()) * 8);
  require(in.good(), ErrorKind::BadConfig, "truncated field dump");
  return f;
}

}  // namespace spikes

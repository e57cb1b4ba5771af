#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ppl/error.hpp"
#include "ppl/grid.hpp"

namespace ppl {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

void read_exact(std::istream& in, unsigned char* buf, std::size_t n) {
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) fail(ErrorCode::Io, "truncated field cache");
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  read_exact(in, b, 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  read_exact(in, b, 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return std::bit_cast<double>(v);
}

}  // namespace

void save_field(std::ostream& out, const ScalarField& field) {
  const GridDomain& g = field.domain();
  if (g.any_periodic()) fail(ErrorCode::Io, "periodic lattices have no cache representation");
  out.write("PPL1", 4);
  const unsigned char dim = static_cast<unsigned char>(g.dim());
  out.write(reinterpret_cast<const char*>(&dim), 1);
  for (int a = 0; a < g.real_dim(); ++a) put_u32(out, static_cast<std::uint32_t>(g.count(a)));
  put_f64(out, g.spacing());
  for (int a = 0; a < g.real_dim(); ++a) {
    put_f64(out, g.lo(a));
    put_f64(out, g.hi(a));
  }
  for (NodeClass c : g.mask()) {
    unsigned char b = static_cast<unsigned char>(c);
    out.write(reinterpret_cast<const char*>(&b), 1);
  }
  for (double v : field.values()) put_f64(out, v);
  if (!out) fail(ErrorCode::Io, "write failed");
}

void save_field(const std::string& path, const ScalarField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  save_field(out, field);
}

ScalarField load_field(std::istream& in) {
  unsigned char magic[4];
  read_exact(in, magic, 4);
  if (std::memcmp(magic, "PPL1", 4) != 0) fail(ErrorCode::Io, "bad magic in field cache");
  unsigned char dim;
  read_exact(in, &dim, 1);
  if (dim != 1 && dim != 2) fail(ErrorCode::Io, "bad dimension byte in field cache");
  const int d = 2 * dim;
  std::vector<int> counts(d);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    std::uint32_t c = get_u32(in);
    if (c < 3 || c > (1u << 24)) fail(ErrorCode::Io, "implausible node count in field cache");
    counts[a] = static_cast<int>(c);
    total *= c;
  }
  if (total > (std::size_t{1} << 31)) fail(ErrorCode::Io, "field cache too large");
  double h = get_f64(in);
  std::vector<double> lo(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = get_f64(in);
    (void)get_f64(in);
  }
  std::vector<NodeClass> mask(total);
  for (auto& m : mask) {
    unsigned char b;
    read_exact(in, &b, 1);
    if (b > 3) fail(ErrorCode::Io, "bad mask byte in field cache");
    m = static_cast<NodeClass>(b);
  }
  std::vector<double> values(total);
  for (auto& v : values) v = get_f64(in);
  auto dom = std::make_shared<const GridDomain>(dim, lo, counts, h, std::move(mask));
  return ScalarField(std::move(dom), std::move(values));
}

ScalarField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return load_field(in);
}

}  // namespace ppl

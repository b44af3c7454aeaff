#include "ends/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

namespace ends {
namespace {

constexpr std::uint32_t kTensorVersion = 1;

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("tensor file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("tensor file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_solution_csv(const std::string& path, const TensorGrid& grid,
                        const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != grid.node_count())
    throw IoError("csv export: field size does not match the grid");
  std::string out;
  out.reserve(grid.node_count() * 32);
  const bool torus = grid.cross.dimension() == 2;
  out += torus ? "omega_u,omega_v,r,u\n" : "theta,r,u\n";
  for (int j1 = 0; j1 < grid.m1; ++j1) {
    for (int j0 = 0; j0 < grid.m0; ++j0) {
      const Omega w = grid.omega(j0, j1);
      for (std::size_t k = 0; k < grid.r.size(); ++k) {
        append_number(out, w.w0);
        out += ',';
        if (torus) {
          append_number(out, w.w1);
          out += ',';
        }
        append_number(out, grid.r[k]);
        out += ',';
        append_number(out, u[static_cast<Eigen::Index>(grid.index(j0, j1, k))]);
        out += '\n';
      }
    }
  }
  write_text_file(path, out);
}

void write_tensor(const std::string& path, const std::vector<std::uint64_t>& dims,
                  const double* data, std::size_t count) {
  std::uint64_t expect = 1;
  for (const auto d : dims) expect *= d;
  if (expect != count) throw IoError("tensor export: dims do not match payload");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write("ENDS", 4);
  put_u32(os, kTensorVersion);
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  for (const auto d : dims) put_u64(os, d);
  for (std::size_t i = 0; i < count; ++i) put_f64(os, data[i]);
  if (!os) throw IoError("short write: " + path);
}

void write_solution_tensor(const std::string& path, const TensorGrid& grid,
                           const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != grid.node_count())
    throw IoError("tensor export: field size does not match the grid");
  std::vector<std::uint64_t> dims;
  if (grid.cross.dimension() == 2) dims.push_back(static_cast<std::uint64_t>(grid.m1));
  dims.push_back(static_cast<std::uint64_t>(grid.m0));
  dims.push_back(static_cast<std::uint64_t>(grid.r.size()));
  write_tensor(path, dims, u.data(), static_cast<std::size_t>(u.size()));
}

TensorFile read_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "ENDS", 4) != 0)
    throw IoError("not a tensor file (bad magic): " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kTensorVersion)
    throw IoError("unsupported tensor version " + std::to_string(version));
  const std::uint32_t rank = get_u32(is);
  if (rank == 0 || rank > 8) throw IoError("implausible tensor rank");
  TensorFile t;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims.push_back(get_u64(is));
    count *= t.dims.back();
  }
  if (count > (1ull << 32)) throw IoError("implausible tensor size");
  t.data.resize(count);
  for (auto& v : t.data) v = std::bit_cast<double>(get_u64(is));
  return t;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("short write: " + path);
}

}  // namespace ends

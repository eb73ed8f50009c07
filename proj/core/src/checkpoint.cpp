#include "tvdiff/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tvdiff::checkpoint {

namespace {

constexpr char kMagic[4] = {'T', 'V', 'D', 'F'};

// All integers and doubles are written little-endian. We assume a
// little-endian host (asserted at build time below); the format is defined
// independently of the host so big-endian support could be added by swapping.
static_assert(std::endian::native == std::endian::little,
              "checkpoint i/o assumes a little-endian host");

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_mat(std::ostream& os, const Mat& m) {
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double)) * m.size());
}

std::uint32_t read_u32(std::istream& is, const std::string& path) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw std::runtime_error("truncated checkpoint: " + path);
  return v;
}
std::uint64_t read_u64(std::istream& is, const std::string& path) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw std::runtime_error("truncated checkpoint: " + path);
  return v;
}
void read_mat(std::istream& is, Mat& m, const std::string& path) {
  if (!is.read(reinterpret_cast<char*>(m.data()),
               static_cast<std::streamsize>(sizeof(double)) * m.size()))
    throw std::runtime_error("truncated checkpoint payload: " + path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, std::uint32_t expect_kind) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  const std::uint32_t version = read_u32(is, path);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version) + ": " + path);
  const std::uint32_t kind = read_u32(is, path);
  if (kind != expect_kind)
    throw std::runtime_error("checkpoint kind mismatch in " + path +
                             " (found " + std::to_string(kind) + ", expected " +
                             std::to_string(expect_kind) + ")");
  return is;
}

void expect_eof(std::istream& is, const std::string& path) {
  char c;
  if (is.read(&c, 1))
    throw std::runtime_error("trailing bytes after checkpoint payload: " + path);
}

void write_header(std::ostream& os, std::uint32_t kind, std::uint64_t m,
                  std::uint64_t n, std::uint64_t T, std::uint64_t d) {
  os.write(kMagic, 4);
  write_u32(os, kFormatVersion);
  write_u32(os, kind);
  write_u64(os, m);
  write_u64(os, n);
  write_u64(os, T);
  write_u64(os, d);
}

}  // namespace

void save_denoiser(const std::string& path, const denoiser::DenoiserParams& p) {
  std::ofstream os = open_out(path);
  write_header(os, kKindDenoiser, static_cast<std::uint64_t>(p.m),
               static_cast<std::uint64_t>(p.n), static_cast<std::uint64_t>(p.T),
               static_cast<std::uint64_t>(p.d));
  write_mat(os, p.W_I);
  write_mat(os, p.W_U);
  write_mat(os, p.E_time);
  if (!os) throw std::runtime_error("write failed for checkpoint: " + path);
}

denoiser::DenoiserParams load_denoiser(const std::string& path) {
  std::ifstream is = open_in(path, kKindDenoiser);
  denoiser::DenoiserParams p;
  p.m = static_cast<Index>(read_u64(is, path));
  p.n = static_cast<Index>(read_u64(is, path));
  p.T = static_cast<int>(read_u64(is, path));
  p.d = static_cast<Index>(read_u64(is, path));
  if (p.m < 1 || p.n < 1 || p.T < 1 || p.d < 1)
    throw std::runtime_error("invalid checkpoint dimensions: " + path);
  p.W_I.resize(p.n, p.d);
  p.W_U.resize(p.m, p.d);
  p.E_time.resize(p.T + 1, p.d);
  read_mat(is, p.W_I, path);
  read_mat(is, p.W_U, path);
  read_mat(is, p.E_time, path);
  expect_eof(is, path);
  return p;
}

void save_bpr_mf(const std::string& path, const baselines::MFParams& p) {
  std::ofstream os = open_out(path);
  write_header(os, kKindBprMf, static_cast<std::uint64_t>(p.E_U.rows()),
               static_cast<std::uint64_t>(p.E_I.rows()), 0,
               static_cast<std::uint64_t>(p.E_U.cols()));
  write_mat(os, p.E_U);
  write_mat(os, p.E_I);
  if (!os) throw std::runtime_error("write failed for checkpoint: " + path);
}

baselines::MFParams load_bpr_mf(const std::string& path) {
  std::ifstream is = open_in(path, kKindBprMf);
  const auto m = static_cast<Index>(read_u64(is, path));
  const auto n = static_cast<Index>(read_u64(is, path));
  const auto T = read_u64(is, path);
  const auto d = static_cast<Index>(read_u64(is, path));
  if (m < 1 || n < 1 || d < 1 || T != 0)
    throw std::runtime_error("invalid checkpoint dimensions: " + path);
  baselines::MFParams p;
  p.E_U.resize(m, d);
  p.E_I.resize(n, d);
  read_mat(is, p.E_U, path);
  read_mat(is, p.E_I, path);
  expect_eof(is, path);
  return p;
}

std::uint32_t peek_kind(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  read_u32(is, path);  // version
  return read_u32(is, path);
}

}  // namespace tvdiff::checkpoint

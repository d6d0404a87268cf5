#include "steach/common/binary_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "steach/common/error.hpp"

namespace steach::io {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  out.write(bytes, sizeof(T));
}

}  // namespace

void BinaryWriter::u32(std::uint32_t v) { put_le(out_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(out_, v); }
void BinaryWriter::i64(std::int64_t v) { put_le(out_, static_cast<std::uint64_t>(v)); }
void BinaryWriter::f64(double v) { put_le(out_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::vec(const Eigen::VectorXd& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
}

void BinaryWriter::mat(const Eigen::MatrixXd& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
}

void BinaryWriter::tag(const char (&magic)[9]) { out_.write(magic, 8); }

void BinaryReader::read_bytes(char* dst, std::size_t n) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) throw IoError("unexpected end of checkpoint data");
}

std::uint32_t BinaryReader::u32() {
  unsigned char b[4];
  read_bytes(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t BinaryReader::u64() {
  unsigned char b[8];
  read_bytes(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::int64_t BinaryReader::i64() { return static_cast<std::int64_t>(u64()); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const auto n = u64();
  if (n > (1ULL << 32)) throw IoError("implausible string length in checkpoint");
  std::string s(n, '\0');
  if (n > 0) read_bytes(s.data(), n);
  return s;
}

Eigen::VectorXd BinaryReader::vec() {
  const auto n = u64();
  if (n > (1ULL << 34)) throw IoError("implausible vector length in checkpoint");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
  return v;
}

Eigen::MatrixXd BinaryReader::mat() {
  const auto rows = u64();
  const auto cols = u64();
  if (rows * cols > (1ULL << 34)) throw IoError("implausible matrix size in checkpoint");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = f64();
  return m;
}

void BinaryReader::expect_tag(const char (&magic)[9]) {
  char got[8];
  read_bytes(got, 8);
  if (std::memcmp(got, magic, 8) != 0) {
    throw IoError("checkpoint tag mismatch: expected '" + std::string(magic, 8) + "'");
  }
}

}  // namespace steach::io

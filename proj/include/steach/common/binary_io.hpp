#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace steach::io {

// Little-endian fixed-width records. Doubles are stored as their IEEE-754 bit
// pattern so a write/read cycle is bit-exact.

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void str(const std::string& s);
  void vec(const Eigen::VectorXd& v);
  void mat(const Eigen::MatrixXd& m);
  void tag(const char (&magic)[9]);

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::string str();
  Eigen::VectorXd vec();
  Eigen::MatrixXd mat();
  /// Reads 8 bytes and throws IoError unless they equal `magic`.
  void expect_tag(const char (&magic)[9]);

 private:
  void read_bytes(char* dst, std::size_t n);
  std::istream& in_;
};

}  // namespace steach::io

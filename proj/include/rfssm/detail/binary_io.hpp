#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "rfssm/errors.hpp"

// Little-endian raw binary primitives for checkpoint files. x86-only concerns
// aside, the format is versioned by the enclosing checkpoint header.

namespace rfssm::detail {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("checkpoint: unexpected end of stream");
  return value;
}

inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_pod<std::int64_t>(out, m.rows());
  write_pod<std::int64_t>(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

inline Eigen::MatrixXd read_matrix(std::istream& in) {
  const auto rows = read_pod<std::int64_t>(in);
  const auto cols = read_pod<std::int64_t>(in);
  if (rows < 0 || cols < 0) throw IoError("checkpoint: bad matrix header");
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw IoError("checkpoint: truncated matrix");
  return m;
}

inline void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_pod<std::int64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * v.size()));
}

inline Eigen::VectorXd read_vector(std::istream& in) {
  const auto n = read_pod<std::int64_t>(in);
  if (n < 0) throw IoError("checkpoint: bad vector header");
  Eigen::VectorXd v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!in) throw IoError("checkpoint: truncated vector");
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  const auto n = read_pod<std::uint64_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw IoError("checkpoint: truncated string");
  return s;
}

inline void write_int_vector(std::ostream& out, const std::vector<int>& v) {
  write_pod<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(int) * v.size()));
}

inline std::vector<int> read_int_vector(std::istream& in) {
  const auto n = read_pod<std::uint64_t>(in);
  std::vector<int> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(int) * n));
  if (!in) throw IoError("checkpoint: truncated int vector");
  return v;
}

}  // namespace rfssm::detail

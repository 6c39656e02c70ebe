#ifndef OPINF_IO_HPP
#define OPINF_IO_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "opinf/error.hpp"

//
// Binary matrix files ("OIMX"):
//
//   offset  size  field
//   0       4     magic "OIMX"
//   4       4     version, uint32 LE (= 1)
//   8       1     dtype, uint8 (1 = IEEE-754 binary64)
//   9       1     order, uint8 (0 = row-major)
//   10      8     rows, uint64 LE
//   18      8     cols, uint64 LE
//   26      8*rows*cols  payload, binary64 LE, row-major
//
namespace opinf::io
{

using Eigen::Index;
using Eigen::MatrixXd;

inline constexpr std::array<char, 4> kMagic = {'O', 'I', 'M', 'X'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint8_t kDtypeFloat64 = 1;
inline constexpr std::uint8_t kOrderRowMajor = 0;
inline constexpr std::size_t kHeaderSize = 26;

namespace detail
{

template <typename T>
void put_le(std::vector<unsigned char> &buf, T value)
{
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
  {
    std::reverse(bytes, bytes + sizeof(T));
  }
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get_le(const unsigned char *p)
{
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
  {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline std::vector<unsigned char> encode_matrix(const Eigen::Ref<const MatrixXd> &M)
{
  std::vector<unsigned char> buf;
  buf.reserve(kHeaderSize + static_cast<std::size_t>(M.size()) * 8);
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  detail::put_le(buf, kVersion);
  detail::put_le(buf, kDtypeFloat64);
  detail::put_le(buf, kOrderRowMajor);
  detail::put_le(buf, static_cast<std::uint64_t>(M.rows()));
  detail::put_le(buf, static_cast<std::uint64_t>(M.cols()));
  for (Index i = 0; i < M.rows(); i++)
  {
    for (Index j = 0; j < M.cols(); j++)
    {
      detail::put_le(buf, M(i, j));
    }
  }
  return buf;
}

inline MatrixXd decode_matrix(const std::vector<unsigned char> &buf, const std::string &origin = "<buffer>")
{
  if (buf.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), buf.begin()))
  {
    throw IoError(origin + ": not a matrix file (bad magic)");
  }
  const auto *p = buf.data();
  const auto version = detail::get_le<std::uint32_t>(p + 4);
  if (version != kVersion)
  {
    throw IoError(origin + ": unsupported matrix file version " + std::to_string(version));
  }
  if (p[8] != kDtypeFloat64)
  {
    throw IoError(origin + ": unsupported dtype " + std::to_string(p[8]));
  }
  if (p[9] != kOrderRowMajor)
  {
    throw IoError(origin + ": unsupported storage order " + std::to_string(p[9]));
  }
  const auto rows = detail::get_le<std::uint64_t>(p + 10);
  const auto cols = detail::get_le<std::uint64_t>(p + 18);
  const std::uint64_t payload = buf.size() - kHeaderSize;
  if ((rows != 0 && cols > payload / 8 / rows) || payload != rows * cols * 8)
  {
    throw IoError(origin + ": payload is " + std::to_string(buf.size() - kHeaderSize) +
                  " bytes, header declares " + std::to_string(rows) + " x " + std::to_string(cols));
  }
  MatrixXd M(static_cast<Index>(rows), static_cast<Index>(cols));
  const unsigned char *q = p + kHeaderSize;
  for (Index i = 0; i < M.rows(); i++)
  {
    for (Index j = 0; j < M.cols(); j++, q += 8)
    {
      M(i, j) = detail::get_le<double>(q);
    }
  }
  return M;
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path &path, const std::vector<unsigned char> &bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
  {
    throw IoError("short write to '" + path.string() + "'");
  }
}

inline MatrixXd read_matrix(const std::filesystem::path &path)
{
  return decode_matrix(read_bytes(path), path.string());
}

inline void write_matrix(const std::filesystem::path &path, const Eigen::Ref<const MatrixXd> &M)
{
  write_bytes(path, encode_matrix(M));
}

// Whitespace-separated text: "rows cols" followed by rows*cols values in row-major order.
inline MatrixXd parse_text_matrix(const std::string &text, const std::string &origin = "<text>")
{
  std::istringstream in(text);
  long long rows = -1;
  long long cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
  {
    throw IoError(origin + ": expected header 'rows cols'");
  }
  MatrixXd M(rows, cols);
  for (Index i = 0; i < M.rows(); i++)
  {
    for (Index j = 0; j < M.cols(); j++)
    {
      if (!(in >> M(i, j)))
      {
        throw IoError(origin + ": expected " + std::to_string(rows * cols) + " values");
      }
    }
  }
  std::string extra;
  if (in >> extra)
  {
    throw IoError(origin + ": trailing data after " + std::to_string(rows * cols) + " values");
  }
  return M;
}

inline MatrixXd read_text_matrix(const std::filesystem::path &path)
{
  const auto bytes = read_bytes(path);
  return parse_text_matrix(std::string(bytes.begin(), bytes.end()), path.string());
}

// Binary if the file starts with the magic, text otherwise.
inline MatrixXd load_matrix(const std::filesystem::path &path)
{
  const auto bytes = read_bytes(path);
  if (bytes.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
  {
    return decode_matrix(bytes, path.string());
  }
  return parse_text_matrix(std::string(bytes.begin(), bytes.end()), path.string());
}

}  // namespace opinf::io

#endif  // OPINF_IO_HPP

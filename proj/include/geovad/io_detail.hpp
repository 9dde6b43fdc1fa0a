#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "geovad/errors.hpp"
#include "geovad/types.hpp"

// Little-endian primitives shared by the binary file formats. The build
// targets little-endian hosts; mixed-endian support is out of scope.

namespace geovad::io_detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts unsupported");

inline void write_magic(std::ostream& out, const char magic[5]) { out.write(magic, 4); }

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_f32(std::ostream& out, float v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

// Row-major f32 dump of a double matrix (f32 on disk, f64 in computation).
inline void write_f32_matrix(std::ostream& out, const MatX& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) write_f32(out, static_cast<float>(m(i, j)));
}

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  void expect_magic(const char magic[5]) {
    char buf[4];
    read_raw(buf, 4);
    if (std::memcmp(buf, magic, 4) != 0)
      throw BadMagicError(path_ + ": bad magic, expected " + std::string(magic, 4));
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    read_raw(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }

  double f64() {
    double v = 0;
    read_raw(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }

  float f32() {
    float v = 0;
    read_raw(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }

  // Reads rows*cols f32 values into a double matrix, rejecting non-finite
  // payloads with the byte offset of the offending value.
  MatX f32_matrix(Index rows, Index cols) {
    MatX m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        const std::size_t value_offset = offset_;
        const float v = f32();
        if (!std::isfinite(v))
          throw NonFiniteValueError(path_ + ": non-finite value at byte offset " +
                                    std::to_string(value_offset));
        m(i, j) = static_cast<double>(v);
      }
    }
    return m;
  }

  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    read_raw(s.data(), n);
    return s;
  }

  std::size_t offset() const { return offset_; }

 private:
  void read_raw(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw TruncatedFileError(path_ + ": truncated at byte offset " + std::to_string(offset_));
    offset_ += n;
  }

  std::istream& in_;
  std::string path_;
  std::size_t offset_ = 0;
};

}  // namespace geovad::io_detail

#pragma once
// Minimal NPY v1.0 codec for the three dtypes this project exchanges:
// little-endian float64 ('<f8'), little-endian int64 ('<i8') and bool
// ('|b1').  Arrays are always C-order.  The writer is bit-exact: a given
// array always serializes to the same bytes, with the v1.0 header padded
// with spaces so the data section starts on a 64-byte boundary.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cedu/types.hpp"

namespace cedu {

enum class NpyDtype { f8, i8, b1 };

inline std::size_t npy_element_size(NpyDtype d) {
  return d == NpyDtype::b1 ? 1 : 8;
}

struct NpyArray {
  NpyDtype dtype = NpyDtype::f8;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> data;  // raw little-endian C-order payload

  std::size_t element_count() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
  }

  static NpyArray from_doubles(std::vector<std::size_t> shape,
                               const std::vector<double>& values);
  static NpyArray from_int64(std::vector<std::size_t> shape,
                             const std::vector<std::int64_t>& values);
  static NpyArray from_bools(std::vector<std::size_t> shape,
                             const std::vector<std::uint8_t>& values);

  // Typed accessors; each throws ValidationError if the dtype differs.
  std::vector<double> as_doubles() const;
  std::vector<std::int64_t> as_int64() const;
  std::vector<std::uint8_t> as_bools() const;
};

// Serializes to the full .npy byte stream (header + payload).
std::vector<std::uint8_t> write_npy(const NpyArray& array);

// Parses a .npy byte stream.  Throws ValidationError with a message
// prefixed by one of NPY_MAGIC / NPY_DTYPE / NPY_FORTRAN / NPY_TRUNCATED
// when the stream is malformed.
NpyArray read_npy(const std::vector<std::uint8_t>& bytes);

void save_npy(const std::filesystem::path& path, const NpyArray& array);
NpyArray load_npy(const std::filesystem::path& path);

// Reads a whole file into memory (shared by the npy and zip loaders).
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& bytes);

}  // namespace cedu

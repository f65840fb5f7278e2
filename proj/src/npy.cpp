#include "cedu/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "the npy codec assumes a little-endian host");

namespace cedu {
namespace {

constexpr char kMagic[] = "\x93NUMPY";

const char* dtype_token(NpyDtype d) {
  switch (d) {
    case NpyDtype::f8: return "<f8";
    case NpyDtype::i8: return "<i8";
    case NpyDtype::b1: return "|b1";
  }
  return "";
}

std::string shape_token(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (i + 1 < shape.size() || shape.size() == 1) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  s += ")";
  return s;
}

template <typename T>
std::vector<std::uint8_t> pack(const std::vector<T>& values) {
  std::vector<std::uint8_t> out(values.size() * sizeof(T));
  if (!values.empty()) std::memcpy(out.data(), values.data(), out.size());
  return out;
}

template <typename T>
std::vector<T> unpack(const std::vector<std::uint8_t>& data) {
  std::vector<T> out(data.size() / sizeof(T));
  if (!out.empty()) std::memcpy(out.data(), data.data(), data.size());
  return out;
}

void check_payload(const NpyArray& a) {
  if (a.data.size() != a.element_count() * npy_element_size(a.dtype))
    throw ValidationError("npy: payload size does not match shape");
}

}  // namespace

NpyArray NpyArray::from_doubles(std::vector<std::size_t> shape,
                                const std::vector<double>& values) {
  NpyArray a{NpyDtype::f8, std::move(shape), pack(values)};
  check_payload(a);
  return a;
}

NpyArray NpyArray::from_int64(std::vector<std::size_t> shape,
                              const std::vector<std::int64_t>& values) {
  NpyArray a{NpyDtype::i8, std::move(shape), pack(values)};
  check_payload(a);
  return a;
}

NpyArray NpyArray::from_bools(std::vector<std::size_t> shape,
                              const std::vector<std::uint8_t>& values) {
  for (std::uint8_t v : values)
    if (v > 1) throw ValidationError("npy: bool values must be 0 or 1");
  NpyArray a{NpyDtype::b1, std::move(shape), values};
  check_payload(a);
  return a;
}

std::vector<double> NpyArray::as_doubles() const {
  if (dtype != NpyDtype::f8) throw ValidationError("npy: array is not float64");
  return unpack<double>(data);
}

std::vector<std::int64_t> NpyArray::as_int64() const {
  if (dtype != NpyDtype::i8) throw ValidationError("npy: array is not int64");
  return unpack<std::int64_t>(data);
}

std::vector<std::uint8_t> NpyArray::as_bools() const {
  if (dtype != NpyDtype::b1) throw ValidationError("npy: array is not bool");
  return data;
}

std::vector<std::uint8_t> write_npy(const NpyArray& array) {
  check_payload(array);
  std::string header = "{'descr': '";
  header += dtype_token(array.dtype);
  header += "', 'fortran_order': False, 'shape': ";
  header += shape_token(array.shape);
  header += ", }";
  // Pad with spaces so that (magic + version + length field + header)
  // is a multiple of 64 bytes, ending in a newline.
  std::size_t preamble = 6 + 2 + 2 + header.size() + 1;
  std::size_t padded = (preamble + 63) / 64 * 64;
  header.append(padded - preamble, ' ');
  header += '\n';
  if (header.size() > 0xffff) throw ValidationError("npy: header too long for v1.0");

  std::vector<std::uint8_t> out;
  out.reserve(10 + header.size() + array.data.size());
  out.insert(out.end(), kMagic, kMagic + 6);
  out.push_back(0x01);
  out.push_back(0x00);
  const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<std::uint8_t>(hlen & 0xff));
  out.push_back(static_cast<std::uint8_t>(hlen >> 8));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), array.data.begin(), array.data.end());
  return out;
}

namespace {

// Extracts the python-literal value following `key` in the header dict.
std::string dict_value(const std::string& header, const std::string& key) {
  std::size_t pos = header.find("'" + key + "'");
  if (pos == std::string::npos)
    throw ValidationError("NPY_MAGIC: header missing key '" + key + "'");
  pos = header.find(':', pos);
  if (pos == std::string::npos) throw ValidationError("NPY_MAGIC: malformed header");
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  std::size_t end = pos;
  if (pos < header.size() && header[pos] == '\'') {
    end = header.find('\'', pos + 1);
    if (end == std::string::npos) throw ValidationError("NPY_MAGIC: malformed header");
    return header.substr(pos + 1, end - pos - 1);
  }
  if (pos < header.size() && header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) throw ValidationError("NPY_MAGIC: malformed header");
    return header.substr(pos, end - pos + 1);
  }
  while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  return header.substr(pos, end - pos);
}

std::vector<std::size_t> parse_shape(const std::string& token) {
  if (token.size() < 2 || token.front() != '(' || token.back() != ')')
    throw ValidationError("NPY_MAGIC: malformed shape");
  std::vector<std::size_t> shape;
  std::string body = token.substr(1, token.size() - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == ',')) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = pos;
    while (end < body.size() && body[end] >= '0' && body[end] <= '9') ++end;
    if (end == pos) throw ValidationError("NPY_MAGIC: malformed shape");
    shape.push_back(static_cast<std::size_t>(std::stoull(body.substr(pos, end - pos))));
    pos = end;
  }
  return shape;
}

}  // namespace

NpyArray read_npy(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0)
    throw ValidationError("NPY_MAGIC: not an npy stream");
  if (bytes[6] != 0x01)
    throw ValidationError("NPY_MAGIC: unsupported npy version");
  const std::size_t hlen = static_cast<std::size_t>(bytes[8]) |
                           (static_cast<std::size_t>(bytes[9]) << 8);
  if (bytes.size() < 10 + hlen)
    throw ValidationError("NPY_TRUNCATED: header extends past end of stream");
  const std::string header(bytes.begin() + 10, bytes.begin() + 10 + hlen);

  const std::string descr = dict_value(header, "descr");
  NpyDtype dtype;
  if (descr == "<f8") dtype = NpyDtype::f8;
  else if (descr == "<i8") dtype = NpyDtype::i8;
  else if (descr == "|b1") dtype = NpyDtype::b1;
  else throw ValidationError("NPY_DTYPE: unsupported dtype '" + descr + "'");

  const std::string order = dict_value(header, "fortran_order");
  if (order == "True") throw ValidationError("NPY_FORTRAN: fortran-order arrays are not supported");
  if (order != "False") throw ValidationError("NPY_MAGIC: malformed fortran_order");

  NpyArray out;
  out.dtype = dtype;
  out.shape = parse_shape(dict_value(header, "shape"));
  const std::size_t expected = out.element_count() * npy_element_size(dtype);
  const std::size_t have = bytes.size() - 10 - hlen;
  if (have < expected)
    throw ValidationError("NPY_TRUNCATED: payload shorter than the declared shape");
  if (have > expected)
    throw ValidationError("NPY_TRUNCATED: payload longer than the declared shape");
  out.data.assign(bytes.begin() + 10 + hlen, bytes.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

void save_npy(const std::filesystem::path& path, const NpyArray& array) {
  write_file_bytes(path, write_npy(array));
}

NpyArray load_npy(const std::filesystem::path& path) {
  return read_npy(read_file_bytes(path));
}

}  // namespace cedu

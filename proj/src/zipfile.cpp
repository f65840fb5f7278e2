#include "cedu/zipfile.hpp"

#include <array>
#include <cstring>

namespace cedu {
namespace {

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get16(const std::vector<std::uint8_t>& b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

std::uint32_t get32(const std::vector<std::uint8_t>& b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) | (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
         (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

// Fixed DOS date/time (2024-01-01 00:00:00) so archives are byte-stable.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (44 << 9) | (1 << 5) | 1;

constexpr std::uint32_t kLocalSig = 0x04034b50u;
constexpr std::uint32_t kCentralSig = 0x02014b50u;
constexpr std::uint32_t kEndSig = 0x06054b50u;

}  // namespace

std::uint32_t crc32_ieee(const std::uint8_t* data, std::size_t size) {
  static const std::array<std::uint32_t, 256> table = make_crc_table();
  std::uint32_t crc = 0xffffffffu;
  for (std::size_t i = 0; i < size; ++i)
    crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

std::vector<std::uint8_t> pack_archive(const std::string& member_name,
                                       const std::vector<std::uint8_t>& payload) {
  if (member_name.empty() || member_name.size() > 0xffff)
    throw ValidationError("zip: invalid member name");
  if (payload.size() > 0xfffffffeull)
    throw ValidationError("zip: payload too large for a plain archive");

  const std::uint32_t crc = crc32_ieee(payload.data(), payload.size());
  const std::uint32_t size = static_cast<std::uint32_t>(payload.size());
  const std::uint16_t name_len = static_cast<std::uint16_t>(member_name.size());

  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + member_name.size() * 2 + 98);

  // Local file header.
  put32(out, kLocalSig);
  put16(out, 20);        // version needed
  put16(out, 0);         // flags
  put16(out, 0);         // method: stored
  put16(out, kDosTime);
  put16(out, kDosDate);
  put32(out, crc);
  put32(out, size);      // compressed size (== uncompressed when stored)
  put32(out, size);
  put16(out, name_len);
  put16(out, 0);         // extra length
  out.insert(out.end(), member_name.begin(), member_name.end());
  out.insert(out.end(), payload.begin(), payload.end());

  // Central directory.
  const std::uint32_t central_offset = static_cast<std::uint32_t>(out.size());
  put32(out, kCentralSig);
  put16(out, 20);        // version made by
  put16(out, 20);        // version needed
  put16(out, 0);
  put16(out, 0);
  put16(out, kDosTime);
  put16(out, kDosDate);
  put32(out, crc);
  put32(out, size);
  put32(out, size);
  put16(out, name_len);
  put16(out, 0);         // extra length
  put16(out, 0);         // comment length
  put16(out, 0);         // disk number
  put16(out, 0);         // internal attributes
  put32(out, 0);         // external attributes
  put32(out, 0);         // local header offset
  out.insert(out.end(), member_name.begin(), member_name.end());
  const std::uint32_t central_size =
      static_cast<std::uint32_t>(out.size()) - central_offset;

  // End of central directory.
  put32(out, kEndSig);
  put16(out, 0);         // disk
  put16(out, 0);         // central dir start disk
  put16(out, 1);         // entries on this disk
  put16(out, 1);         // total entries
  put32(out, central_size);
  put32(out, central_offset);
  put16(out, 0);         // comment length
  return out;
}

std::vector<ZipEntry> parse_archive(const std::vector<std::uint8_t>& bytes) {
  // Locate the end-of-central-directory record (search backwards to allow
  // a trailing comment).
  if (bytes.size() < 22) throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: too short");
  std::size_t eocd = std::string::npos;
  const std::size_t lowest = bytes.size() >= 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
  for (std::size_t pos = bytes.size() - 22; ; --pos) {
    if (get32(bytes, pos) == kEndSig) {
      eocd = pos;
      break;
    }
    if (pos == lowest) break;
  }
  if (eocd == std::string::npos)
    throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: end of central directory not found");

  const std::uint16_t total_entries = get16(bytes, eocd + 10);
  const std::uint32_t central_size = get32(bytes, eocd + 12);
  const std::uint32_t central_offset = get32(bytes, eocd + 16);
  if (static_cast<std::size_t>(central_offset) + central_size > eocd)
    throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: central directory out of bounds");

  std::vector<ZipEntry> entries;
  std::size_t pos = central_offset;
  for (int e = 0; e < total_entries; ++e) {
    if (pos + 46 > bytes.size() || get32(bytes, pos) != kCentralSig)
      throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: bad central directory entry");
    const std::uint16_t method = get16(bytes, pos + 10);
    const std::uint32_t crc = get32(bytes, pos + 16);
    const std::uint32_t comp_size = get32(bytes, pos + 20);
    const std::uint32_t uncomp_size = get32(bytes, pos + 24);
    const std::uint16_t name_len = get16(bytes, pos + 28);
    const std::uint16_t extra_len = get16(bytes, pos + 30);
    const std::uint16_t comment_len = get16(bytes, pos + 32);
    const std::uint32_t local_offset = get32(bytes, pos + 42);
    if (pos + 46 + name_len > bytes.size())
      throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: truncated entry name");
    ZipEntry entry;
    entry.name.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos) + 46,
                      bytes.begin() + static_cast<std::ptrdiff_t>(pos) + 46 + name_len);
    entry.method = method;
    if (method != 0)
      throw ZipError(ZipErrorCode::compressed,
                     "ZIP_COMPRESSED: entry '" + entry.name +
                         "' is compressed; submissions must be stored");
    if (comp_size != uncomp_size)
      throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: stored entry size mismatch");

    // Walk the local header to find the payload.
    if (static_cast<std::size_t>(local_offset) + 30 > bytes.size() ||
        get32(bytes, local_offset) != kLocalSig)
      throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: bad local header");
    const std::uint16_t local_name_len = get16(bytes, local_offset + 26);
    const std::uint16_t local_extra_len = get16(bytes, local_offset + 28);
    const std::size_t data_start =
        static_cast<std::size_t>(local_offset) + 30 + local_name_len + local_extra_len;
    if (data_start + comp_size > bytes.size())
      throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: payload out of bounds");
    entry.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_start),
                      bytes.begin() + static_cast<std::ptrdiff_t>(data_start + comp_size));
    if (crc32_ieee(entry.data.data(), entry.data.size()) != crc)
      throw ZipError(ZipErrorCode::parse, "ZIP_PARSE: CRC mismatch");
    entries.push_back(std::move(entry));
    pos += 46u + name_len + extra_len + comment_len;
  }
  return entries;
}

std::vector<std::uint8_t> unpack_archive(const std::vector<std::uint8_t>& bytes,
                                         const std::string& expected_member) {
  std::vector<ZipEntry> entries = parse_archive(bytes);
  if (entries.empty())
    throw ZipError(ZipErrorCode::empty, "ZIP_EMPTY: archive contains no entries");
  if (entries.size() > 1)
    throw ZipError(ZipErrorCode::multi_entry,
                   "ZIP_MULTI_ENTRY: archive must contain exactly one entry, found " +
                       std::to_string(entries.size()));
  if (entries[0].name != expected_member)
    throw ZipError(ZipErrorCode::member_name,
                   "ZIP_MEMBER_NAME: expected '" + expected_member + "', found '" +
                       entries[0].name + "'");
  return std::move(entries[0].data);
}

}  // namespace cedu

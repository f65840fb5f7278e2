#pragma once
// Single-entry stored (uncompressed) ZIP archives, the container format
// for competition submissions.  The writer emits a deterministic archive:
// one stored entry, fixed DOS timestamp, CRC-32 over the payload.  The
// reader accepts only that profile and reports precise failure codes.

#include <cstdint>
#include <string>
#include <vector>

#include "cedu/types.hpp"

namespace cedu {

enum class ZipErrorCode {
  parse,        // structurally broken archive
  empty,        // no entries
  multi_entry,  // more than one entry
  member_name,  // entry name differs from the expected member
  compressed,   // entry is not stored (method != 0)
};

class ZipError : public ValidationError {
 public:
  ZipError(ZipErrorCode code, const std::string& message)
      : ValidationError(message), code_(code) {}
  ZipErrorCode code() const { return code_; }

 private:
  ZipErrorCode code_;
};

// CRC-32 (IEEE 802.3, the polynomial used by ZIP).
std::uint32_t crc32_ieee(const std::uint8_t* data, std::size_t size);

// Builds an archive holding a single stored entry `member_name` with the
// given payload.
std::vector<std::uint8_t> pack_archive(const std::string& member_name,
                                       const std::vector<std::uint8_t>& payload);

struct ZipEntry {
  std::string name;
  std::uint16_t method = 0;  // 0 = stored
  std::vector<std::uint8_t> data;
};

// Parses all central-directory entries.  Throws ZipError(parse) on a
// structurally broken archive and ZipError(compressed) when an entry uses
// any method other than stored.
std::vector<ZipEntry> parse_archive(const std::vector<std::uint8_t>& bytes);

// Extracts the payload of the single entry named `expected_member`.
// Throws ZipError with the matching code on any profile violation.
std::vector<std::uint8_t> unpack_archive(const std::vector<std::uint8_t>& bytes,
                                         const std::string& expected_member);

}  // namespace cedu

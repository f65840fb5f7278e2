#pragma once
// Small CSV utilities shared by the codecs (RFC-4180-style quoting).

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cedu/types.hpp"

namespace cedu {

// Splits one CSV record.  Double quotes delimit fields containing commas
// or quotes; "" inside a quoted field is a literal quote.
std::vector<std::string> split_csv_line(const std::string& line);

// Quotes a field only when needed.
std::string csv_escape(const std::string& field);

// Header-keyed CSV reader: resolves columns by name so input files may
// reorder columns or carry extras.
class CsvReader {
 public:
  // Reads the header line.  Throws ValidationError if the stream is empty.
  explicit CsvReader(std::istream& in, std::string source_name = "csv");

  // Advances to the next record; false at end of input.  Blank lines are
  // skipped.
  bool next();

  bool has_column(const std::string& name) const;
  // Field access for the current record; `field` throws on unknown
  // column, `field_or` returns fallback instead.
  const std::string& field(const std::string& name) const;
  std::string field_or(const std::string& name, const std::string& fallback) const;

  // Parses the named field as a number, treating "" and "None" as
  // missing.  Throws ValidationError naming row and column on bad input.
  bool missing(const std::string& name) const;
  long field_long(const std::string& name) const;
  double field_double(const std::string& name) const;

  std::size_t row_number() const { return row_; }  // 1-based data row index
  const std::vector<std::string>& header() const { return header_; }

 private:
  [[noreturn]] void fail(const std::string& message) const;
  std::istream& in_;
  std::string source_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::string> record_;
  std::size_t row_ = 0;
};

// Strict numeric parsing helpers (whole-string match or ValidationError).
long parse_long(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

// Shortest round-trip formatting for doubles (decode(encode(x)) == x).
std::string format_double(double value);

}  // namespace cedu

#include "cedu/train_csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "cedu/csv.hpp"

namespace cedu {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

long parse_long(const std::string& text, const std::string& what) {
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError(what + ": not an integer: '" + text + "'");
  return value;
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError(what + ": not a number: '" + text + "'");
  return value;
}

std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw NumericError("format_double: conversion failed");
  return std::string(buffer, ptr);
}

CsvReader::CsvReader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {
  std::string line;
  if (!std::getline(in_, line))
    throw ValidationError("EMPTY_CSV: " + source_ + " has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  header_ = split_csv_line(line);
  for (std::size_t i = 0; i < header_.size(); ++i) columns_.emplace(header_[i], i);
}

bool CsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    record_ = split_csv_line(line);
    ++row_;
    if (record_.size() != header_.size())
      fail("expected " + std::to_string(header_.size()) + " fields, got " +
           std::to_string(record_.size()));
    return true;
  }
  return false;
}

bool CsvReader::has_column(const std::string& name) const {
  return columns_.count(name) != 0;
}

const std::string& CsvReader::field(const std::string& name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) fail("missing column '" + name + "'");
  return record_.at(it->second);
}

std::string CsvReader::field_or(const std::string& name,
                                const std::string& fallback) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) return fallback;
  return record_.at(it->second);
}

bool CsvReader::missing(const std::string& name) const {
  const std::string& v = field(name);
  return v.empty() || v == "None";
}

long CsvReader::field_long(const std::string& name) const {
  return parse_long(field(name), source_ + " row " + std::to_string(row_) +
                                     " column " + name);
}

double CsvReader::field_double(const std::string& name) const {
  return parse_double(field(name), source_ + " row " + std::to_string(row_) +
                                       " column " + name);
}

void CsvReader::fail(const std::string& message) const {
  throw ValidationError(source_ + " row " + std::to_string(row_) + ": " + message);
}

void write_train_csv(std::ostream& out, const SyntheticDataset& dataset) {
  dataset.validate();
  const int n = dataset.num_constructs;
  std::string line = "student_id,bot_action";
  for (int j = 0; j < n; ++j) line += ",construct_" + std::to_string(j);
  line += '\n';
  out << line;
  for (const Trajectory& traj : dataset.trajectories) {
    for (int t = 0; t < traj.steps(); ++t) {
      line = std::to_string(traj.student_id);
      line += ',';
      line += std::to_string(traj.actions[static_cast<std::size_t>(t)]);
      for (int j = 0; j < n; ++j) {
        line += ',';
        line += format_double(traj.probs(t, j));
      }
      line += '\n';
      out << line;
    }
  }
  if (!out) throw IoError("write_train_csv: stream failure");
}

std::string train_csv_string(const SyntheticDataset& dataset) {
  std::ostringstream out;
  write_train_csv(out, dataset);
  return out.str();
}

SyntheticDataset read_train_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("EMPTY_CSV: train.csv has no content");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "student_id" || header[1] != "bot_action")
    throw ValidationError("read_train_csv: malformed header");
  const int n = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < n; ++j)
    if (header[static_cast<std::size_t>(j) + 2] != "construct_" + std::to_string(j))
      throw ValidationError("read_train_csv: malformed header");

  SyntheticDataset dataset;
  dataset.num_constructs = n;
  // Rows with the same student_id form one trajectory, in order of first
  // appearance.
  std::map<long, std::size_t> index_of;
  std::vector<std::vector<int>> actions;
  std::vector<std::vector<double>> values;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != n + 2)
      throw ValidationError("read_train_csv row " + std::to_string(row_number) +
                            ": wrong field count");
    const std::string where = "read_train_csv row " + std::to_string(row_number);
    const long student = parse_long(fields[0], where);
    const long action = parse_long(fields[1], where);
    if (action < 0 || action >= n)
      throw ValidationError(where + ": bot_action out of range");
    auto [it, inserted] = index_of.emplace(student, actions.size());
    if (inserted) {
      actions.emplace_back();
      values.emplace_back();
      dataset.trajectories.push_back(Trajectory{student, {}, Matrix()});
    }
    actions[it->second].push_back(static_cast<int>(action));
    for (int j = 0; j < n; ++j)
      values[it->second].push_back(
          parse_double(fields[static_cast<std::size_t>(j) + 2], where));
  }
  if (dataset.trajectories.empty())
    throw ValidationError("EMPTY_CSV: train.csv has no data rows");

  for (std::size_t s = 0; s < dataset.trajectories.size(); ++s) {
    Trajectory& traj = dataset.trajectories[s];
    const int steps = static_cast<int>(actions[s].size());
    traj.actions = std::move(actions[s]);
    traj.probs.resize(steps, n);
    for (int t = 0; t < steps; ++t)
      for (int j = 0; j < n; ++j)
        traj.probs(t, j) = values[s][static_cast<std::size_t>(t) * n + j];
  }
  dataset.validate();
  return dataset;
}

}  // namespace cedu

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reqgrid {

// RFC-4180 records: quoted fields may contain commas, doubled quotes and
// newlines. Accepts LF and CRLF line endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record into `fields`. Returns false on clean EOF.
  // Throws io_error on malformed quoting.
  bool read_record(std::vector<std::string>& fields);

  // 1-based index of the last record returned.
  std::size_t record_number() const { return record_number_; }

 private:
  std::istream& in_;
  std::size_t record_number_ = 0;
};

std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

}  // namespace reqgrid

#include "reqgrid/csv.hpp"

#include <fstream>
#include <istream>

#include "reqgrid/error.hpp"

namespace reqgrid {

bool CsvReader::read_record(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (c == EOF) return false;

  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;

  auto push_field = [&] {
    fields.push_back(field);
    field.clear();
    field_was_quoted = false;
  };

  while (true) {
    if (c == EOF) {
      if (in_quotes) throw io_error("csv: unterminated quoted field at end of input");
      push_field();
      break;
    }
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        int next = in_.get();
        if (next == '"') {
          field.push_back('"');
        } else {
          in_quotes = false;
          c = next;
          continue;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      if (!field.empty() || field_was_quoted)
        throw io_error("csv: quote inside unquoted field");
      in_quotes = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      push_field();
    } else if (ch == '\r') {
      int next = in_.get();
      if (next == '\n' || next == EOF) {
        push_field();
        break;
      }
      field.push_back(ch);
      c = next;
      continue;
    } else if (ch == '\n') {
      push_field();
      break;
    } else {
      field.push_back(ch);
    }
    c = in_.get();
  }

  ++record_number_;
  return true;
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  CsvReader reader(in);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  while (reader.read_record(fields)) records.push_back(fields);
  return records;
}

}  // namespace reqgrid

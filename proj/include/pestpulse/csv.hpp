#ifndef PESTPULSE_CSV_HPP
#define PESTPULSE_CSV_HPP

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pestpulse {

// Streaming RFC 4180-style reader. Quoted fields may contain commas,
// doubled quotes, and newlines. Malformed rows are reported, not thrown,
// so callers can count rejects and keep going.
class CsvReader {
 public:
  enum class RowStatus { Ok, Malformed, Eof };

  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record into `fields`. On Malformed, `error` holds the reason.
  RowStatus next(std::vector<std::string>& fields, std::string& error);

 private:
  std::istream& in_;
};

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace pestpulse

#endif  // PESTPULSE_CSV_HPP

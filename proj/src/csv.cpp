#include "pestpulse/csv.hpp"

namespace pestpulse {

CsvReader::RowStatus CsvReader::next(std::vector<std::string>& fields,
                                     std::string& error) {
  fields.clear();
  error.clear();

  int first = in_.peek();
  if (first == std::istream::traits_type::eof()) return RowStatus::Eof;

  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool malformed = false;

  auto finish_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };

  int ci;
  while ((ci = in_.get()) != std::istream::traits_type::eof()) {
    char c = static_cast<char>(ci);
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (field.empty() && !field_was_quoted) {
        in_quotes = true;
        field_was_quoted = true;
      } else {
        // Quote opening mid-field or trailing text after a closing quote.
        malformed = true;
        if (error.empty()) error = "stray quote in field";
        field.push_back(c);
      }
      continue;
    }
    if (field_was_quoted && c != ',' && c != '\n' && c != '\r') {
      malformed = true;
      if (error.empty()) error = "text after closing quote";
      field.push_back(c);
      continue;
    }
    if (c == ',') {
      finish_field();
      continue;
    }
    if (c == '\r') {
      if (in_.peek() == '\n') in_.get();
      finish_field();
      return malformed ? RowStatus::Malformed : RowStatus::Ok;
    }
    if (c == '\n') {
      finish_field();
      return malformed ? RowStatus::Malformed : RowStatus::Ok;
    }
    field.push_back(c);
  }

  if (in_quotes) {
    error = "unbalanced quote at end of input";
    finish_field();
    return RowStatus::Malformed;
  }
  finish_field();
  return malformed ? RowStatus::Malformed : RowStatus::Ok;
}

std::string csv_escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.put(',');
    out << csv_escape(fields[i]);
  }
  out.put('\n');
}

}  // namespace pestpulse

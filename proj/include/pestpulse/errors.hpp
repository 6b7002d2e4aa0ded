#ifndef PESTPULSE_ERRORS_HPP
#define PESTPULSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pestpulse {

// Bad configuration, flags, or file schemas. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed request that fails on the data itself. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pestpulse

#endif  // PESTPULSE_ERRORS_HPP

#ifndef BPSCHED_ERRORS_HPP
#define BPSCHED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bpsched {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid graph structure or potential tables (zero entries, self loops,
/// duplicate edges, dimension mismatches).
class model_error : public error {
public:
  explicit model_error(const std::string& what) : error(what) {}
};

/// An unnormalized probability vector collapsed to (numerically) zero mass.
class numeric_error : public error {
public:
  explicit numeric_error(const std::string& what) : error(what) {}
};

/// Text-format parse failure. Carries the 1-based line number.
class parse_error : public error {
public:
  parse_error(const std::string& what, int line)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

} // namespace bpsched

#endif

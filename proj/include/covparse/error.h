#ifndef COVPARSE_ERROR_H_
#define COVPARSE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covparse {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes (see tools/covparse.cc).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CoNLL-U, embeddings, corpora).
class DataError : public Error {
 public:
  using Error::Error;
};

// CoNLL-U syntax error, carrying the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Model files that cannot be loaded (bad magic, version, truncated data).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A precondition of a library operation was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace covparse

#endif  // COVPARSE_ERROR_H_

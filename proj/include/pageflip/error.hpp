#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pageflip {

// Base for every error this library throws. Filter rejections are values,
// not exceptions, and never show up here.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadConfig : public Error {
 public:
  using Error::Error;
};

// Blank page: the row profile has no ink at all.
class NoInk : public Error {
 public:
  NoInk() : Error("page contains no ink") {}
};

class ImageIoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class NonMonotonicTrace : public Error {
 public:
  explicit NonMonotonicTrace(std::size_t line_no)
      : Error("line " + std::to_string(line_no) + ": timestamp not strictly increasing"),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DeviceTimeout : public Error {
 public:
  explicit DeviceTimeout(int timeout_ms)
      : Error("device did not acknowledge within " + std::to_string(timeout_ms) + " ms"),
        timeout_ms_(timeout_ms) {}
  int timeout_ms() const { return timeout_ms_; }

 private:
  int timeout_ms_;
};

class DeviceIo : public Error {
 public:
  using Error::Error;
};

class LogMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace pageflip

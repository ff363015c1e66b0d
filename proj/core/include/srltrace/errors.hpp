#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace srltrace {

// Base for every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with input data (files, stores, datasets). The CLI maps these to
// exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or configuration values. The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class MalformedEvent : public DataError {
 public:
  MalformedEvent(std::size_t line_number, const std::string& reason, const std::string& file = {})
      : DataError((file.empty() ? std::string() : file + ": ") + "malformed event at line " +
                  std::to_string(line_number) + ": " + reason),
        line_number_(line_number),
        reason_(reason),
        file_(file) {}

  std::size_t line_number() const noexcept { return line_number_; }
  const std::string& reason() const noexcept { return reason_; }
  const std::string& file() const noexcept { return file_; }

 private:
  std::size_t line_number_;
  std::string reason_;
  std::string file_;
};

class MalformedAttempt : public DataError {
 public:
  MalformedAttempt(std::size_t line_number, const std::string& reason, const std::string& file = {})
      : DataError((file.empty() ? std::string() : file + ": ") + "malformed attempt at line " +
                  std::to_string(line_number) + ": " + reason),
        line_number_(line_number),
        reason_(reason),
        file_(file) {}

  std::size_t line_number() const noexcept { return line_number_; }
  const std::string& reason() const noexcept { return reason_; }
  const std::string& file() const noexcept { return file_; }

 private:
  std::size_t line_number_;
  std::string reason_;
  std::string file_;
};

class MalformedFeatureRow : public DataError {
 public:
  MalformedFeatureRow(std::size_t line_number, const std::string& reason,
                      const std::string& file = {})
      : DataError((file.empty() ? std::string() : file + ": ") + "malformed feature row at line " +
                  std::to_string(line_number) + ": " + reason),
        line_number_(line_number),
        reason_(reason) {}

  std::size_t line_number() const noexcept { return line_number_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_number_;
  std::string reason_;
};

class InconsistentAttempts : public DataError {
 public:
  InconsistentAttempts(std::string student, std::string quiz, const std::string& reason)
      : DataError("inconsistent attempts for student '" + student + "', quiz '" + quiz +
                  "': " + reason),
        student_(std::move(student)),
        quiz_(std::move(quiz)) {}

  const std::string& student() const noexcept { return student_; }
  const std::string& quiz() const noexcept { return quiz_; }

 private:
  std::string student_;
  std::string quiz_;
};

class UnsortedInput : public DataError {
 public:
  using DataError::DataError;
};

class EmptyStore : public DataError {
 public:
  EmptyStore() : DataError("store contains no quiz attempts") {}
};

class InvalidDataset : public DataError {
 public:
  using DataError::DataError;
};

class ArityMismatch : public DataError {
 public:
  ArityMismatch(std::size_t expected, std::size_t got)
      : DataError("row has " + std::to_string(got) + " features, model expects " +
                  std::to_string(expected)) {}
};

class InsufficientGroups : public DataError {
 public:
  explicit InsufficientGroups(std::size_t groups)
      : DataError("grouped split needs at least 2 students, got " + std::to_string(groups)) {}
};

class InvalidConfig : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace srltrace

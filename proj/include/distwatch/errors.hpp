#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace distwatch {

/// Base of every error the engine raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad flag values, missing required inputs. CLI exit 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data. CLI exit 3.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// FormatError that can point at a file and a 1-based line.
class ParseError : public FormatError {
 public:
  ParseError(const std::filesystem::path& file, std::size_t line, const std::string& what)
      : FormatError(file.string() + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::filesystem::path& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

/// A detection file has no record for the requested frame. Distinct from a
/// record that exists but holds zero detections.
class NoDetectionsRecorded : public Error {
 public:
  explicit NoDetectionsRecorded(std::uint64_t frame_index)
      : Error("no detections recorded for frame " + std::to_string(frame_index)),
        frame_index_(frame_index) {}

  std::uint64_t frame_index() const noexcept { return frame_index_; }

 private:
  std::uint64_t frame_index_;
};

}  // namespace distwatch

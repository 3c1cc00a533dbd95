#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbx
{

/// Base of every error the toolkit raises on purpose.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

/// Two positions coincide (or a vector vanishes) where a direction is required.
class DegenerateGeometry : public Error
{
public:
  using Error::Error;
};

class InvalidLane : public Error
{
public:
  using Error::Error;
};

class ClipUnavailable : public Error
{
public:
  using Error::Error;
};

class TemplateError : public Error
{
public:
  using Error::Error;
};

class RenderUnavailable : public Error
{
public:
  using Error::Error;
};

class EmptyReport : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  IoError(const std::string &path, const std::string &what)
      : Error(path + ": " + what), path_(path)
  {
  }

  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Text-format parse failure; line is 1-based, 0 when not line oriented.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string &what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
  {
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class CalibrationRequired : public Error
{
public:
  using Error::Error;
};

/// One schema or invariant violation, located by a JSON pointer.
struct ValidationIssue
{
  std::string path;
  std::string message;
};

class ValidationError : public Error
{
public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : Error(summarize(issues)), issues_(std::move(issues))
  {
  }

  const std::vector<ValidationIssue> &issues() const noexcept { return issues_; }

private:
  static std::string summarize(const std::vector<ValidationIssue> &issues)
  {
    std::string out = std::to_string(issues.size()) + " validation issue(s)";
    if (!issues.empty())
    {
      out += "; first: " + issues.front().path + ": " + issues.front().message;
    }
    return out;
  }

  std::vector<ValidationIssue> issues_;
};

} // namespace tbx

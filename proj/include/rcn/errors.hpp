#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcn {

//! A posterior or ratio estimate could not be formed from the data given.
class EstimationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! An iterative fit ran out of iterations. Carries the objective history.
class ConvergenceError : public std::runtime_error
{
public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
    : std::runtime_error(what)
    , trace_(std::move(trace))
  {}
  const std::vector<double>& trace() const { return trace_; }

private:
  std::vector<double> trace_;
};

//! The training objective became NaN or infinite.
class TrainingError : public std::runtime_error
{
public:
  TrainingError(const std::string& what, std::vector<double> trace)
    : std::runtime_error(what)
    , trace_(std::move(trace))
  {}
  const std::vector<double>& trace() const { return trace_; }

private:
  std::vector<double> trace_;
};

//! Malformed input file. `line()` is 1-based.
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(what)
    , line_(line)
  {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

//! Bad experiment configuration: unknown key or unusable value.
//! `line()` is 1-based, or 0 for settings given outside a file.
class ConfigError : public std::invalid_argument
{
public:
  ConfigError(const std::string& what, std::string key, std::size_t line)
    : std::invalid_argument(what)
    , key_(std::move(key))
    , line_(line)
  {}
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

private:
  std::string key_;
  std::size_t line_;
};

} // namespace rcn

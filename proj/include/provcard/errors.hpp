#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace provcard {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV, payload, or session input.
class ParseError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& variable)
      : Error("unknown variable '" + variable + "'"), variable_(variable) {}
  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

class UnknownVersion : public Error {
 public:
  using Error::Error;
};

/// Lookup of a column that does not exist; carries the closest names.
class UnknownColumn : public Error {
 public:
  UnknownColumn(const std::string& column, std::vector<std::string> nearest);
  const std::string& column() const { return column_; }
  const std::vector<std::string>& nearest() const { return nearest_; }

 private:
  std::string column_;
  std::vector<std::string> nearest_;
};

/// A ChangeSet that does not fit the frame it is applied to.
class InconsistentChange : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace provcard

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace igmd {

enum class Label : std::uint8_t { Normal = 0, Anomalous = 1 };

inline const char* label_name(Label l) {
  return l == Label::Normal ? "Normal" : "Anomalous";
}

/// Error categories surfaced through the C API and mapped to CLI exit codes.
enum class ErrorKind {
  Usage,    // bad arguments / bad configuration
  Io,       // unreadable or unwritable file
  Parse,    // malformed input data
  Schema,   // test data incompatible with a model
  Format,   // model file version/checksum/syntax problems
  Internal, // invariant violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

/// One cell of a flow record. Missing is a distinct state, never a numeric
/// sentinel.
struct AttributeValue {
  enum class Kind : std::uint8_t { Numeric, Categorical, Missing };

  Kind kind = Kind::Missing;
  double number = 0.0;
  std::string text;

  static AttributeValue numeric(double v) {
    AttributeValue a;
    a.kind = Kind::Numeric;
    a.number = v;
    return a;
  }
  static AttributeValue categorical(std::string t) {
    AttributeValue a;
    a.kind = Kind::Categorical;
    a.text = std::move(t);
    return a;
  }
  static AttributeValue missing() { return AttributeValue{}; }

  bool is_numeric() const { return kind == Kind::Numeric; }
  bool is_categorical() const { return kind == Kind::Categorical; }
  bool is_missing() const { return kind == Kind::Missing; }
};

/// One labeled flow record; id is the 0-based data-row ordinal in the source
/// file.
struct Instance {
  std::size_t id = 0;
  Label label = Label::Normal;
  std::vector<AttributeValue> values;
};

using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink) sink->push_back(std::move(message));
}

}  // namespace igmd

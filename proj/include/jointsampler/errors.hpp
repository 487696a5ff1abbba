#ifndef JOINTSAMPLER_ERRORS_HPP_
#define JOINTSAMPLER_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace jointsampler {

// Non-finite value produced inside a differentiable computation. `layer` is the
// index of the MLP layer that produced it, or -1 when the failure happened in a
// loss head rather than the network itself.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int layer = -1)
      : std::runtime_error(what), layer_(layer) {}
  int layer() const { return layer_; }

 private:
  int layer_;
};

// Target probability too small for a behavior/target ratio to be meaningful.
class DegenerateRatioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reference policy assigns (near-)zero probability to an observed sample.
class DegenerateSupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Game too large for exact enumeration.
class UnsupportedGameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed persisted file. Carries the offending file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

}  // namespace jointsampler

#endif  // JOINTSAMPLER_ERRORS_HPP_

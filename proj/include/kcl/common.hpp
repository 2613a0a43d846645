#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kcl {

// Node/edge totals of a compiled artifact.
struct SizeReport {
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;

  friend bool operator==(const SizeReport&, const SizeReport&) = default;
};

// DIMACS parse failure; line numbers are 1-based.
class parse_error : public std::runtime_error {
 public:
  parse_error(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// A compilation ran past its node budget or per-instance deadline. Sweeps
// catch this and record the instance as a blowup instead of aborting.
class resource_limit_error : public std::runtime_error {
 public:
  enum class Kind { node_cap, time_cap };

  resource_limit_error(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// A DNNF DAG broke the structural discipline in the middle of a query that
// relies on it (e.g. counting over a non-decomposable conjunction).
class invalid_dag_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kcl

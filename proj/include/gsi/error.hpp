#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsi {

// Bad arguments: wrong dimensions, out-of-range parameters, unknown names.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or truncated files.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure (non-convergence, non-finite values, singular systems).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear system could not be solved because some vertices have no path to
// any observed vertex. `vertices` holds their montage indices.
class singular_error : public numeric_error {
 public:
  singular_error(const std::string& what, std::vector<std::size_t> vertices)
      : numeric_error(what), vertices_(std::move(vertices)) {}

  const std::vector<std::size_t>& vertices() const noexcept { return vertices_; }

 private:
  std::vector<std::size_t> vertices_;
};

}  // namespace gsi

#pragma once

#include <stdexcept>
#include <string>

namespace sadiff {

/// A structural or numeric precondition of an operation is violated
/// (wrong spans, vanishing leading coefficient, index below a sequence start, ...).
struct precondition_error : std::invalid_argument {
  explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

/// An operator description file is malformed or violates the schema.
struct schema_error : std::runtime_error {
  explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sadiff

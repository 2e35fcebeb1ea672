#pragma once

#include <stdexcept>
#include <string>

namespace polarscale {

// Invalid parameters or an operation that does not apply to the given model.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable, malformed or insufficient input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite parameters during word2vec training.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polarscale

#pragma once

#include <stdexcept>
#include <string>

namespace reqgrid {

// Error taxonomy mirrors the CLI exit codes: config=1, backend=2, io=3.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class config_error : public error {
 public:
  explicit config_error(const std::string& what) : error(what) {}
};

class backend_error : public error {
 public:
  explicit backend_error(const std::string& what) : error(what) {}
};

class io_error : public error {
 public:
  explicit io_error(const std::string& what) : error(what) {}
};

}  // namespace reqgrid

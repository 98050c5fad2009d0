#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dimple {

using Eigen::Index;

// error categories map onto tool exit codes:
//   config_error  -> usage / invalid configuration (exit 2)
//   data_error    -> malformed or inconsistent input data (exit 3)
//   numeric_error -> numerical failure (rank deficiency, degeneracy) (exit 4)
class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class data_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require_config(bool ok, const std::string& msg) {
  if (!ok) throw config_error(msg);
}

inline void require_data(bool ok, const std::string& msg) {
  if (!ok) throw data_error(msg);
}

inline void require_numeric(bool ok, const std::string& msg) {
  if (!ok) throw numeric_error(msg);
}

}  // namespace dimple

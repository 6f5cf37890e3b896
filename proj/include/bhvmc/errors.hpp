#ifndef BHVMC_ERRORS_HPP
#define BHVMC_ERRORS_HPP

#include <stdexcept>

namespace bhvmc {

// Error categories; the CLI maps each to a distinct exit code (see tools/main.cpp).
struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };
struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };
struct DimensionError : std::runtime_error { using std::runtime_error::runtime_error; };
struct DivergenceError : std::runtime_error { using std::runtime_error::runtime_error; };
struct SolverError : std::runtime_error { using std::runtime_error::runtime_error; };
struct SamplingError : std::runtime_error { using std::runtime_error::runtime_error; };

}  // namespace bhvmc

#endif

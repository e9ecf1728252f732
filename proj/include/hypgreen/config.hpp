#pragma once

#include <stdexcept>
#include <string>

namespace hypgreen {

// all tolerances live here so tests and the CLI see the same numbers
struct Tolerances {
    double det = 1e-12;        // |ad - bc - 1| after normalization
    double trace = 1e-10;      // trace comparison against 2
    double heat_rel = 1e-10;   // per-panel quadrature target for K_H
    double tail = 1e-6;        // coset/orbit truncation target
    double safety = 1.05;      // inflation applied to grid suprema
    double ball_c_factor = 2.0;
    long long ball_capacity = 40'000'000;  // elements per enumeration
    int reduce_max_iter = 200;
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

// exit code families used by the CLI
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual int exit_code() const { return 3; }
};

struct ContractError : Error {
    using Error::Error;
    int exit_code() const override { return 2; }
};

struct SingularityError : ContractError {
    using ContractError::ContractError;
};

struct CapacityError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    double estimate = 0;
    ConvergenceError(const std::string& what, double est) : Error(what), estimate(est) {}
};

}  // namespace hypgreen

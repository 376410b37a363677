#pragma once

#include <stdexcept>
#include <string>

namespace walkbsde {

/// Contraction precondition h*||f_y||_Lip <= 1/2 violated.
class SchemeUnstableError : public std::runtime_error {
public:
    SchemeUnstableError(const std::string& msg, long minimal_n)
        : std::runtime_error(msg), minimal_n_(minimal_n) {}
    long minimal_n() const { return minimal_n_; }

private:
    long minimal_n_;
};

/// g or f produced a non-finite value during a lattice sweep.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& msg, double t, double x)
        : std::runtime_error(msg), t_(t), x_(x) {}
    double t() const { return t_; }
    double x() const { return x_; }

private:
    double t_;
    double x_;
};

/// Z^n requested at a grid time kh, where it is a left limit and not
/// equal to Delta^n; the caller should evaluate at a midpoint instead.
class GridPointEvaluationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The continuous-solution oracle could not reach the requested accuracy.
class OracleAccuracyError : public std::runtime_error {
public:
    OracleAccuracyError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Oracle accuracy is too coarse relative to the smallest measured error.
class OracleTooCoarseError : public std::runtime_error {
public:
    OracleTooCoarseError(const std::string& msg, double ratio)
        : std::runtime_error(msg), ratio_(ratio) {}
    double ratio() const { return ratio_; }

private:
    double ratio_;
};

/// Infimal convolution with eta below the Lipschitz norm of an eps=1 generator.
class DegenerateSmoothingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace walkbsde

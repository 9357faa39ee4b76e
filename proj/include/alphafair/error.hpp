#ifndef ALPHAFAIR_ERROR_HPP_
#define ALPHAFAIR_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace alphafair {

// Root of all errors raised by the library. The C API maps each subclass to a
// status code.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
    using Error::Error;
};

// Malformed instance/partition file. The message carries the offending field.
class ParseError : public Error {
 public:
    using Error::Error;
};

class ValidationError : public Error {
 public:
    ValidationError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

 private:
    std::vector<std::string> violations_;
};

class IoError : public Error {
 public:
    using Error::Error;
};

class SolverError : public Error {
 public:
    using Error::Error;
};

// Iteration cap hit inside the polyhedral projection.
class ProjectionError : public SolverError {
 public:
    ProjectionError(const std::string& what, std::vector<double> last_iterate, double residual)
        : SolverError(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}
    const std::vector<double>& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }

 private:
    std::vector<double> last_iterate_;
    double residual_;
};

// Missing or unexpected message in the controller simulation.
class ProtocolError : public Error {
 public:
    using Error::Error;
};

}  // namespace alphafair

#endif  // ALPHAFAIR_ERROR_HPP_

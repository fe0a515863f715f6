#ifndef EQFLOW_ERRORS_HPP
#define EQFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eqflow {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid inputs: mismatched groups, wrong dimensions, broken invariants.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Problem file does not match the schema; no numerics were run.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

/// A numeric kernel failed its contract (e.g. eigensolver residual).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

/// A window endpoint fell within eps_gap of an eigenvalue.
class BoundaryCollisionError : public Error {
public:
    explicit BoundaryCollisionError(const std::string& what) : Error(what) {}
};

/// Adaptive partition certification did not terminate within the depth cap.
class CertificationError : public Error {
public:
    CertificationError(const std::string& what, double lo, double hi,
                       bool identically_degenerate)
        : Error(what),
          lo(lo),
          hi(hi),
          identically_degenerate(identically_degenerate) {}

    double lo;
    double hi;
    // The subinterval carried no eigenvalue above the gap threshold at any
    // sample: the path is identically degenerate there and no window radius
    // is admissible.
    bool identically_degenerate;
};

/// Character-theoretic decomposition produced non-integer multiplicities or
/// an inconsistent dimension count.
class DecompositionError : public Error {
public:
    explicit DecompositionError(const std::string& what) : Error(what) {}
};

/// projection_isomorphism cannot certify: ||P - Q|| >= 1.
class CertificateUnavailableError : public Error {
public:
    explicit CertificateUnavailableError(const std::string& what)
        : Error(what) {}
};

}  // namespace eqflow

#endif

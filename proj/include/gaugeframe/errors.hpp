#pragma once

#include <stdexcept>
#include <string>

namespace gaugeframe {

// Base class for every failure the library reports deliberately.  The CLI maps
// subclasses onto its exit-code contract, so new error kinds should derive from
// one of the two intermediate categories below rather than from Error directly.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A numeric-domain problem: the computation left the region where the requested
// quantity is defined (branch boundaries, invalid function arguments, failed
// iterations, ...).  CLI exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent configuration input.  CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An evaluation produced NaN or infinity.
class NonFiniteEvaluation : public NumericError {
public:
    using NumericError::NumericError;
};

// An iterative solve exhausted its iteration budget.
class NoConvergence : public NumericError {
public:
    using NumericError::NumericError;
};

// A point (or an orbit passing through it) violates the selected solution
// branch of the constraints, e.g. a radicand became negative.
class BranchViolation : public NumericError {
public:
    using NumericError::NumericError;
};

// The transversality matrix between constraints and gauge conditions is
// numerically singular, so stability multipliers cannot be determined.
class SingularTransversality : public NumericError {
public:
    using NumericError::NumericError;
};

// The adaptive integrator could not take an acceptable step.
class StepFailure : public NumericError {
public:
    using NumericError::NumericError;
};

// A frame transformation landed in a sector incompatible with the target
// frame's branch signs.
class SectorMismatch : public NumericError {
public:
    using NumericError::NumericError;
};

// A slot-copy transformation would assign a value outside the target
// coordinate's admissible range.
class RangeViolation : public NumericError {
public:
    using NumericError::NumericError;
};

// A function argument fell outside its mathematical domain by more than the
// clamping tolerance (arccos arguments, degenerate induced metrics, ...).
class DomainViolation : public NumericError {
public:
    using NumericError::NumericError;
};

// A lattice configuration reached the boundary guard band.
class SupportEscape : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace gaugeframe

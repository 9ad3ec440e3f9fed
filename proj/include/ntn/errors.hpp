#pragma once

#include <stdexcept>
#include <string>

namespace ntn {

// Precondition or configuration violation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// No correlation peak reached the detection threshold.
class NotDetectedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The actual round-trip delay exceeds the advertised k_offset.
class CompensationInfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Uplink Doppler requested before both an SSB and a SIB19 were processed.
class StateNotReadyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Regenerative payload could not find the frame it is supposed to rebuild.
class RelayFailureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ntn

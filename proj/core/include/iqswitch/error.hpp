#ifndef IQSWITCH_ERROR_HPP
#define IQSWITCH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace iqswitch {

// Input or configuration violates a model invariant. The message names the
// invariant (e.g. "capacity region violated: row 1").
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A simulation produced a state the model forbids (overflow, conservation
// audit mismatch, arrival above a_max). Signals a bug, not a model outcome.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace iqswitch

#endif  // IQSWITCH_ERROR_HPP

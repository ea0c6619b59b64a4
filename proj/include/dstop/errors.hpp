#ifndef DSTOP_ERRORS_HPP
#define DSTOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dstop {

// Argument outside the mathematical domain of an operation (q outside [0,1],
// x outside [a,b], a threshold outside its family, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid parameters or configuration (bad family parameters, malformed
// problem document, inconsistent simulation settings).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested (payoff, distortion, beta) combination has no supported
// solver or classification rule.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace dstop

#endif // DSTOP_ERRORS_HPP

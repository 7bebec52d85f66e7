#ifndef WAVEDET_ERRORS_HPP
#define WAVEDET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wavedet {

/// Bad or inconsistent configuration (file keys, invariant violations).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatch between operands.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Shift offset outside the valid range |k| <= K-1.
class ShiftRangeError : public std::runtime_error {
public:
    explicit ShiftRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix not positive definite beyond the documented regularization.
class ConditioningError : public std::runtime_error {
public:
    explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

/// Pre-normalization output too small to divide by.
class NormalizationUnderflowError : public std::runtime_error {
public:
    explicit NormalizationUnderflowError(const std::string& what) : std::runtime_error(what) {}
};

/// A training batch is missing fields the protocol requires (losses, sampled waveforms).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wavedet

#endif // WAVEDET_ERRORS_HPP

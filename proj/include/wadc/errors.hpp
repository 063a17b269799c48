#pragma once

#include <stdexcept>
#include <string>

namespace wadc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ssmodel
class SingularDiscretization : public Error { public: using Error::Error; };
class PoleAtNyquist          : public Error { public: using Error::Error; };
class PoleAtMinusOne         : public Error { public: using Error::Error; };
class ZeroEigenvalue         : public Error { public: using Error::Error; };
class ParseError             : public Error { public: using Error::Error; };
class DimensionMismatch      : public Error { public: using Error::Error; };
class NonFiniteEntry         : public Error { public: using Error::Error; };

// delaychain
class InvalidDimension       : public Error { public: using Error::Error; };
class DelayOutOfRange        : public Error { public: using Error::Error; };
class DelayTooSmall          : public Error { public: using Error::Error; };
class FeedthroughUnsupported : public Error { public: using Error::Error; };

// stability
class NoComplexMode          : public Error { public: using Error::Error; };
class NoStableDelay          : public Error { public: using Error::Error; };
class CalibrationFailed      : public Error { public: using Error::Error; };

// pdcsim
class InvalidProbability     : public Error { public: using Error::Error; };
class ColdStartGap           : public Error { public: using Error::Error; };

// timesim
class InvalidRange           : public Error { public: using Error::Error; };
class DelayOutOfFamily       : public Error { public: using Error::Error; };
class TooFewPeaks            : public Error { public: using Error::Error; };

} // namespace wadc

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loodiag {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatchError : public Error { public: using Error::Error; };
class NonFiniteError : public Error { public: using Error::Error; };
class RankDeficientError : public Error { public: using Error::Error; };
class NotSymmetricError : public Error { public: using Error::Error; };
class NonConvergenceError : public Error { public: using Error::Error; };
class IndexOutOfRangeError : public Error { public: using Error::Error; };
class LeverageOneError : public Error { public: using Error::Error; };
class ZeroVarianceError : public Error { public: using Error::Error; };
class DegenerateResidualError : public Error { public: using Error::Error; };
class SingularTransformError : public Error { public: using Error::Error; };
class InvalidLeverageError : public Error { public: using Error::Error; };
class TooFewSamplesError : public Error { public: using Error::Error; };
class UnknownDatasetError : public Error { public: using Error::Error; };
class UnknownColumnError : public Error { public: using Error::Error; };
class FileNotFoundError : public Error { public: using Error::Error; };
class NonNumericColumnError : public Error { public: using Error::Error; };
class EmptyDataError : public Error { public: using Error::Error; };

/// CSV parse failure; carries the 1-based file line and column of the first
/// offending cell.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace loodiag

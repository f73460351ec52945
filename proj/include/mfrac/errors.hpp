#pragma once

#include <stdexcept>
#include <string>

namespace mfrac {

// Error taxonomy. Everything derives from Error so callers can catch one type;
// the CLI maps ValidationError/ParseError to exit code 2 and the rest to 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};
struct ModelUnusable : Error {
    using Error::Error;
};
struct InvalidModel : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct EmbeddingFailure : Error {
    using Error::Error;
};
struct DegenerateSample : Error {
    using Error::Error;
};
struct ConditionViolated : Error {
    using Error::Error;
};
struct TooFewSamples : Error {
    using Error::Error;
};
struct InvalidH : Error {
    using Error::Error;
};
struct ValidityError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct NonNumeric : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};

} // namespace mfrac

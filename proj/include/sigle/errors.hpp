#pragma once

#include <stdexcept>
#include <string>

namespace sigle {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct CapExceeded : Error {
    using Error::Error;
};

struct AcceptanceTooLow : Error {
    using Error::Error;
};

struct DegenerateWeights : Error {
    using Error::Error;
};

struct SingularMoments : Error {
    using Error::Error;
};

struct SingularFisher : Error {
    using Error::Error;
};

struct SingularWeightedGram : Error {
    using Error::Error;
};

struct EmptyTruncation : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

}  // namespace sigle

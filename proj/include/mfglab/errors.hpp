#pragma once

#include <stdexcept>
#include <string>

namespace mfglab {

/// Base class for every failure the library reports deliberately.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    using Error::Error;
};

// lq_engine
struct RiccatiBlowup : Error {
    using Error::Error;
};
struct BvpSingular : Error {
    using Error::Error;
};
struct DenseLimitExceeded : Error {
    using Error::Error;
};
struct SingularOptimalitySystem : Error {
    using Error::Error;
};
struct NonConvex : Error {
    using Error::Error;
};

// chaos_core
struct NoConvergence : Error {
    using Error::Error;
};
struct OutsideDomain : Error {
    using Error::Error;
};
struct PicardDiverged : Error {
    using Error::Error;
};
struct RegressionSingular : Error {
    using Error::Error;
};
struct FlowNotContracting : Error {
    using Error::Error;
};

// metrics
struct UndefinedRegime : Error {
    using Error::Error;
};
struct EmptySample : Error {
    using Error::Error;
};
struct SizeLimit : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};

// experiments
struct InsufficientReplications : Error {
    using Error::Error;
};

}  // namespace mfglab

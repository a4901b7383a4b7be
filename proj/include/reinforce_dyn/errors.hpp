#pragma once

#include <stdexcept>
#include <string>

namespace reinforce_dyn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// model construction
struct AsymmetricAlpha : Error { using Error::Error; };
struct BadDimension : Error { using Error::Error; };

// pointwise operations
struct LyapunovUnavailable : Error { using Error::Error; };
struct BoundaryReference : Error { using Error::Error; };
struct NegativeArgument : Error { using Error::Error; };
struct BoundaryInput : Error { using Error::Error; };

// flow / stability
struct StepTooLarge : Error { using Error::Error; };
struct NonFiniteState : Error { using Error::Error; };
struct NotAnEquilibrium : Error { using Error::Error; };
struct WrongShape : Error { using Error::Error; };

// equilibrium solving
struct NoConvergence : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct NoSmallRoot : Error { using Error::Error; };
struct NotFoundOnGrid : Error { using Error::Error; };

// CLI / experiment orchestration
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace reinforce_dyn

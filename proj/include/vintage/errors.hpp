#pragma once

#include <stdexcept>
#include <string>

namespace vintage {

/// Base for every error raised by the library.
class VintageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VINTAGE_DEFINE_ERROR(Name)                      \
    class Name : public VintageError {                  \
    public:                                             \
        explicit Name(const std::string& what)          \
            : VintageError(#Name ": " + what) {}        \
    }

VINTAGE_DEFINE_ERROR(ConfigError);
VINTAGE_DEFINE_ERROR(RegimeViolation);
VINTAGE_DEFINE_ERROR(GridError);
VINTAGE_DEFINE_ERROR(AlphaBoundary);
VINTAGE_DEFINE_ERROR(MisalignedTau);
VINTAGE_DEFINE_ERROR(NonFiniteState);
VINTAGE_DEFINE_ERROR(NonFiniteObjective);
VINTAGE_DEFINE_ERROR(MissingTrace);
VINTAGE_DEFINE_ERROR(InfeasibleControl);
VINTAGE_DEFINE_ERROR(NotLQ);
VINTAGE_DEFINE_ERROR(NewtonDivergence);
VINTAGE_DEFINE_ERROR(NotInDomain);
VINTAGE_DEFINE_ERROR(NoConvergence);

#undef VINTAGE_DEFINE_ERROR

}  // namespace vintage

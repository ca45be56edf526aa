#pragma once

#include <stdexcept>
#include <string>

namespace spraykit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SPRAYKIT_ERROR(Name)                 \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

SPRAYKIT_ERROR(ChartDomainError);
SPRAYKIT_ERROR(SingularMetricError);
SPRAYKIT_ERROR(NonFiniteDerivativeError);
SPRAYKIT_ERROR(NotTimeOrientableError);
SPRAYKIT_ERROR(NonTimelikeError);
SPRAYKIT_ERROR(MissingLabTimeError);
SPRAYKIT_ERROR(ChartExitError);
SPRAYKIT_ERROR(NonFiniteStateError);
SPRAYKIT_ERROR(ReparamDegenerateError);
SPRAYKIT_ERROR(SignError);
SPRAYKIT_ERROR(DegenerateDensityError);
SPRAYKIT_ERROR(QuadratureDomainError);
SPRAYKIT_ERROR(EmptyEnsembleError);
SPRAYKIT_ERROR(ConfigError);
SPRAYKIT_ERROR(ScenarioError);  // module error surfaced with scenario context

#undef SPRAYKIT_ERROR

} // namespace spraykit

#pragma once

#include <stdexcept>
#include <string>

namespace fxres {

// Base class for all library errors. Subclasses carry the failure kind in
// the type so callers can catch selectively; the message carries context
// (offending key, line number, quarter label, ...).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define FXRES_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& msg)                     \
            : Error(std::string(#Name) + ": " + msg) {}           \
    }

// panel_data
FXRES_DEFINE_ERROR(MalformedRow);
FXRES_DEFINE_ERROR(DuplicateKey);
FXRES_DEFINE_ERROR(FrequencyMismatch);
FXRES_DEFINE_ERROR(EmptyVariable);
FXRES_DEFINE_ERROR(ZeroVariance);
FXRES_DEFINE_ERROR(ZeroRange);
FXRES_DEFINE_ERROR(NonPositiveValue);

// volatility
FXRES_DEFINE_ERROR(SeriesTooShort);
FXRES_DEFINE_ERROR(SparseQuarter);
FXRES_DEFINE_ERROR(DegenerateFit);

// clustering
FXRES_DEFINE_ERROR(TooFewPoints);
FXRES_DEFINE_ERROR(EmptyCluster);
FXRES_DEFINE_ERROR(RegimeGroupTooSmall);

// spvar
FXRES_DEFINE_ERROR(SingularDesign);
FXRES_DEFINE_ERROR(NotPositiveDefinite);
FXRES_DEFINE_ERROR(MissingDecomposition);
FXRES_DEFINE_ERROR(HorizonMismatch);
FXRES_DEFINE_ERROR(NoAcceptedDraws);
FXRES_DEFINE_ERROR(ZeroWeights);

// panel tests
FXRES_DEFINE_ERROR(UnbalancedPanel);
FXRES_DEFINE_ERROR(TooShort);

// fgls
FXRES_DEFINE_ERROR(MissingVariable);
FXRES_DEFINE_ERROR(SingularCsCovariance);
FXRES_DEFINE_ERROR(SingularRestriction);

// threshold / resilience
FXRES_DEFINE_ERROR(ZeroGamma2);
FXRES_DEFINE_ERROR(NegativeVariance);
FXRES_DEFINE_ERROR(DegenerateCovariance);
FXRES_DEFINE_ERROR(MissingFactor);
FXRES_DEFINE_ERROR(NonPositiveComposite);
FXRES_DEFINE_ERROR(ZeroCfVol);
FXRES_DEFINE_ERROR(EmptyPeriod);

// pipeline
FXRES_DEFINE_ERROR(InvalidSpec);
FXRES_DEFINE_ERROR(MissingDependency);
FXRES_DEFINE_ERROR(NoOutputs);
FXRES_DEFINE_ERROR(InvalidConfig);

#undef FXRES_DEFINE_ERROR

} // namespace fxres

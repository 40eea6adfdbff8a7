#pragma once

#include <stdexcept>
#include <string>

namespace sumprod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SUMPROD_DEFINE_ERROR(Name)                 \
    class Name : public Error {                    \
    public:                                        \
        explicit Name(const std::string& what)     \
            : Error(#Name ": " + what) {}          \
    }

SUMPROD_DEFINE_ERROR(InvalidArgument);
SUMPROD_DEFINE_ERROR(CofactorRemains);
SUMPROD_DEFINE_ERROR(EmptyIndexSet);
SUMPROD_DEFINE_ERROR(NonPositiveElement);
SUMPROD_DEFINE_ERROR(BudgetExceeded);
SUMPROD_DEFINE_ERROR(Overflow);
SUMPROD_DEFINE_ERROR(GridTooCoarse);
SUMPROD_DEFINE_ERROR(CoprimalityViolated);
SUMPROD_DEFINE_ERROR(DensityTooLow);
SUMPROD_DEFINE_ERROR(HypothesisFails);
SUMPROD_DEFINE_ERROR(NoValidSplit);
SUMPROD_DEFINE_ERROR(EmptyAfterRegularization);
SUMPROD_DEFINE_ERROR(EmptyFeasibleSet);
SUMPROD_DEFINE_ERROR(ConstantSearchFailed);
SUMPROD_DEFINE_ERROR(ChainTooShort);
SUMPROD_DEFINE_ERROR(InvalidSpec);
SUMPROD_DEFINE_ERROR(ParseError);

#undef SUMPROD_DEFINE_ERROR

}  // namespace sumprod

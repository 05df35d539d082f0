#ifndef CONICAL_ERRORS_HPP
#define CONICAL_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace conical {

// Base for all numerical failures (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfBox : NumericalError {
    using NumericalError::NumericalError;
};

// Point lies on S = {g = 0}; the smooth formulas do not apply there.
struct OnSingularSet : NumericalError {
    using NumericalError::NumericalError;
};

// Point of S \ S*: dg(x)xi vanishes, one-sided limits are undefined.
struct NonGenericPoint : NumericalError {
    using NumericalError::NumericalError;
};

struct NonGenericCrossing : NumericalError {
    using NumericalError::NumericalError;
};

struct StepSizeUnderflow : NumericalError {
    using NumericalError::NumericalError;
};

struct LaunchWindowTooLarge : NumericalError {
    using NumericalError::NumericalError;
};

struct UnderResolved : NumericalError {
    using NumericalError::NumericalError;
};

struct SupportClipped : NumericalError {
    using NumericalError::NumericalError;
};

struct ScaleOrderingViolated : NumericalError {
    using NumericalError::NumericalError;
};

struct SpecUnsupported : NumericalError {
    using NumericalError::NumericalError;
};

struct ZoomWindowExceedsGrid : NumericalError {
    using NumericalError::NumericalError;
};

// Configuration failures (CLI exit code 2). Carries every violation found,
// not just the first.
struct ConfigError : std::runtime_error {
    std::vector<std::string> violations;

    explicit ConfigError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}
    explicit ConfigError(const std::string& msg)
        : std::runtime_error(msg), violations{msg} {}

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& m : v) {
            if (!s.empty()) s += "; ";
            s += m;
        }
        return s;
    }
};

}  // namespace conical

#endif

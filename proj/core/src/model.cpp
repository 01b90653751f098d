#include "survival/model.hpp"

#include "survival/errors.hpp"

#include <cmath>
#include <sstream>

namespace survival {

double gamma_of(double a, double sigma) noexcept { return 2.0 * a / (sigma * sigma); }

ModelParams::ModelParams(double a, double sigma, double c, double lambda)
    : a_(a), sigma_(sigma), c_(c), lambda_(lambda)
{
    auto fail = [](const std::string& what) { throw ModelError("invalid model: " + what); };
    if (!std::isfinite(a) || !std::isfinite(sigma) || !std::isfinite(c) || !std::isfinite(lambda))
        fail("all coefficients must be finite");
    if (sigma <= 0.0) fail("volatility sigma must be > 0");
    if (c < 0.0) fail("payout rate c must be >= 0 (c = 0 is the payout-free diagnostic mode)");
    if (lambda <= 0.0) fail("jump intensity lambda must be > 0");
    const double g = gamma_of(a, sigma);
    if (!(g > 1.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "net-profit condition a > sigma^2/2 (gamma = 2a/sigma^2 > 1) violated: gamma = " << g;
        fail(os.str());
    }
}

double ModelParams::gamma() const noexcept { return gamma_of(a_, sigma_); }

} // namespace survival

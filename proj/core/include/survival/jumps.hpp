#pragma once

#include "survival/random.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace survival {

// Law of a single positive jump size. Implementations are immutable.
class JumpLaw {
public:
    virtual ~JumpLaw() = default;

    virtual double cdf(double x) const = 0;
    // 1 - cdf(x), computed without cancellation where possible.
    virtual double survival(double x) const = 0;
    // Integral of the cdf over [0, x]. Used for the Stieltjes weights of the
    // nonlocal term with piecewise-linear interpolation.
    virtual double cdf_integral(double x) const = 0;
    virtual double sample(Rng& rng) const = 0;
    virtual double mean() const = 0;
    virtual bool full_support() const = 0;
    // Point masses (value, probability); empty for continuous laws.
    virtual std::vector<std::pair<double, double>> atoms() const { return {}; }
    // Law of s * xi.
    virtual std::shared_ptr<const JumpLaw> scaled(double s) const = 0;
    virtual std::string describe() const = 0;
};

// Value handle over a shared immutable JumpLaw; cheap to copy and safe to
// share across threads.
class JumpDistribution {
public:
    explicit JumpDistribution(std::shared_ptr<const JumpLaw> law);

    double cdf(double x) const { return law_->cdf(x); }
    double survival(double x) const { return law_->survival(x); }
    double cdf_integral(double x) const { return law_->cdf_integral(x); }
    double sample(Rng& rng) const { return law_->sample(rng); }
    double mean() const { return law_->mean(); }
    bool full_support() const { return law_->full_support(); }
    std::vector<std::pair<double, double>> atoms() const { return law_->atoms(); }
    std::string describe() const { return law_->describe(); }

    // Non-empty when the law does not charge every open subinterval of
    // (0, inf). The solver still runs; only the uniqueness theory needs it.
    std::string support_warning() const;

    JumpDistribution scaled(double s) const;

private:
    std::shared_ptr<const JumpLaw> law_;
};

JumpDistribution make_exponential(double rate);
JumpDistribution make_gamma(double shape, double scale);
// Points are (value > 0, probability); probabilities must sum to 1 within 1e-9.
JumpDistribution make_empirical(std::vector<std::pair<double, double>> points);

} // namespace survival

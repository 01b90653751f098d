#include "survival/jumps.hpp"

#include "survival/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace survival {

namespace {

std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

class ExponentialLaw final : public JumpLaw {
public:
    explicit ExponentialLaw(double rate) : rate_(rate) {}

    double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
    double survival(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-rate_ * x); }
    double cdf_integral(double x) const override
    {
        return x <= 0.0 ? 0.0 : x + std::expm1(-rate_ * x) / rate_;
    }
    double sample(Rng& rng) const override
    {
        std::exponential_distribution<double> d(rate_);
        double v = d(rng);
        while (!(v > 0.0)) v = d(rng);
        return v;
    }
    double mean() const override { return 1.0 / rate_; }
    bool full_support() const override { return true; }
    std::shared_ptr<const JumpLaw> scaled(double s) const override
    {
        return std::make_shared<ExponentialLaw>(rate_ / s);
    }
    std::string describe() const override { return "exponential(rate=" + num(rate_) + ")"; }

private:
    double rate_;
};

class GammaLaw final : public JumpLaw {
public:
    GammaLaw(double shape, double scale) : shape_(shape), scale_(scale) {}

    double cdf(double x) const override
    {
        return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, x / scale_);
    }
    double survival(double x) const override
    {
        return x <= 0.0 ? 1.0 : boost::math::gamma_q(shape_, x / scale_);
    }
    // x F(x) - E[xi; xi <= x]
    double cdf_integral(double x) const override
    {
        if (x <= 0.0) return 0.0;
        const double z = x / scale_;
        return x * boost::math::gamma_p(shape_, z) - shape_ * scale_ * boost::math::gamma_p(shape_ + 1.0, z);
    }
    double sample(Rng& rng) const override
    {
        std::gamma_distribution<double> d(shape_, scale_);
        double v = d(rng);
        while (!(v > 0.0)) v = d(rng);
        return v;
    }
    double mean() const override { return shape_ * scale_; }
    bool full_support() const override { return true; }
    std::shared_ptr<const JumpLaw> scaled(double s) const override
    {
        return std::make_shared<GammaLaw>(shape_, scale_ * s);
    }
    std::string describe() const override
    {
        return "gamma(shape=" + num(shape_) + ", scale=" + num(scale_) + ")";
    }

private:
    double shape_;
    double scale_;
};

class EmpiricalLaw final : public JumpLaw {
public:
    explicit EmpiricalLaw(std::vector<std::pair<double, double>> points) : points_(std::move(points))
    {
        std::sort(points_.begin(), points_.end());
        cumulative_.reserve(points_.size());
        double acc = 0.0;
        for (const auto& [v, p] : points_) {
            acc += p;
            cumulative_.push_back(acc);
        }
        // Renormalise the last entry so cdf reaches exactly 1.
        cumulative_.back() = 1.0;
    }

    // Right-continuous step function.
    double cdf(double x) const override
    {
        auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const auto& pt) { return v < pt.first; });
        if (it == points_.begin()) return 0.0;
        return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
    }
    double survival(double x) const override
    {
        double s = 0.0;
        for (const auto& [v, p] : points_)
            if (v > x) s += p;
        return s;
    }
    double cdf_integral(double x) const override
    {
        double s = 0.0;
        for (const auto& [v, p] : points_)
            if (v < x) s += p * (x - v);
        return s;
    }
    double sample(Rng& rng) const override
    {
        const double u = std::generate_canonical<double, 53>(rng);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return points_[static_cast<std::size_t>(it - cumulative_.begin())].first;
    }
    double mean() const override
    {
        double m = 0.0;
        for (const auto& [v, p] : points_) m += v * p;
        return m;
    }
    bool full_support() const override { return false; }
    std::vector<std::pair<double, double>> atoms() const override { return points_; }
    std::shared_ptr<const JumpLaw> scaled(double s) const override
    {
        auto pts = points_;
        for (auto& pt : pts) pt.first *= s;
        return std::make_shared<EmpiricalLaw>(std::move(pts));
    }
    std::string describe() const override
    {
        return "empirical(" + std::to_string(points_.size()) + " atoms)";
    }

private:
    std::vector<std::pair<double, double>> points_;
    std::vector<double> cumulative_;
};

} // namespace

JumpDistribution::JumpDistribution(std::shared_ptr<const JumpLaw> law) : law_(std::move(law))
{
    if (!law_) throw ModelError("jump distribution: null law");
}

std::string JumpDistribution::support_warning() const
{
    if (law_->full_support()) return {};
    return "jump law " + law_->describe() +
           " does not charge every open interval of (0, inf); the uniqueness theory"
           " assumes full support (the discrete system is still solved)";
}

JumpDistribution JumpDistribution::scaled(double s) const
{
    if (!(s > 0.0) || !std::isfinite(s)) throw ModelError("jump scaling factor must be > 0");
    return JumpDistribution(law_->scaled(s));
}

JumpDistribution make_exponential(double rate)
{
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw ModelError("exponential jumps: rate must be > 0, got " + num(rate));
    return JumpDistribution(std::make_shared<ExponentialLaw>(rate));
}

JumpDistribution make_gamma(double shape, double scale)
{
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw ModelError("gamma jumps: shape must be > 0, got " + num(shape));
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw ModelError("gamma jumps: scale must be > 0, got " + num(scale));
    return JumpDistribution(std::make_shared<GammaLaw>(shape, scale));
}

JumpDistribution make_empirical(std::vector<std::pair<double, double>> points)
{
    if (points.empty()) throw ModelError("empirical jumps: at least one point required");
    double total = 0.0;
    for (const auto& [v, p] : points) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ModelError("empirical jumps: values must be > 0, got " + num(v));
        if (!(p >= 0.0) || !std::isfinite(p))
            throw ModelError("empirical jumps: probabilities must be >= 0, got " + num(p));
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ModelError("empirical jumps: probabilities must sum to 1, got " + num(total));
    return JumpDistribution(std::make_shared<EmpiricalLaw>(std::move(points)));
}

} // namespace survival

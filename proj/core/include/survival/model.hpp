#pragma once

namespace survival {

// Coefficients of the surplus dynamics
//
//     dX_t = (a X_t - c) dt + sigma X_t dW_t + dP_t,
//
// where P is compound Poisson with intensity lambda and positive jumps.
// Instances are validated at construction and immutable afterwards.
class ModelParams {
public:
    // Throws ModelError naming the violated condition when sigma <= 0,
    // c < 0, lambda <= 0 or gamma = 2a/sigma^2 <= 1 (net-profit condition).
    // c == 0 is accepted as a diagnostic mode: the payout-free process never
    // reaches 0, so the survival probability is identically 1.
    ModelParams(double a, double sigma, double c, double lambda);

    double a() const noexcept { return a_; }
    double sigma() const noexcept { return sigma_; }
    double c() const noexcept { return c_; }
    double lambda() const noexcept { return lambda_; }

    // 2a / sigma^2
    double gamma() const noexcept;

    // Diffusion coefficient sigma^2 u^2 / 2 of the generator.
    double diffusion(double u) const noexcept { return 0.5 * sigma_ * sigma_ * u * u; }
    // Drift coefficient a u - c of the generator.
    double drift(double u) const noexcept { return a_ * u - c_; }

    bool payout_free() const noexcept { return c_ == 0.0; }

    ModelParams with_payout(double c) const { return {a_, sigma_, c, lambda_}; }
    ModelParams with_intensity(double lambda) const { return {a_, sigma_, c_, lambda}; }

private:
    double a_;
    double sigma_;
    double c_;
    double lambda_;
};

// 2a / sigma^2 without any validation; used to report why a parameter set
// was rejected.
double gamma_of(double a, double sigma) noexcept;

// Parameters of the jump-free diffusion dY = (aY - c)dt + sigma Y dW used by
// the small-capital bound. Unlike ModelParams this carries no jump intensity
// and no net-profit requirement.
struct DiffusionParams {
    double a = 0.0;
    double sigma = 0.0;
    double c = 0.0;

    static DiffusionParams of(const ModelParams& p) { return {p.a(), p.sigma(), p.c()}; }
};

} // namespace survival

#include "survival/io.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <ostream>

namespace survival {

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_solution_csv(const Solution& solution, std::ostream& os)
{
    os << "u,phi\n";
    const auto u = solution.grid.nodes();
    for (std::size_t i = 0; i < u.size(); ++i)
        os << format_double(u[i]) << ',' << format_double(solution.phi.values[i]) << '\n';
    os << "inf," << format_double(solution.phi.far_field) << '\n';
}

std::string solution_diagnostics_json(const Solution& solution)
{
    nlohmann::ordered_json j;
    j["iterations"] = solution.iterations;
    j["residual_norm"] = solution.residual_norm;
    j["u_max_used"] = solution.u_max_used;
    j["nodes"] = solution.grid.size();
    auto deltas = nlohmann::ordered_json::array();
    for (const auto& r : solution.diagnostics)
        deltas.push_back({{"iteration", r.iteration}, {"sup_delta", r.sup_delta}, {"u_max", r.u_max}});
    j["deltas"] = std::move(deltas);
    if (auto slope = tail_slope(solution))
        j["tail_slope_exploratory"] = *slope;
    else
        j["tail_slope_exploratory"] = nullptr;
    j["warnings"] = solution.warnings;
    return j.dump(2) + "\n";
}

std::string estimate_json(const SurvivalEstimate& e)
{
    nlohmann::ordered_json j;
    j["lower"] = e.lower;
    j["upper"] = e.upper;
    j["stderr"] = e.std_error;
    j["n_paths"] = e.n_paths;
    j["indeterminate"] = e.indeterminate;
    return j.dump(2) + "\n";
}

} // namespace survival

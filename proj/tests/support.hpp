#pragma once

#include <survival/jumps.hpp>
#include <survival/model.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace testing {

// a = 0.15, sigma = 0.3, c = 1, lambda = 2 with Exp(1) jumps.
inline survival::ModelParams acceptance_params() { return {0.15, 0.3, 1.0, 2.0}; }
inline survival::JumpDistribution acceptance_jumps() { return survival::make_exponential(1.0); }

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000)
{
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
    return s * h / 3.0;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("survival_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing

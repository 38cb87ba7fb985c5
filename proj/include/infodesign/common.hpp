#ifndef INFODESIGN_COMMON_HPP
#define INFODESIGN_COMMON_HPP

#include <stdexcept>
#include <string>

namespace infodesign {

inline constexpr double default_tol = 1e-9;
inline constexpr double merge_tol = 1e-12;

/// Ex-ante expected payoff pair (buyer, seller).
struct PayoffPoint {
    double pi_b = 0.0;
    double pi_s = 0.0;
};

/// Malformed or invalid input (CLI exit code 2).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested target is not implementable (CLI exit code 4).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
    infeasible_error(const std::string& what, double distance)
        : std::runtime_error(what), distance_(distance) {}
    double distance() const { return distance_; }

private:
    double distance_ = 0.0;
};

}  // namespace infodesign

#endif

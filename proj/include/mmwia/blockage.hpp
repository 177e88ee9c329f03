#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace mmwia {

/// h(r) = p for r <= R_c, 0 otherwise.
struct LosBall {
    double radius_m = 100.0;
    double prob = 1.0;
};

/// h(r) = exp(-r / mu).
struct ExponentialBlockage {
    double mu_m = 100.0;
};

/// LOS probability as a function of link length.
class BlockageModel {
public:
    using Variant = std::variant<LosBall, ExponentialBlockage>;

    BlockageModel(LosBall b);
    BlockageModel(ExponentialBlockage b);

    const Variant& variant() const noexcept { return v_; }
    bool is_los_ball() const noexcept { return std::holds_alternative<LosBall>(v_); }

    /// h(r); r must be >= 0.
    double los_probability(double r) const;

    /// Distances at which h is discontinuous.
    std::vector<double> breakpoints() const;

    /// Largest distance at which h can be nonzero (+inf if unbounded).
    double los_support() const;

    /// Short tag used in CSV rows and CLI specs, e.g. "losball:100:0.5".
    std::string label() const;

    /// Parses "losball:RC:P" or "exp:MU" (also accepts "exponential:MU").
    static BlockageModel parse(const std::string& spec);

private:
    Variant v_;
};

/// h(r) as a free function.
inline double los_probability(double r, const BlockageModel& model) {
    return model.los_probability(r);
}

}  // namespace mmwia

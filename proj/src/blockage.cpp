#include "mmwia/blockage.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mmwia/errors.hpp"

namespace mmwia {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

BlockageModel::BlockageModel(LosBall b) : v_(b) {
    if (!(b.radius_m > 1.0) || !std::isfinite(b.radius_m))
        throw ConfigError("blockage radius_rc_m must exceed 1 m", "radius_rc_m");
    if (!(b.prob >= 0.0 && b.prob <= 1.0))
        throw ConfigError("blockage prob_p must lie in [0, 1]", "prob_p");
}

BlockageModel::BlockageModel(ExponentialBlockage b) : v_(b) {
    if (!(b.mu_m > 0.0) || !std::isfinite(b.mu_m))
        throw ConfigError("blockage mu_m must be > 0", "mu_m");
}

double BlockageModel::los_probability(double r) const {
    return std::visit(Overloaded{
                          [r](const LosBall& b) { return r <= b.radius_m ? b.prob : 0.0; },
                          [r](const ExponentialBlockage& e) { return std::exp(-r / e.mu_m); },
                      },
                      v_);
}

std::vector<double> BlockageModel::breakpoints() const {
    if (const auto* b = std::get_if<LosBall>(&v_)) return {b->radius_m};
    return {};
}

double BlockageModel::los_support() const {
    if (const auto* b = std::get_if<LosBall>(&v_)) return b->prob > 0.0 ? b->radius_m : 0.0;
    return std::numeric_limits<double>::infinity();
}

std::string BlockageModel::label() const {
    return std::visit(Overloaded{
                          [](const LosBall& b) {
                              return "losball:" + fmt_num(b.radius_m) + ":" + fmt_num(b.prob);
                          },
                          [](const ExponentialBlockage& e) { return "exp:" + fmt_num(e.mu_m); },
                      },
                      v_);
}

BlockageModel BlockageModel::parse(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    auto num = [&](std::size_t i) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(parts.at(i), &pos);
            if (pos != parts[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("malformed blockage spec '" + spec + "'", "blockage");
        }
    };
    if (parts.size() == 3 && (parts[0] == "losball" || parts[0] == "los_ball"))
        return BlockageModel(LosBall{num(1), num(2)});
    if (parts.size() == 2 && (parts[0] == "exp" || parts[0] == "exponential"))
        return BlockageModel(ExponentialBlockage{num(1)});
    throw ConfigError("unknown blockage spec '" + spec + "' (use losball:RC:P or exp:MU)",
                      "blockage");
}

}  // namespace mmwia

#pragma once

#include <cmath>

#include "mfbo/errors.hpp"

namespace mfbo {

inline constexpr double kLowFidelity = 0.0;
inline constexpr double kHighFidelity = 1.0;

/// Two information sources: the ground-truth experiment at l = 1 and cost 1,
/// and a cheap approximation at l = 0 and cost rho.
class FidelityModel {
public:
    static FidelityModel two_level(double rho) {
        if (!(rho > 0.0) || rho > 1.0)
            throw ConfigError("cost ratio rho must lie in (0, 1]");
        FidelityModel m;
        m.rho_ = rho;
        return m;
    }

    double rho() const { return rho_; }

    double cost(double level) const {
        if (level == kHighFidelity) return 1.0;
        if (level == kLowFidelity) return rho_;
        throw ConfigError("unknown fidelity level");
    }

    double low() const { return kLowFidelity; }
    double high() const { return kHighFidelity; }

private:
    FidelityModel() = default;
    double rho_ = 1.0;
};

} // namespace mfbo

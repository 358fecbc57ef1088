// spectral.hpp — Spectral densities and the reaction-coordinate parameter mapping.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rcjc/errors.hpp"

namespace rcjc {

// J_SB(ω) = αΓω₀²ω / ((ω₀² − ω²)² + Γ²ω²)
struct UnderdampedSD {
    double alpha = 0.0;
    double Gamma = 0.0;
    double omega0 = 1.0;

    void validate() const {
        if (!(alpha >= 0)) throw InvalidArgument("underdamped SD: alpha must be >= 0");
        if (!(Gamma >= 0)) throw InvalidArgument("underdamped SD: Gamma must be >= 0");
        if (!(omega0 > 0)) throw InvalidArgument("underdamped SD: omega0 must be > 0");
    }
};

// J_RC(ω) = γω e^{−|ω|/Λ}, odd in ω.
struct OhmicRcSD {
    double gamma = 0.0;
    double Lambda = kInfLambda;

    static constexpr double kInfLambda = std::numeric_limits<double>::infinity();

    void validate() const {
        if (!(gamma >= 0)) throw InvalidArgument("Ohmic SD: gamma must be >= 0");
        if (!(Lambda > 0)) throw InvalidArgument("Ohmic SD: Lambda must be > 0 or infinite");
    }
};

struct RcParams {
    double lambda = 0.0;
    double Omega = 1.0;
    OhmicRcSD residual;

    void validate() const {
        if (!(Omega > 0)) throw InvalidArgument("RC frequency Omega must be > 0");
        if (!(lambda >= 0)) throw InvalidArgument("RC coupling lambda must be >= 0");
        residual.validate();
    }
    // Energy decay rate of the RC, Γ = 2πγΩ.
    double Gamma() const { return 2.0 * std::numbers::pi * residual.gamma * Omega; }
};

inline double eval_underdamped(const UnderdampedSD& sd, double omega) {
    sd.validate();
    if (!(omega >= 0)) throw InvalidArgument("eval_underdamped: omega must be >= 0");
    const double w02 = sd.omega0 * sd.omega0;
    const double d = w02 - omega * omega;
    const double den = d * d + sd.Gamma * sd.Gamma * omega * omega;
    if (omega == 0.0) return 0.0;
    if (den == 0.0) {
        std::ostringstream os;
        os << "underdamped spectral density has a pole at omega = " << omega << " (Gamma = 0)";
        throw InvalidArgument(os.str());
    }
    return sd.alpha * sd.Gamma * w02 * omega / den;
}

inline RcParams map_to_rc(const UnderdampedSD& sd, double Lambda = OhmicRcSD::kInfLambda) {
    sd.validate();
    RcParams rc;
    rc.Omega = sd.omega0;
    rc.lambda = std::sqrt(std::numbers::pi * sd.alpha * sd.omega0 / 2.0);
    rc.residual.gamma = sd.Gamma / (2.0 * std::numbers::pi * sd.omega0);
    rc.residual.Lambda = Lambda;
    rc.validate();
    return rc;
}

// J_SB = 4γΩ²λ²ω / ((Ω² − ω²)² + (2πγΩω)²)
inline double reconstruct_sb(const RcParams& rc, double omega) {
    rc.validate();
    if (!(omega >= 0)) throw InvalidArgument("reconstruct_sb: omega must be >= 0");
    if (omega == 0.0) return 0.0;
    const double g = rc.residual.gamma;
    const double o2 = rc.Omega * rc.Omega;
    const double d = o2 - omega * omega;
    const double damp = 2.0 * std::numbers::pi * g * rc.Omega * omega;
    const double den = d * d + damp * damp;
    if (den == 0.0) {
        std::ostringstream os;
        os << "reconstructed spectral density has a pole at omega = " << omega << " (gamma = 0)";
        throw InvalidArgument(os.str());
    }
    return 4.0 * g * o2 * rc.lambda * rc.lambda * omega / den;
}

inline double eval_ohmic(const OhmicRcSD& sd, double xi) {
    const double cut = std::isinf(sd.Lambda) ? 1.0 : std::exp(-std::abs(xi) / sd.Lambda);
    return sd.gamma * xi * cut;
}

struct RateFactors {
    double coth_weighted;  // J(ξ) coth(βξ/2)
    double bare;           // J(ξ)
};

inline RateFactors rate_factor(const OhmicRcSD& sd, double xi, double beta) {
    if (!(beta > 0)) throw InvalidArgument("rate_factor: beta must be > 0");
    const double small = std::isinf(beta) ? 0.0 : 1e-9 / beta;
    if (std::abs(xi) < small || xi == 0.0) return {std::isinf(beta) ? 0.0 : 2.0 * sd.gamma / beta, 0.0};
    const double j = eval_ohmic(sd, xi);
    const double th = std::isinf(beta) ? (xi > 0 ? 1.0 : -1.0) : std::tanh(beta * xi / 2.0);
    return {j / th, j};
}

}  // namespace rcjc

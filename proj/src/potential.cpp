#include "rpslab/potential.hpp"

#include <cmath>

#include "rpslab/errors.hpp"

namespace rps {

PotentialProfile PotentialProfile::gaussian(double V0, double sigma) {
    PotentialProfile p{Kind::gaussian_well, V0, sigma};
    p.validate();
    return p;
}

PotentialProfile PotentialProfile::exponential(double V0, double sigma) {
    PotentialProfile p{Kind::exponential_well, V0, sigma};
    p.validate();
    return p;
}

void PotentialProfile::validate() const {
    if (!(depth >= 0.0) || !std::isfinite(depth)) throw ConfigError("potential depth must be >= 0");
    if (kind != Kind::none && (!(width > 0.0) || !std::isfinite(width)))
        throw ConfigError("potential width must be > 0");
}

double PotentialProfile::value(double r2) const {
    switch (kind) {
    case Kind::gaussian_well: return -depth * std::exp(-r2 / (width * width));
    case Kind::exponential_well: return -depth * std::exp(-std::sqrt(r2) / width);
    default: return 0.0;
    }
}

double PotentialProfile::dvdr_over_r(double r2) const {
    switch (kind) {
    case Kind::gaussian_well:
        return 2.0 * depth / (width * width) * std::exp(-r2 / (width * width));
    case Kind::exponential_well: {
        const double r = std::sqrt(r2);
        if (r == 0.0) return 0.0;
        return depth / width * std::exp(-r / width) / r;
    }
    default: return 0.0;
    }
}

std::string to_string(PotentialProfile::Kind k) {
    switch (k) {
    case PotentialProfile::Kind::gaussian_well: return "gaussian_well";
    case PotentialProfile::Kind::exponential_well: return "exponential_well";
    default: return "none";
    }
}

PotentialProfile::Kind potential_kind_from_string(const std::string& s) {
    if (s == "gaussian_well" || s == "gaussian") return PotentialProfile::Kind::gaussian_well;
    if (s == "exponential_well" || s == "exponential") return PotentialProfile::Kind::exponential_well;
    if (s == "none" || s == "zero") return PotentialProfile::Kind::none;
    throw SchemaError("unknown potential kind '" + s + "'");
}

} // namespace rps

#include "rhmod/scattering.hpp"

#include <cmath>
#include <limits>

namespace rhmod {

double Singularity::distance(cplx z) const {
    if (kind == Kind::Point) return std::abs(z - at);
    // distance to the ray {at + s*dir : s >= 0}
    cplx d = z - at;
    double s = d.real() * dir.real() + d.imag() * dir.imag();
    if (s <= 0) return std::abs(d);
    return std::abs(d - s * dir);
}

ScatteringData::ScatteringData(Expr f0, std::vector<Singularity> singularities, bool schwarz_symmetric)
    : f0_(std::move(f0)), f0p_(f0_.derivative()), sing_(std::move(singularities)), schwarz_(schwarz_symmetric) {}

ScatteringData ScatteringData::parse_f0(const std::string& text) {
    Expr e = Expr::parse(text);
    return ScatteringData(std::move(e), {}, true);
}

void ScatteringData::check_domain(cplx z) const {
    constexpr double tol = 1e-12;
    for (const auto& s : sing_) {
        if (s.distance(z) < tol)
            throw DomainError("evaluation at a declared singularity of f0");
    }
}

cplx ScatteringData::eval_f0(cplx z) const {
    check_domain(z);
    cplx v = f0_.eval(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DomainError("f0 evaluated to a non-finite value");
    return v;
}

cplx ScatteringData::eval_f(cplx z, double x, double t) const {
    return eval_f0(z) - x * z - 2.0 * t * z * z;
}

cplx ScatteringData::eval_f_prime(cplx z, double x, double t) const {
    check_domain(z);
    cplx v = f0p_.eval(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DomainError("f0' evaluated to a non-finite value");
    return v - x - 4.0 * t * z;
}

double ScatteringData::distance_to_singularities(cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : sing_) d = std::min(d, s.distance(z));
    return d;
}

double ScatteringData::schwarz_deviation(double scale) const {
    // fixed pseudo-random sample points; skip any near the singular set
    double worst = 0.0;
    unsigned long long state = 0x243f6a8885a308d3ull;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    for (int k = 0; k < 64; ++k) {
        cplx z(scale * (2.0 * next() - 1.0), scale * (2.0 * next() - 1.0));
        if (std::abs(z.imag()) < 1e-3 * scale) continue;
        if (distance_to_singularities(z) < 1e-3 * scale ||
            distance_to_singularities(std::conj(z)) < 1e-3 * scale)
            continue;
        cplx a = f0_.eval(std::conj(z));
        cplx b = std::conj(f0_.eval(z));
        if (!std::isfinite(a.real()) || !std::isfinite(b.real())) continue;
        worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
    }
    return worst;
}

} // namespace rhmod

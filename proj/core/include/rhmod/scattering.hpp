#pragma once

#include <optional>
#include <vector>

#include "rhmod/expr.hpp"
#include "rhmod/types.hpp"

namespace rhmod {

// A point or ray in the plane where f0 fails to be analytic. Rays describe
// branch cuts: all points origin + s*dir, s >= 0.
struct Singularity {
    enum class Kind { Point, Ray };
    Kind kind = Kind::Point;
    cplx at;
    cplx dir;   // unit direction, rays only

    double distance(cplx z) const;
};

// Scattering data: the analytic function f0 plus the (x,t) dependence
// f(z) = f0(z) - x z - 2 t z^2. All evaluations are pure.
class ScatteringData {
public:
    ScatteringData() = default;
    ScatteringData(Expr f0, std::vector<Singularity> singularities, bool schwarz_symmetric);

    // Parses the expression text; singularities stay empty (declare them
    // separately -- they are not auto-detected).
    static ScatteringData parse_f0(const std::string& text);

    cplx eval_f(cplx z, double x, double t) const;
    cplx eval_f_prime(cplx z, double x, double t) const;
    cplx eval_f0(cplx z) const;

    double distance_to_singularities(cplx z) const;

    // Samples |f0(conj z) - conj f0(z)| at points off the singular set and
    // returns the worst relative deviation. Used to check the flag.
    double schwarz_deviation(double scale) const;

    const Expr& f0() const { return f0_; }
    const std::vector<Singularity>& singularities() const { return sing_; }
    bool schwarz_symmetric() const { return schwarz_; }
    void set_singularities(std::vector<Singularity> s) { sing_ = std::move(s); }
    void set_schwarz(bool b) { schwarz_ = b; }

private:
    void check_domain(cplx z) const;

    Expr f0_;
    Expr f0p_;
    std::vector<Singularity> sing_;
    bool schwarz_ = true;
};

} // namespace rhmod

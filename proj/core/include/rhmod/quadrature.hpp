#pragma once

#include <functional>
#include <memory>
#include <shared_mutex>
#include <unordered_map>

#include "rhmod/geometry.hpp"
#include "rhmod/types.hpp"

namespace rhmod {

struct IntegralResult {
    cplx value{};
    double abs_error_estimate = 0;
    long evaluations = 0;
};

struct QuadratureOptions {
    double tol = 1e-12;          // absolute tolerance per integral
    long max_evals = 1000000;    // evaluation budget per integral
};

// Adaptive Gauss-Kronrod (G7,K15) panel integration along a path. Segments
// flagged with sqrt_sub_* are integrated in a cosine-substituted parameter,
// which regularizes (z-c)^(-1/2) endpoint behavior.
IntegralResult integrate_path(const std::function<cplx(cplx)>& f, const Path& path,
                              const QuadratureOptions& opts = {});

// Variant passing (segment index, local parameter, point); used by the
// R-table-backed loop integrals.
IntegralResult integrate_path_param(const std::function<cplx(int, double, cplx)>& f,
                                    const Path& path, const QuadratureOptions& opts = {});

// R(zeta)-aware integrals over the contour-system chains. Holds the radical
// and the per-path R tables (computed once per path, cached by content hash;
// concurrent reads, exclusive insert).
class ContourWorkspace {
public:
    ContourWorkspace(const ContourSystem& cs, QuadratureOptions opts = {});

    const ContourSystem& contours() const { return *cs_; }
    const Radical& radical() const { return rad_; }
    const QuadratureOptions& options() const { return opts_; }

    using RKernel = std::function<cplx(cplx zeta, cplx R)>;

    IntegralResult chain_integral(const Chain& chain, const RKernel& k) const;
    IntegralResult path_integral(const Path& path, bool sheet_tracked, const RKernel& k) const;

    // named kernels over a chain
    cplx moment(const Chain& chain, int k) const;                      // zeta^k / R
    cplx cauchy(const Chain& chain, cplx z) const;                     // 1/((zeta-z) R)
    cplx cauchy2(const Chain& chain, cplx z) const;                    // 1/((zeta-z)^2 R)
    cplx f_moment(const Chain& chain, const ScatteringData& sd, double x, double t, int k) const;
    cplx f_cauchy(const Chain& chain, const ScatteringData& sd, double x, double t, cplx z) const;
    cplx f_cauchy2(const Chain& chain, const ScatteringData& sd, double x, double t, cplx z) const;
    cplx fprime_cauchy(const Chain& chain, const ScatteringData& sd, double x, double t, cplx z) const;

    // same kernels over the outer loop
    Chain loop_all_chain() const;

    // guard: refuse Cauchy kernels with z within 10 eps of a chain path
    void check_kernel_distance(const Chain& chain, cplx z) const;

    std::shared_ptr<const RTable> table(const Path& path, bool sheet_tracked) const;

private:
    const ContourSystem* cs_;
    Radical rad_;
    QuadratureOptions opts_;
    mutable std::unordered_map<std::size_t, std::shared_ptr<const RTable>> cache_;
    mutable std::shared_mutex mutex_;
};

// Standalone loop integrals on a caller-supplied path (spec surface. The
// path must avoid the cuts of R.)
IntegralResult loop_moment(const Radical& rad, const Path& path, int k,
                           const QuadratureOptions& opts = {});
IntegralResult loop_cauchy(const Radical& rad, const Path& path, cplx z,
                           const QuadratureOptions& opts = {});
IntegralResult loop_f_moment(const Radical& rad, const Path& path, const ScatteringData& sd,
                             double x, double t, int k, const QuadratureOptions& opts = {});
IntegralResult loop_f_cauchy(const Radical& rad, const Path& path, const ScatteringData& sd,
                             double x, double t, cplx z, const QuadratureOptions& opts = {});

// R values sampled along a path with branch continuity (diagnostic surface).
std::vector<std::pair<cplx, cplx>> radical_on_path(const Radical& rad, const Path& path,
                                                   int samples);

// For z inside the designated loops, the loop Cauchy integrals reduce to
// +-2 times segment integrals between a branchpoint and its conjugate
// (N = 1 only). Reports both sides and their discrepancy.
struct SegmentReductionReport {
    cplx loop_m_value{}, seg_m_value{};   // seg side already scaled by -2
    cplx loop_c_value{}, seg_c_value{};   // scaled by +2
    double discrepancy_m = 0, discrepancy_c = 0;
};
SegmentReductionReport segment_reduction_check(const ContourWorkspace& ws, cplx z_in_m, cplx z_in_c);

} // namespace rhmod

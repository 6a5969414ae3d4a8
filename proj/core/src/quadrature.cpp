#include "rhmod/quadrature.hpp"

#include <cfloat>
#include <cmath>
#include <cstring>
#include <mutex>
#include <vector>

namespace rhmod {

namespace {

// QUADPACK 7-15 Gauss-Kronrod pair on [-1,1]
constexpr double XGK[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr double WGK[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
constexpr double WG[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct Panel {
    double u0, u1;
    cplx val;
    double err;
};

// one G7/K15 evaluation of F over [u0,u1]
template <typename F>
Panel gk15(const F& f, double u0, double u1) {
    double c = 0.5 * (u0 + u1), h = 0.5 * (u1 - u0);
    cplx k15 = WGK[7] * f(c);
    cplx g7 = WG[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        cplx fp = f(c + h * XGK[i]);
        cplx fm = f(c - h * XGK[i]);
        k15 += WGK[i] * (fp + fm);
        if (i % 2 == 1) g7 += WG[i / 2] * (fp + fm);
    }
    Panel p;
    p.u0 = u0;
    p.u1 = u1;
    p.val = h * k15;
    p.err = std::abs(h * (k15 - g7));
    return p;
}

// adaptive integral of F over u in [0,1]
template <typename F>
void adapt01(const F& f, double tol, long max_evals, IntegralResult& acc) {
    std::vector<Panel> stack;
    stack.push_back(gk15(f, 0.0, 1.0));
    acc.evaluations += 15;
    cplx total = 0;
    double toterr = 0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        double local_tol = tol * (p.u1 - p.u0);
        // panels cannot beat double precision relative to their own magnitude
        double floor_tol = 1e-14 * std::abs(p.val);
        if (p.err <= std::max(local_tol, floor_tol) || p.u1 - p.u0 < 1e-14 ||
            acc.evaluations + 30 > max_evals) {
            total += p.val;
            toterr += p.err;
            continue;
        }
        double um = 0.5 * (p.u0 + p.u1);
        stack.push_back(gk15(f, p.u0, um));
        stack.push_back(gk15(f, um, p.u1));
        acc.evaluations += 30;
    }
    acc.value += total;
    acc.abs_error_estimate += toterr;
}

} // namespace

IntegralResult integrate_path_param(const std::function<cplx(int, double, cplx)>& f,
                                    const Path& path, const QuadratureOptions& opts) {
    IntegralResult res;
    double seg_tol = opts.tol / static_cast<double>(path.segs.size());
    long budget = opts.max_evals / static_cast<long>(path.segs.size());
    for (int si = 0; si < static_cast<int>(path.segs.size()); ++si) {
        const Segment& seg = path.segs[si];
        bool sub = seg.sqrt_sub_start || seg.sqrt_sub_end;
        auto integrand = [&](double u) -> cplx {
            double t = u, dtdu = 1.0;
            if (sub) {
                t = 0.5 * (1.0 - std::cos(PI * u));
                dtdu = 0.5 * PI * std::sin(PI * u);
            }
            cplx z = seg.point(t);
            return f(si, t, z) * seg.velocity(t) * dtdu;
        };
        adapt01(integrand, seg_tol, budget, res);
    }
    return res;
}

IntegralResult integrate_path(const std::function<cplx(cplx)>& f, const Path& path,
                              const QuadratureOptions& opts) {
    return integrate_path_param([&](int, double, cplx z) { return f(z); }, path, opts);
}

// --------------------------------------------------------- ContourWorkspace

namespace {
std::size_t hash_doubles(const double* d, std::size_t n, std::size_t seed) {
    std::size_t h = seed ^ 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &d[i], sizeof bits);
        h ^= bits;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::size_t path_hash(const Path& p, std::size_t seed) {
    std::size_t h = seed;
    for (const auto& s : p.segs) {
        double data[10] = {static_cast<double>(static_cast<int>(s.kind)),
                           s.a.real(), s.a.imag(), s.b.real(), s.b.imag(),
                           s.center.real(), s.center.imag(), s.radius, s.th0, s.th1};
        h = hash_doubles(data, 10, h);
    }
    return h;
}
} // namespace

ContourWorkspace::ContourWorkspace(const ContourSystem& cs, QuadratureOptions opts)
    : cs_(&cs), rad_(cs), opts_(opts) {}

std::shared_ptr<const RTable> ContourWorkspace::table(const Path& path, bool sheet_tracked) const {
    std::size_t bps_seed = 0;
    for (cplx a : rad_.bps().upper) {
        double d[2] = {a.real(), a.imag()};
        bps_seed = hash_doubles(d, 2, bps_seed);
    }
    std::size_t key = path_hash(path, bps_seed) ^ (sheet_tracked ? 0x9e3779b97f4a7c15ull : 0);
    {
        std::shared_lock lk(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto tab = std::make_shared<RTable>(rad_, path, sheet_tracked);
    std::unique_lock lk(mutex_);
    return cache_.emplace(key, std::move(tab)).first->second;
}

IntegralResult ContourWorkspace::path_integral(const Path& path, bool sheet_tracked,
                                               const RKernel& k) const {
    auto tab = table(path, sheet_tracked);
    return integrate_path_param(
        [&](int si, double t, cplx z) { return k(z, tab->eval(si, t, z)); }, path, opts_);
}

IntegralResult ContourWorkspace::chain_integral(const Chain& chain, const RKernel& k) const {
    IntegralResult total;
    for (const auto& p : chain.paths) {
        IntegralResult r = path_integral(p, chain.sheet_tracked, k);
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
    }
    if (total.abs_error_estimate > 1e4 * opts_.tol * (1.0 + std::abs(total.value)))
        throw NumericsError("loop integral failed to reach tolerance within budget");
    return total;
}

Chain ContourWorkspace::loop_all_chain() const {
    Chain c;
    c.paths.push_back(cs_->loop_all);
    return c;
}

void ContourWorkspace::check_kernel_distance(const Chain& chain, cplx z) const {
    double lim = std::max(10 * DBL_EPSILON * rad_.scale(), 1e-13 * rad_.scale());
    for (const auto& p : chain.paths)
        if (p.distance(z) < lim)
            throw DomainError("Cauchy kernel point sits on an integration contour; deform first");
}

cplx ContourWorkspace::moment(const Chain& chain, int k) const {
    return chain_integral(chain, [k](cplx z, cplx R) {
        cplx zk = 1.0;
        for (int i = 0; i < k; ++i) zk *= z;
        return zk / R;
    }).value;
}

cplx ContourWorkspace::cauchy(const Chain& chain, cplx z) const {
    check_kernel_distance(chain, z);
    return chain_integral(chain, [z](cplx zeta, cplx R) { return 1.0 / ((zeta - z) * R); }).value;
}

cplx ContourWorkspace::cauchy2(const Chain& chain, cplx z) const {
    check_kernel_distance(chain, z);
    return chain_integral(chain, [z](cplx zeta, cplx R) {
        cplx d = zeta - z;
        return 1.0 / (d * d * R);
    }).value;
}

cplx ContourWorkspace::f_moment(const Chain& chain, const ScatteringData& sd, double x, double t,
                                int k) const {
    return chain_integral(chain, [&, k](cplx z, cplx R) {
        cplx zk = 1.0;
        for (int i = 0; i < k; ++i) zk *= z;
        return zk * sd.eval_f(z, x, t) / R;
    }).value;
}

cplx ContourWorkspace::f_cauchy(const Chain& chain, const ScatteringData& sd, double x, double t,
                                cplx z) const {
    check_kernel_distance(chain, z);
    return chain_integral(chain, [&, z](cplx zeta, cplx R) {
        return sd.eval_f(zeta, x, t) / ((zeta - z) * R);
    }).value;
}

cplx ContourWorkspace::f_cauchy2(const Chain& chain, const ScatteringData& sd, double x, double t,
                                 cplx z) const {
    check_kernel_distance(chain, z);
    return chain_integral(chain, [&, z](cplx zeta, cplx R) {
        cplx d = zeta - z;
        return sd.eval_f(zeta, x, t) / (d * d * R);
    }).value;
}

cplx ContourWorkspace::fprime_cauchy(const Chain& chain, const ScatteringData& sd, double x,
                                     double t, cplx z) const {
    check_kernel_distance(chain, z);
    return chain_integral(chain, [&, z](cplx zeta, cplx R) {
        return sd.eval_f_prime(zeta, x, t) / ((zeta - z) * R);
    }).value;
}

// ------------------------------------------------------- standalone surface

namespace {
IntegralResult with_table(const Radical& rad, const Path& path,
                          const std::function<cplx(cplx, cplx)>& k, const QuadratureOptions& opts) {
    RTable tab(rad, path, false);
    return integrate_path_param(
        [&](int si, double t, cplx z) { return k(z, tab.eval(si, t, z)); }, path, opts);
}
} // namespace

IntegralResult loop_moment(const Radical& rad, const Path& path, int k,
                           const QuadratureOptions& opts) {
    return with_table(rad, path, [k](cplx z, cplx R) {
        cplx zk = 1.0;
        for (int i = 0; i < k; ++i) zk *= z;
        return zk / R;
    }, opts);
}

IntegralResult loop_cauchy(const Radical& rad, const Path& path, cplx z,
                           const QuadratureOptions& opts) {
    double lim = std::max(10 * DBL_EPSILON * rad.scale(), 1e-13 * rad.scale());
    if (path.distance(z) < lim)
        throw DomainError("Cauchy kernel point sits on the integration path");
    return with_table(rad, path, [z](cplx zeta, cplx R) { return 1.0 / ((zeta - z) * R); }, opts);
}

IntegralResult loop_f_moment(const Radical& rad, const Path& path, const ScatteringData& sd,
                             double x, double t, int k, const QuadratureOptions& opts) {
    return with_table(rad, path, [&, k](cplx z, cplx R) {
        cplx zk = 1.0;
        for (int i = 0; i < k; ++i) zk *= z;
        return zk * sd.eval_f(z, x, t) / R;
    }, opts);
}

IntegralResult loop_f_cauchy(const Radical& rad, const Path& path, const ScatteringData& sd,
                             double x, double t, cplx z, const QuadratureOptions& opts) {
    double lim = std::max(10 * DBL_EPSILON * rad.scale(), 1e-13 * rad.scale());
    if (path.distance(z) < lim)
        throw DomainError("Cauchy kernel point sits on the integration path");
    return with_table(rad, path, [&, z](cplx zeta, cplx R) {
        return sd.eval_f(zeta, x, t) / ((zeta - z) * R);
    }, opts);
}

std::vector<std::pair<cplx, cplx>> radical_on_path(const Radical& rad, const Path& path,
                                                   int samples) {
    RTable tab(rad, path, false);
    std::vector<std::pair<cplx, cplx>> out;
    out.reserve(samples + 1);
    int nseg = static_cast<int>(path.segs.size());
    for (int k = 0; k <= samples; ++k) {
        double s = (static_cast<double>(k) / samples) * nseg;
        int si = std::min(static_cast<int>(s), nseg - 1);
        double t = s - si;
        cplx z = path.segs[si].point(t);
        out.emplace_back(z, tab.eval(si, t, z));
    }
    // continuity along the path (adjacent samples must not flip branch)
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
        cplx r = out[k + 1].second / out[k].second;
        if (std::abs(std::arg(r)) > PI / 2 && std::abs(r) > 0.1)
            throw NumericsError("R samples lost continuity along the path");
    }
    return out;
}

// --------------------------------------------------- segment reduction check

SegmentReductionReport segment_reduction_check(const ContourWorkspace& ws, cplx z_in_m,
                                               cplx z_in_c) {
    const ContourSystem& cs = ws.contours();
    if (cs.bps.N != 1)
        throw DomainError("segment reduction check is defined for N = 1");
    const Radical& rad = ws.radical();
    SegmentReductionReport rep;

    rep.loop_m_value = ws.cauchy(cs.loops_m[0], z_in_m);
    rep.loop_c_value = ws.cauchy(cs.loops_c[0], z_in_c);

    // -2 * integral over [conj a0, a0] with the + boundary value of R
    {
        cplx a = std::conj(cs.bps.point(0)), b = cs.bps.point(0);
        Path seg;
        Segment s = Segment::line(a, b);
        s.sqrt_sub_start = s.sqrt_sub_end = true;
        seg.segs.push_back(s);
        // boundary-value table along the cut
        const int M = 512;
        std::vector<cplx> zs(M + 1), Rs(M + 1);
        for (int i = 0; i <= M; ++i) zs[i] = a + (b - a) * ((i + 0.5) / (M + 1.0));
        Rs[M / 2] = rad.plus_boundary(a, b, (M / 2 + 0.5) / (M + 1.0));
        for (int i = M / 2; i < M; ++i) Rs[i + 1] = rad.continue_step(zs[i], Rs[i], zs[i + 1]);
        for (int i = M / 2; i > 0; --i) Rs[i - 1] = rad.continue_step(zs[i], Rs[i], zs[i - 1]);
        auto res = integrate_path_param(
            [&](int, double t, cplx z) {
                int i = std::clamp(static_cast<int>(t * (M + 1.0) - 0.5), 0, M);
                cplx R = rad.continue_step(zs[i], Rs[i], z);
                return 1.0 / ((z - z_in_m) * R);
            },
            seg, ws.options());
        rep.seg_m_value = -2.0 * res.value;
    }
    rep.discrepancy_m = std::abs(rep.loop_m_value - rep.seg_m_value);

    // +2 * integral over [conj a4, a4] with the plane branch of R
    {
        cplx a = std::conj(cs.bps.point(4)), b = cs.bps.point(4);
        Path seg;
        Segment s = Segment::line(a, b);
        s.sqrt_sub_start = s.sqrt_sub_end = true;
        seg.segs.push_back(s);
        RTable tab(rad, seg, false);
        auto res = integrate_path_param(
            [&](int si, double t, cplx z) { return 1.0 / ((z - z_in_c) * tab.eval(si, t, z)); },
            seg, ws.options());
        rep.seg_c_value = 2.0 * res.value;
    }
    rep.discrepancy_c = std::abs(rep.loop_c_value - rep.seg_c_value);
    return rep;
}

} // namespace rhmod

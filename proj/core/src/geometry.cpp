#include "rhmod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rhmod {

namespace {
double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double point_segment_distance(cplx z, cplx a, cplx b) {
    cplx d = b - a;
    double L2 = std::norm(d);
    if (L2 == 0.0) return std::abs(z - a);
    double t = std::clamp(((z - a).real() * d.real() + (z - a).imag() * d.imag()) / L2, 0.0, 1.0);
    return std::abs(z - (a + t * d));
}

// open segment intersection test; near-degenerate hits report -1
int segments_cross(cplx p0, cplx p1, cplx q0, cplx q1, double eps = 1e-9) {
    cplx r = p1 - p0, s = q1 - q0;
    double den = cross(r, s);
    double scale = std::abs(r) * std::abs(s);
    if (std::abs(den) < 1e-14 * scale) return 0;
    double t = cross(q0 - p0, s) / den;
    double u = cross(q0 - p0, r) / den;
    if (t <= -eps || t >= 1 + eps || u <= -eps || u >= 1 + eps) return 0;
    if (t < eps || t > 1 - eps || u < eps || u > 1 - eps) return -1;
    return 1;
}
} // namespace

// ------------------------------------------------------------ BranchpointSet

BranchpointSet::BranchpointSet(int genus_param, std::vector<cplx> upper_points)
    : N(genus_param), upper(std::move(upper_points)) {
    if (static_cast<int>(upper.size()) != 2 * N + 1)
        throw DomainError("branchpoint set needs 2N+1 upper points");
    validate();
}

std::vector<cplx> BranchpointSet::all_points() const {
    std::vector<cplx> out;
    out.reserve(upper.size() * 2);
    for (cplx a : upper) {
        out.push_back(a);
        out.push_back(std::conj(a));
    }
    return out;
}

double BranchpointSet::scale() const {
    cplx c = centroid();
    double s = 0.0;
    for (cplx a : all_points()) s = std::max(s, std::abs(a - c));
    return std::max(s, 1e-30);
}

double BranchpointSet::min_gap() const {
    auto pts = all_points();
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) g = std::min(g, std::abs(pts[i] - pts[j]));
    return g;
}

cplx BranchpointSet::centroid() const {
    cplx c = 0;
    for (cplx a : all_points()) c += a;
    return c / static_cast<double>(4 * N + 2);
}

void BranchpointSet::validate() const {
    for (cplx a : upper)
        if (!(a.imag() > 0))
            throw DomainError("branchpoints must lie strictly in the upper half-plane");
    if (min_gap() <= 1e-10)
        throw DomainError("branchpoints too close (min pairwise distance <= 1e-10)");
}

// ------------------------------------------------------------------ Segment

Segment Segment::line(cplx a, cplx b) {
    Segment s;
    s.kind = Kind::Line;
    s.a = a;
    s.b = b;
    return s;
}

Segment Segment::arc(cplx center, double radius, double th0, double th1) {
    Segment s;
    s.kind = Kind::Arc;
    s.center = center;
    s.radius = radius;
    s.th0 = th0;
    s.th1 = th1;
    return s;
}

cplx Segment::point(double t) const {
    if (kind == Kind::Line) return a + t * (b - a);
    double th = th0 + t * (th1 - th0);
    return center + radius * std::polar(1.0, th);
}

cplx Segment::velocity(double t) const {
    if (kind == Kind::Line) return b - a;
    double th = th0 + t * (th1 - th0);
    return cplx(0, 1) * (th1 - th0) * radius * std::polar(1.0, th);
}

double Segment::length() const {
    if (kind == Kind::Line) return std::abs(b - a);
    return std::abs(th1 - th0) * radius;
}

Segment Segment::reversed() const {
    Segment s = *this;
    if (kind == Kind::Line) std::swap(s.a, s.b);
    else std::swap(s.th0, s.th1);
    std::swap(s.sqrt_sub_start, s.sqrt_sub_end);
    return s;
}

double Path::length() const {
    double L = 0;
    for (const auto& s : segs) L += s.length();
    return L;
}

Path Path::reversed() const {
    Path p;
    p.closed = closed;
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) p.segs.push_back(it->reversed());
    return p;
}

void Path::validate(double tol) const {
    if (segs.empty()) throw DomainError("empty path");
    for (std::size_t i = 0; i + 1 < segs.size(); ++i)
        if (std::abs(segs[i].point(1.0) - segs[i + 1].point(0.0)) > tol)
            throw DomainError("path pieces do not join");
    if (closed && std::abs(end() - start()) > tol)
        throw DomainError("closed path does not close");
}

double Path::distance(cplx z, int samples_per_seg) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : segs) {
        cplx prev = s.point(0.0);
        for (int k = 1; k <= samples_per_seg; ++k) {
            cplx cur = s.point(static_cast<double>(k) / samples_per_seg);
            d = std::min(d, point_segment_distance(z, prev, cur));
            prev = cur;
        }
    }
    return d;
}

// ------------------------------------------------------------------ winding

namespace {
double arg_sweep(const Segment& seg, double t0, double t1, cplx z, double on_tol, int depth) {
    cplx p0 = seg.point(t0) - z, p1 = seg.point(t1) - z;
    double d0 = std::abs(p0), d1 = std::abs(p1);
    if (d0 < on_tol || d1 < on_tol) throw DomainError("point lies on a contour");
    if (depth > 48) throw NumericsError("winding number subdivision did not converge");
    double chord = std::abs(p1 - p0);
    if (chord < 0.5 * std::min(d0, d1)) return std::arg(p1 / p0);
    double tm = 0.5 * (t0 + t1);
    return arg_sweep(seg, t0, tm, z, on_tol, depth + 1) + arg_sweep(seg, tm, t1, z, on_tol, depth + 1);
}
} // namespace

int winding_number(const Path& path, cplx z, double on_tol) {
    double total = 0;
    for (const auto& s : path.segs) total += arg_sweep(s, 0.0, 1.0, z, on_tol, 0);
    double w = total / (2 * PI);
    int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 0.25) throw NumericsError("winding number failed to settle (point too close to contour?)");
    return wi;
}

// ------------------------------------------------------- contour construction

namespace {

Path polyline_path(const std::vector<cplx>& pts) {
    Path p;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) p.segs.push_back(Segment::line(pts[i], pts[i + 1]));
    p.validate(1e-14 * (1.0 + std::abs(pts.front())));
    return p;
}

std::vector<cplx> path_points(const Path& p) {
    std::vector<cplx> pts{p.segs.front().point(0.0)};
    for (const auto& s : p.segs) pts.push_back(s.point(1.0));
    return pts;
}

std::vector<cplx> reflect_reverse(const std::vector<cplx>& pts) {
    std::vector<cplx> out;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) out.push_back(std::conj(*it));
    return out;
}

// clockwise capsule at distance m around an open polyline; optionally the
// path starts at the midpoint of the left offset (used by the ovals so the
// continuation anchor sits on the plane branch of R).
Path capsule_cw(const std::vector<cplx>& pts, double m, bool start_left_mid) {
    const std::size_t n = pts.size();
    if (n < 2) throw DomainError("capsule needs at least 2 points");
    std::vector<cplx> dir(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cplx d = pts[i + 1] - pts[i];
        if (std::abs(d) == 0.0) throw DomainError("degenerate polyline edge");
        dir[i] = d / std::abs(d);
    }
    for (std::size_t i = 0; i + 2 < n; ++i) {
        double c = dir[i].real() * dir[i + 1].real() + dir[i].imag() * dir[i + 1].imag();
        if (c < 0.5) throw DomainError("polyline arc turns too sharply for loop construction");
    }
    auto offset_side = [&](double sgn) {
        // miter-joined offset polyline on the left (sgn=+1) or right (sgn=-1)
        std::vector<cplx> off(n);
        off[0] = pts[0] + sgn * m * cplx(0, 1) * dir[0];
        off[n - 1] = pts[n - 1] + sgn * m * cplx(0, 1) * dir[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            cplx nv = cplx(0, 1) * (dir[i - 1] + dir[i]);
            nv /= std::abs(nv);
            double c = 1.0 + dir[i - 1].real() * dir[i].real() + dir[i - 1].imag() * dir[i].imag();
            off[i] = pts[i] + sgn * nv * m * std::sqrt(2.0 / c);
        }
        return off;
    };
    std::vector<cplx> left = offset_side(+1.0), right = offset_side(-1.0);
    double angs = std::arg(dir[0]), ange = std::arg(dir[n - 2]);

    // clockwise circuit: left side forward, cap at the far end, right side
    // backward, cap at the start
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < n; ++i) segs.push_back(Segment::line(left[i], left[i + 1]));
    segs.push_back(Segment::arc(pts[n - 1], m, ange + PI / 2, ange - PI / 2));
    for (std::size_t i = n - 1; i > 0; --i) segs.push_back(Segment::line(right[i], right[i - 1]));
    segs.push_back(Segment::arc(pts[0], m, angs + 3 * PI / 2, angs + PI / 2));

    Path p;
    p.closed = true;
    if (!start_left_mid || n != 2) {
        p.segs = std::move(segs);
    } else {
        // split the single left segment at its midpoint and rotate the cycle
        cplx midL = 0.5 * (left[0] + left[1]);
        p.segs.push_back(Segment::line(midL, left[1]));
        for (std::size_t i = 1; i < segs.size(); ++i) p.segs.push_back(segs[i]);
        p.segs.push_back(Segment::line(left[0], midL));
    }
    p.validate(1e-12 * (1.0 + m + std::abs(pts[0])));
    return p;
}

Path rounded_rect_cw(double x0, double x1, double y0, double y1, double r) {
    std::vector<Segment> ccw = {
        Segment::line(cplx(x0 + r, y0), cplx(x1 - r, y0)),
        Segment::arc(cplx(x1 - r, y0 + r), r, -PI / 2, 0),
        Segment::line(cplx(x1, y0 + r), cplx(x1, y1 - r)),
        Segment::arc(cplx(x1 - r, y1 - r), r, 0, PI / 2),
        Segment::line(cplx(x1 - r, y1), cplx(x0 + r, y1)),
        Segment::arc(cplx(x0 + r, y1 - r), r, PI / 2, PI),
        Segment::line(cplx(x0, y1 - r), cplx(x0, y0 + r)),
        Segment::arc(cplx(x0 + r, y0 + r), r, PI, 3 * PI / 2),
    };
    Path p;
    p.closed = true;
    p.segs = std::move(ccw);
    p = p.reversed();
    p.validate(1e-12 * (1.0 + std::abs(x1) + std::abs(y1)));
    return p;
}

void check_arc_singularity_clearance(const Path& arc, const ScatteringData& sd, double clearance) {
    for (const auto& s : arc.segs)
        for (int k = 0; k <= 32; ++k)
            if (sd.distance_to_singularities(s.point(k / 32.0)) < clearance)
                throw DomainError("arc passes too close to a declared singularity of f0");
}

} // namespace

std::vector<std::pair<cplx, cplx>> ContourSystem::cut_segments() const {
    std::vector<std::pair<cplx, cplx>> cuts;
    for (const auto& chain : main_arcs)
        for (const auto& piece : chain.pieces)
            for (const auto& s : piece.segs) {
                if (s.kind != Segment::Kind::Line)
                    throw DomainError("main arcs must be polylines");
                cuts.emplace_back(s.a, s.b);
            }
    return cuts;
}

int ContourSystem::comp_arc_side(int k, cplx z) const {
    double best = std::numeric_limits<double>::infinity();
    int side = 0;
    for (const auto& piece : comp_arcs[k].pieces)
        for (const auto& s : piece.segs) {
            double d = point_segment_distance(z, s.a, s.b);
            if (d < best) {
                best = d;
                side = cross(s.b - s.a, z - s.a) >= 0 ? +1 : -1;
            }
        }
    return side;
}

LocationFlags ContourSystem::point_location(cplx z) const {
    if (!loops_built) throw DomainError("loops not built");
    double on_tol = 1e-12 * (1.0 + bps.scale());
    LocationFlags fl;
    fl.inside_all = winding_number(loop_all, z, on_tol) != 0;
    fl.inside_m.resize(loops_m.size());
    fl.inside_c.resize(loops_c.size());
    fl.comp_side.assign(loops_c.size(), 0);
    for (std::size_t i = 0; i < loops_m.size(); ++i) {
        int w = 0;
        for (const auto& p : loops_m[i].paths) w += winding_number(p, z, on_tol);
        fl.inside_m[i] = w != 0;
    }
    for (std::size_t i = 0; i < loops_c.size(); ++i) {
        int w = 0;
        for (const auto& p : loops_c[i].paths) w += winding_number(p, z, on_tol);
        fl.inside_c[i] = w != 0;
        if (fl.inside_c[i]) fl.comp_side[i] = comp_arc_side(static_cast<int>(i), z);
    }
    return fl;
}

ContourSystem build_arc_system(const BranchpointSet& bps, const GeometryOptions& opts,
                               const ScatteringData* sd) {
    bps.validate();
    ContourSystem cs;
    cs.bps = bps;
    cs.margin = opts.margin > 0 ? opts.margin : 0.15 * bps.min_gap();
    const int N = bps.N;

    auto custom_or_segment = [&](const std::optional<std::vector<std::vector<cplx>>>& cust,
                                 int idx, cplx a, cplx b) -> std::vector<cplx> {
        if (cust && idx < static_cast<int>(cust->size()) && !(*cust)[idx].empty()) {
            const auto& pts = (*cust)[idx];
            double tol = 1e-9 * (1.0 + bps.scale());
            if (std::abs(pts.front() - a) > tol || std::abs(pts.back() - b) > tol)
                throw DomainError("custom arc endpoints do not match branchpoints");
            return pts;
        }
        return {a, b};
    };

    // main arc 0: conj a0 -> a0, crossing the real axis
    {
        ArcChain chain;
        auto pts = custom_or_segment(opts.custom_main, 0, std::conj(bps.point(0)), bps.point(0));
        chain.pieces.push_back(polyline_path(pts));
        cs.main_arcs.push_back(std::move(chain));
    }
    for (int k = 1; k <= N; ++k) {
        ArcChain chain;
        auto up = custom_or_segment(opts.custom_main, k, bps.point(4 * k - 2), bps.point(4 * k));
        chain.pieces.push_back(polyline_path(up));
        chain.pieces.push_back(polyline_path(reflect_reverse(up)));   // a_{4k+1} -> a_{4k-1}
        cs.main_arcs.push_back(std::move(chain));
    }
    for (int k = 1; k <= N; ++k) {
        ArcChain chain;
        auto up = custom_or_segment(opts.custom_comp, k - 1, bps.point(4 * k - 4), bps.point(4 * k - 2));
        chain.pieces.push_back(polyline_path(up));
        chain.pieces.push_back(polyline_path(reflect_reverse(up)));   // a_{4k-1} -> a_{4k-3}
        cs.comp_arcs.push_back(std::move(chain));
    }

    // arcs must not cross each other (shared endpoints excepted)
    std::vector<std::pair<cplx, cplx>> edges;
    auto add_edges = [&](const ArcChain& c) {
        for (const auto& p : c.pieces)
            for (const auto& s : p.segs) edges.emplace_back(s.a, s.b);
    };
    for (const auto& c : cs.main_arcs) add_edges(c);
    for (const auto& c : cs.comp_arcs) add_edges(c);
    for (std::size_t i = 0; i < edges.size(); ++i)
        for (std::size_t j = i + 1; j < edges.size(); ++j)
            if (segments_cross(edges[i].first, edges[i].second, edges[j].first, edges[j].second) == 1)
                throw DomainError("arcs intersect; supply custom arcs for this configuration");

    if (sd) {
        for (const auto& c : cs.main_arcs)
            for (const auto& p : c.pieces) check_arc_singularity_clearance(p, *sd, cs.margin / 2);
        for (const auto& c : cs.comp_arcs)
            for (const auto& p : c.pieces) check_arc_singularity_clearance(p, *sd, cs.margin / 2);
    }
    return cs;
}

void build_loops(ContourSystem& cs, double margin, const ScatteringData* sd) {
    const int N = cs.bps.N;
    if (margin <= 0) margin = cs.margin;
    cs.margin = margin;
    cs.loops_m.clear();
    cs.loops_c.clear();

    for (int k = 1; k <= N; ++k) {
        Chain chain;
        for (const auto& piece : cs.main_arcs[k].pieces)
            chain.paths.push_back(capsule_cw(path_points(piece), margin, false));
        cs.loops_m.push_back(std::move(chain));
    }
    for (int k = 1; k <= N; ++k) {
        Chain chain;
        chain.sheet_tracked = true;
        for (const auto& piece : cs.comp_arcs[k - 1].pieces)
            chain.paths.push_back(capsule_cw(path_points(piece), margin, true));
        cs.loops_c.push_back(std::move(chain));
    }

    // loop_all: rounded rectangle at distance 2*margin around every arc point
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto extend = [&](const ArcChain& c) {
        for (const auto& p : c.pieces)
            for (cplx q : path_points(p)) {
                x0 = std::min(x0, q.real());
                x1 = std::max(x1, q.real());
                y0 = std::min(y0, q.imag());
                y1 = std::max(y1, q.imag());
            }
    };
    for (const auto& c : cs.main_arcs) extend(c);
    for (const auto& c : cs.comp_arcs) extend(c);
    cs.loop_all = rounded_rect_cw(x0 - 2 * margin, x1 + 2 * margin, y0 - 2 * margin, y1 + 2 * margin, margin);
    cs.loops_built = true;

    // containment checks: each loop encloses exactly its own branchpoints
    double on_tol = 1e-12 * (1.0 + cs.bps.scale());
    auto pts = cs.bps.all_points();
    auto owners_m = [&](int k) {
        return std::vector<int>{4 * k - 2, 4 * k, 4 * k + 1, 4 * k - 1};
    };
    auto owners_c = [&](int k) {
        return std::vector<int>{4 * k - 4, 4 * k - 2, 4 * k - 1, 4 * k - 3};
    };
    auto check_chain = [&](const Chain& chain, const std::vector<int>& owners, const char* what) {
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            int w = 0;
            for (const auto& p : chain.paths) w += winding_number(p, pts[i], on_tol);
            bool owner = std::find(owners.begin(), owners.end(), i) != owners.end();
            if (owner && std::abs(w) != 1)
                throw DomainError(std::string(what) + ": loop fails to enclose its arc endpoints (margin too large or too small)");
            if (!owner && w != 0)
                throw DomainError(std::string(what) + ": loop encloses a foreign branchpoint (margin too large)");
        }
    };
    for (int k = 1; k <= N; ++k) check_chain(cs.loops_m[k - 1], owners_m(k), "main loop");
    for (int k = 1; k <= N; ++k) check_chain(cs.loops_c[k - 1], owners_c(k), "complementary loop");
    for (cplx p : pts)
        if (winding_number(cs.loop_all, p, on_tol) == 0)
            throw DomainError("outer loop fails to enclose a branchpoint");

    if (sd) {
        auto clearance_ok = [&](const Path& path) {
            for (const auto& s : path.segs)
                for (int k = 0; k <= 32; ++k)
                    if (sd->distance_to_singularities(s.point(k / 32.0)) < margin / 2)
                        return false;
            return true;
        };
        for (const auto& chain : cs.loops_m)
            for (const auto& p : chain.paths)
                if (!clearance_ok(p)) throw DomainError("loop passes too close to a singularity of f0");
        for (const auto& chain : cs.loops_c)
            for (const auto& p : chain.paths)
                if (!clearance_ok(p)) throw DomainError("loop passes too close to a singularity of f0");
        if (!clearance_ok(cs.loop_all))
            throw DomainError("outer loop passes too close to a singularity of f0");
        for (const auto& sing : sd->singularities()) {
            bool inside = false;
            try {
                inside = winding_number(cs.loop_all, sing.at, on_tol) != 0;
            } catch (const DomainError&) {
                inside = true;
            }
            if (inside) throw DomainError("declared singularity of f0 lies inside the outer loop");
        }
    }
}

ContourSystem build_contours(const BranchpointSet& bps, const GeometryOptions& opts,
                             const ScatteringData* sd) {
    ContourSystem cs = build_arc_system(bps, opts, sd);
    build_loops(cs, cs.margin, sd);
    return cs;
}

// ------------------------------------------------------------------- Radical

Radical::Radical(const BranchpointSet& bps, std::vector<std::pair<cplx, cplx>> cuts)
    : bps_(bps), all_(bps.all_points()), cuts_(std::move(cuts)), centroid_(bps.centroid()),
      scale_(bps.scale()) {}

int Radical::crossing_parity(cplx anchor, cplx z) const {
    // Does [anchor, z] cross the cut [c0, c1]? Formulated through the side
    // of z relative to the cut line, which stays fully conditioned even for
    // z within 1e-12 of the cut (the ray is ~1e6 long, so intersection
    // parameters along it are useless).
    int count = 0;
    for (const auto& [c0, c1] : cuts_) {
        cplx d = c1 - c0;
        double len = std::abs(d);
        double sz = cross(d, z - c0) / len;        // signed distance of z
        double sa = cross(d, anchor - c0) / len;   // signed distance of anchor
        if (std::abs(sz) < 1e-13 * scale_) return -1;   // z on the cut line
        if (std::abs(sa) < 1e-13 * scale_) return -1;   // anchor on the cut line
        if (sz * sa > 0) continue;                      // same side: no crossing
        // crossing point parameter along the cut
        cplx r = z - anchor;
        double den = cross(r, d);
        if (std::abs(den) < 1e-14 * std::abs(r) * len) return -1;   // parallel
        double tt = cross(c0 - anchor, r) / den;
        if (tt <= -1e-11 || tt >= 1 + 1e-11) continue;
        if (tt < 1e-9 || tt > 1 - 1e-9) return -1;   // through a branchpoint: retry
        ++count;
    }
    return count % 2;
}

cplx Radical::continue_ray(cplx anchor, cplx z) const {
    // value at the anchor from the principal product; |a_i/anchor| << 1
    cplx logR = static_cast<double>(bps_.degree()) * std::log(anchor);
    for (cplx a : all_) logR += 0.5 * std::log(1.0 - a / anchor);

    cplx zeta = anchor;
    for (int iter = 0; iter < 4000; ++iter) {
        if (zeta == z) break;
        double dmin = std::numeric_limits<double>::infinity();
        for (cplx a : all_) dmin = std::min(dmin, std::abs(zeta - a));
        double remaining = std::abs(z - zeta);
        double step = std::min(remaining, 0.35 * dmin);
        cplx next = (step >= remaining) ? z : zeta + step * (z - zeta) / remaining;
        for (cplx a : all_) logR += 0.5 * std::log((next - a) / (zeta - a));
        zeta = next;
    }
    if (zeta != z) throw NumericsError("radical continuation did not reach the target");
    return std::exp(logR);
}

cplx Radical::operator()(cplx z) const {
    for (const auto& [c0, c1] : cuts_)
        if (point_segment_distance(z, c0, c1) < 1e-12 * scale_)
            throw DomainError("radical evaluated on a branch cut");
    for (cplx a : all_)
        if (z == a) return 0.0;

    cplx base_dir = z - centroid_;
    if (std::abs(base_dir) < 1e-12 * scale_) base_dir = cplx(0.37, 1.0);
    base_dir /= std::abs(base_dir);
    static const double rots[] = {0.0, 0.41, -0.41, 0.93, -0.93, 1.71, -1.71, 2.60, -2.60, 3.14};
    for (double rot : rots) {
        cplx dir = base_dir * std::polar(1.0, rot);
        cplx anchor = z + dir * (1e6 * scale_);
        int parity = crossing_parity(anchor, z);
        if (parity < 0) continue;
        cplx v = continue_ray(anchor, z);
        return parity ? -v : v;
    }
    throw NumericsError("no admissible anchor ray for radical continuation");
}

cplx Radical::continue_step(cplx z0, cplx R0, cplx z1) const {
    // bisect until each factor's swept angle stays small
    for (cplx a : all_) {
        cplx r = (z1 - a) / (z0 - a);
        if (std::abs(std::arg(r)) > 2.6) {
            cplx zm = 0.5 * (z0 + z1);
            cplx Rm = continue_step(z0, R0, zm);
            return continue_step(zm, Rm, z1);
        }
    }
    cplx logr = 0;
    for (cplx a : all_) logr += 0.5 * std::log((z1 - a) / (z0 - a));
    return R0 * std::exp(logr);
}

cplx Radical::plus_boundary(cplx a, cplx b, double t) const {
    cplx d = (b - a) / std::abs(b - a);
    cplx nv = cplx(0, 1) * d;
    cplx mid = 0.5 * (a + b);
    double eps = 1e-7 * scale_;
    // Richardson in the offset kills the O(eps) error of the one-sided limit
    cplx r1 = (*this)(mid + eps * nv);
    cplx r2 = (*this)(mid + 0.5 * eps * nv);
    cplx Rmid = 2.0 * r2 - r1;
    // continue along the open segment; the boundary value extends continuously
    cplx target = a + t * (b - a);
    cplx zeta = mid, R = Rmid;
    for (int iter = 0; iter < 4000; ++iter) {
        if (zeta == target) break;
        double dmin = std::numeric_limits<double>::infinity();
        for (cplx p : all_) dmin = std::min(dmin, std::abs(zeta - p));
        double remaining = std::abs(target - zeta);
        double step = std::min(remaining, 0.35 * dmin);
        cplx next = (step >= remaining) ? target : zeta + step * (target - zeta) / remaining;
        cplx logr = 0;
        for (cplx p : all_) logr += 0.5 * std::log((next - p) / (zeta - p));
        R *= std::exp(logr);
        zeta = next;
    }
    return R;
}

// -------------------------------------------------------------------- RTable

RTable::RTable(const Radical& rad, const Path& path, bool sheet_tracked) : rad_(&rad) {
    // sample parameters per segment, refined so consecutive nodes are close
    // relative to the nearest branchpoint
    const auto& all = rad.all_;
    auto dmin = [&](cplx z) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx a : all) d = std::min(d, std::abs(z - a));
        return d;
    };
    for (int si = 0; si < static_cast<int>(path.segs.size()); ++si) {
        const Segment& seg = path.segs[si];
        std::vector<double> ts;
        for (int k = 0; k < 12; ++k) ts.push_back(k / 12.0);
        for (std::size_t k = 0; k + 1 < ts.size();) {
            cplx z0 = seg.point(ts[k]), z1 = seg.point(ts[k + 1]);
            if (std::abs(z1 - z0) > 0.3 * std::min(dmin(z0), dmin(z1)) && ts.size() < 4000) {
                ts.insert(ts.begin() + static_cast<long>(k) + 1, 0.5 * (ts[k] + ts[k + 1]));
            } else {
                ++k;
            }
        }
        for (double t : ts) {
            cplx z = seg.point(t);
            bool at_branchpoint = false;
            for (cplx a : all)
                if (std::abs(z - a) < 1e-13 * (1.0 + std::abs(a))) at_branchpoint = true;
            if (at_branchpoint) continue;   // keep nodes off the zeros of R
            s_.push_back(si + t);
            z_.push_back(z);
        }
    }

    // anchor where R is best conditioned; sheet-tracked paths are built so
    // their start point carries the plane branch, anchor there
    std::size_t anchor = 0;
    if (!sheet_tracked) {
        double best = -1;
        for (std::size_t k = 0; k < z_.size(); ++k) {
            double d = dmin(z_[k]);
            if (d > best) {
                best = d;
                anchor = k;
            }
        }
    }
    R_.resize(z_.size());
    R_[anchor] = rad(z_[anchor]);
    for (std::size_t k = anchor; k + 1 < z_.size(); ++k) {
        cplx logr = 0;
        for (cplx a : all) logr += 0.5 * std::log((z_[k + 1] - a) / (z_[k] - a));
        R_[k + 1] = R_[k] * std::exp(logr);
    }
    for (std::size_t k = anchor; k > 0; --k) {
        cplx logr = 0;
        for (cplx a : all) logr += 0.5 * std::log((z_[k - 1] - a) / (z_[k] - a));
        R_[k - 1] = R_[k] * std::exp(logr);
    }
    if (path.closed) {
        cplx logr = 0;
        for (cplx a : all) logr += 0.5 * std::log((z_.front() - a) / (z_.back() - a));
        monodromy_defect_ = std::abs(R_.back() * std::exp(logr) / R_.front() - 1.0);
        if (monodromy_defect_ > 1e-8)
            throw NumericsError(sheet_tracked
                ? "complementary loop crosses the cuts inconsistently (adjust margin)"
                : "loop unexpectedly crosses a branch cut (adjust margin)");
    }
    if (!sheet_tracked && z_.size() > 4) {
        // spot-check that continuation along the path agrees with the plane
        // branch away from the anchor
        std::size_t probe = (anchor + z_.size() / 2) % z_.size();
        cplx direct = rad(z_[probe]);
        if (std::abs(direct - R_[probe]) > 1e-6 * std::abs(direct))
            throw NumericsError("path continuation left the plane branch of R (contour crosses a cut?)");
    }
}

cplx RTable::eval(int seg, double t, cplx z) const {
    double s = seg + t;
    auto it = std::lower_bound(s_.begin(), s_.end(), s);
    std::size_t k = static_cast<std::size_t>(std::distance(s_.begin(), it));
    if (k >= s_.size()) k = s_.size() - 1;
    if (k > 0 && (k == s_.size() || std::abs(s_[k] - s) > std::abs(s_[k - 1] - s))) --k;
    return rad_->continue_step(z_[k], R_[k], z);
}

} // namespace rhmod

#pragma once

#include <optional>
#include <vector>

#include "rhmod/scattering.hpp"
#include "rhmod/types.hpp"

namespace rhmod {

// The 2N+1 upper-half-plane branchpoints a_0, a_2, ..., a_4N. Conjugates are
// implied: a_{2k+1} = conj a_{2k}.
struct BranchpointSet {
    int N = 0;
    std::vector<cplx> upper;   // size 2N+1

    BranchpointSet() = default;
    BranchpointSet(int genus_param, std::vector<cplx> upper_points);

    // a_i for i = 0..4N+1 in the paper's indexing
    cplx point(int i) const {
        return (i % 2 == 0) ? upper[i / 2] : std::conj(upper[(i - 1) / 2]);
    }
    std::vector<cplx> all_points() const;

    int degree() const { return 2 * N + 1; }   // R ~ z^(2N+1) at infinity
    double scale() const;
    double min_gap() const;
    cplx centroid() const;

    void validate() const;   // distinct (gap > 1e-10), Im > 0
};

// One smooth piece of a contour: a straight segment or a circular arc.
// Parameterized by t in [0,1]. For arcs the sweep th0 -> th1 may run either
// way; th1 < th0 gives clockwise traversal.
struct Segment {
    enum class Kind { Line, Arc };
    Kind kind = Kind::Line;
    cplx a, b;                 // line endpoints
    cplx center;               // arc
    double radius = 0, th0 = 0, th1 = 0;
    bool sqrt_sub_start = false;   // integrand has (z-c)^(-1/2) endpoint behavior
    bool sqrt_sub_end = false;

    static Segment line(cplx a, cplx b);
    static Segment arc(cplx center, double radius, double th0, double th1);

    cplx point(double t) const;
    cplx velocity(double t) const;   // dz/dt
    double length() const;
    Segment reversed() const;
};

struct Path {
    std::vector<Segment> segs;
    bool closed = false;

    cplx start() const { return segs.front().point(0.0); }
    cplx end() const { return segs.back().point(1.0); }
    double length() const;
    Path reversed() const;
    void validate(double tol = 1e-12) const;   // consecutive endpoints coincide

    // minimum distance from z to the path (sampled; adequate for clearance
    // checks and on-contour detection)
    double distance(cplx z, int samples_per_seg = 64) const;
};

// Winding number of a closed path about z (exact up to adaptive chord
// subdivision). Throws DomainError if z lies on the path.
int winding_number(const Path& path, cplx z, double on_tol);

// A group of paths integrated together (e.g. the two stadium loops around
// the two pieces of a main arc, or the two ovals of a complementary loop).
struct Chain {
    std::vector<Path> paths;
    bool sheet_tracked = false;   // ovals: R continued through the cuts
};

struct ArcChain {
    std::vector<Path> pieces;
};

struct LocationFlags {
    bool inside_all = false;
    std::vector<bool> inside_m;    // per loops_m chain
    std::vector<bool> inside_c;    // per loops_c chain (inside either oval)
    std::vector<int> comp_side;    // +1 left of the oriented comp arc, -1 right, 0 n/a
};

struct ContourSystem {
    BranchpointSet bps;
    double margin = 0.0;

    std::vector<ArcChain> main_arcs;   // size N+1; [0] is the axis-crossing arc
    std::vector<ArcChain> comp_arcs;   // size N
    std::vector<Chain> loops_m;        // size N
    std::vector<Chain> loops_c;        // size N (closed ovals, sheet-tracked)
    Path loop_all;                     // single loop around every arc
    bool loops_built = false;

    // straight sub-segments of all main arcs; the branch cuts of R
    std::vector<std::pair<cplx, cplx>> cut_segments() const;

    LocationFlags point_location(cplx z) const;
    // side of the comp arc k nearest to z: +1 left, -1 right
    int comp_arc_side(int k, cplx z) const;
};

struct GeometryOptions {
    double margin = -1.0;   // <= 0: use 0.15 * min pairwise distance
    // optional custom polyline arcs; key layout documented in config.cpp
    std::optional<std::vector<std::vector<cplx>>> custom_main;  // N+1 polylines (upper pieces; [0] full)
    std::optional<std::vector<std::vector<cplx>>> custom_comp;  // N polylines (upper pieces)
};

// Arcs only (loops_built = false). Straight segments by default; custom
// polylines must connect the same endpoints. Lower-half arcs are Schwarz
// reflections of the upper ones.
ContourSystem build_arc_system(const BranchpointSet& bps, const GeometryOptions& opts = {},
                               const ScatteringData* sd = nullptr);

// Adds the stadium loops, the complementary ovals and loop_all.
// Throws DomainError if the margin forces collisions with arcs,
// branchpoints or declared singularities.
void build_loops(ContourSystem& cs, double margin, const ScatteringData* sd = nullptr);

// Convenience: arcs + loops in one call.
ContourSystem build_contours(const BranchpointSet& bps, const GeometryOptions& opts = {},
                             const ScatteringData* sd = nullptr);

// ------------------------------------------------------------------ radical

// R(z) = sqrt(prod (z - a_i)), single-valued off the main-arc cuts,
// normalized so R(z)/z^(2N+1) -> 1 at infinity. Branch tracking: log
// increments along a ray from a far anchor; crossings of the cuts flip the
// sign once each (parity correction).
class Radical {
public:
    Radical(const BranchpointSet& bps, std::vector<std::pair<cplx, cplx>> cuts);
    explicit Radical(const ContourSystem& cs)
        : Radical(cs.bps, cs.cut_segments()) {}

    cplx operator()(cplx z) const;   // throws DomainError when z is on a cut

    // boundary value on the left of the oriented cut segment (a->b),
    // evaluated exactly on the segment
    cplx plus_boundary(cplx a, cplx b, double t) const;

    const BranchpointSet& bps() const { return bps_; }
    const std::vector<std::pair<cplx, cplx>>& cuts() const { return cuts_; }
    double scale() const { return scale_; }

    // continuation value at z1 given R(z0): single step; the straight
    // segment z0->z1 must be short relative to branchpoint distances
    cplx continue_step(cplx z0, cplx R0, cplx z1) const;

private:
    friend class RTable;
    cplx continue_ray(cplx anchor, cplx z) const;   // no parity correction
    int crossing_parity(cplx anchor, cplx z) const; // -1 -> degenerate ray

    BranchpointSet bps_;
    std::vector<cplx> all_;
    std::vector<std::pair<cplx, cplx>> cuts_;
    cplx centroid_;
    double scale_ = 1.0;
};

// Precomputed branch-consistent R samples along one path, with exact
// single-step continuation to arbitrary query points on the path.
// sheet_tracked paths continue straight through the cuts (two crossings
// per oval); others carry the plane branch everywhere.
class RTable {
public:
    RTable() = default;
    RTable(const Radical& rad, const Path& path, bool sheet_tracked);

    // R at the point z = path.segs[seg].point(t)
    cplx eval(int seg, double t, cplx z) const;

    double monodromy_defect() const { return monodromy_defect_; }

    // sampled values, primarily for radical_on_path-style inspection
    const std::vector<cplx>& nodes() const { return z_; }
    const std::vector<cplx>& values() const { return R_; }

private:
    const Radical* rad_ = nullptr;
    std::vector<double> s_;   // global parameter: seg index + local t
    std::vector<cplx> z_;
    std::vector<cplx> R_;
    double monodromy_defect_ = 0.0;
};

} // namespace rhmod

#include "polywave/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

namespace polywave {

namespace {

constexpr std::int32_t kNone = -1;

struct Tri {
    std::array<std::uint32_t, 3> v{};
    std::array<std::int32_t, 3> nb{kNone, kNone, kNone}; // nb[i] is across the edge opposite v[i]
    std::uint32_t version = 0;
    bool alive = false;
    bool inside = false;
};

struct Segment {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    bool alive = true;
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Positive when p lies strictly inside the circumcircle of the counterclockwise triangle (a, b, c).
double incircle(Point2 a, Point2 b, Point2 c, Point2 p) {
    const double adx = a.x - p.x, ady = a.y - p.y;
    const double bdx = b.x - p.x, bdy = b.y - p.y;
    const double cdx = c.x - p.x, cdy = c.y - p.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

// orient() with results within rounding of zero snapped to zero, so a point on an
// edge is seen as on it from both adjacent triangles.
double side(Point2 a, Point2 b, Point2 p) {
    const double o = orient(a, b, p);
    const double scale = std::max(std::abs(b.x - a.x) + std::abs(b.y - a.y), std::abs(p.x - a.x) + std::abs(p.y - a.y));
    return std::abs(o) <= 1e-14 * scale * scale ? 0.0 : o;
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
    const Point2 u = b - a, w = c - a;
    const double d = 2.0 * cross(u, w);
    const double uu = dot(u, u), ww = dot(w, w);
    return {a.x + (w.y * uu - u.y * ww) / d, a.y + (u.x * ww - w.x * uu) / d};
}

class Refiner {
public:
    Refiner(const PolygonSpec& poly, const RefinementOptions& opt)
        : poly_(poly), opt_(opt), rng_(opt.seed) {
        cos_bound_ = std::cos(opt.min_angle_deg * std::numbers::pi / 180.0);
    }

    PlanarMesh run();

private:
    enum class Insert { ok, encroaches, outside };

    // ---- triangulation primitives
    std::int32_t new_tri(std::uint32_t a, std::uint32_t b, std::uint32_t c);
    void kill_tri(std::int32_t t);
    int edge_index(std::int32_t t, std::uint32_t a, std::uint32_t b) const;
    std::int32_t locate(Point2 p, std::int32_t start);
    bool find_edge(std::uint32_t a, std::uint32_t b, std::int32_t& t, int& i) const;
    bool is_segment(std::uint32_t a, std::uint32_t b) const {
        return seg_index_.count(edge_key(a, b)) != 0;
    }

    /// Bowyer-Watson insertion of a new vertex located in triangle t0. The
    /// cavity may not cross a segment other than `exempt`. When `encroached`
    /// is non-null the insertion is only simulated if p would encroach a
    /// segment on the cavity boundary, and those segments are reported.
    Insert insert(Point2 p, std::int32_t t0, std::uint64_t exempt, std::vector<std::uint32_t>* encroached,
                  std::uint32_t* vertex_out);

    // ---- mesh generation stages
    void sample_boundary();
    void insert_boundary();
    std::uint32_t stage(Point2 p) {
        staged_.push_back(p);
        staged_corner_.push_back(-1);
        return static_cast<std::uint32_t>(staged_.size() - 1);
    }
    void check_budget_staged() const {
        std::ostringstream msg;
        msg << "mesh exceeds the vertex budget of " << opt_.max_vertices << " vertices";
        throw InputError(msg.str());
    }
    void seed_lattice();
    void recover_segments();
    void classify();
    void refine();

    std::uint32_t add_vertex(Point2 p);
    void add_segment(std::uint32_t a, std::uint32_t b);
    void split_segment(std::uint32_t s);
    bool encroached(std::uint32_t s) const;
    bool bad(std::int32_t t) const;
    void check_budget() const;

    const PolygonSpec& poly_;
    const RefinementOptions& opt_;
    std::mt19937_64 rng_;
    double cos_bound_ = 0.0;

    std::vector<Point2> staged_;
    std::vector<std::int32_t> staged_corner_;
    std::vector<std::array<std::uint32_t, 2>> staged_segs_;

    std::vector<Point2> pts_;
    std::vector<std::int32_t> corner_;
    std::vector<std::int32_t> vtri_;
    std::vector<Tri> tris_;
    std::vector<std::int32_t> free_;
    std::vector<Segment> segs_;
    std::unordered_map<std::uint64_t, std::uint32_t> seg_index_;
    std::vector<std::int32_t> created_;
    std::int32_t last_ = 0;
    bool classified_ = false;
    std::deque<std::uint32_t> seg_queue_;
    std::deque<std::pair<std::int32_t, std::uint32_t>> tri_queue_;
};

std::int32_t Refiner::new_tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    std::int32_t t;
    if (!free_.empty()) {
        t = free_.back();
        free_.pop_back();
    } else {
        t = static_cast<std::int32_t>(tris_.size());
        tris_.emplace_back();
    }
    Tri& T = tris_[t];
    T.v = {a, b, c};
    T.nb = {kNone, kNone, kNone};
    T.alive = true;
    T.inside = false;
    ++T.version;
    vtri_[a] = vtri_[b] = vtri_[c] = t;
    return t;
}

void Refiner::kill_tri(std::int32_t t) {
    tris_[t].alive = false;
    ++tris_[t].version;
    free_.push_back(t);
}

int Refiner::edge_index(std::int32_t t, std::uint32_t a, std::uint32_t b) const {
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i) {
        const std::uint32_t p = v[(i + 1) % 3], q = v[(i + 2) % 3];
        if ((p == a && q == b) || (p == b && q == a)) return i;
    }
    return -1;
}

bool Refiner::find_edge(std::uint32_t a, std::uint32_t b, std::int32_t& t, int& i) const {
    // Rotate around a through its star until a triangle holding edge (a, b) turns up.
    const std::int32_t start = vtri_[a];
    std::int32_t cur = start;
    for (int dir = 0; dir < 2; ++dir) {
        cur = start;
        for (std::size_t guard = 0; guard < 4096 && cur != kNone; ++guard) {
            const int k = edge_index(cur, a, b);
            if (k >= 0) {
                t = cur;
                i = k;
                return true;
            }
            const auto& v = tris_[cur].v;
            const int ia = static_cast<int>(std::find(v.begin(), v.end(), a) - v.begin());
            // dir 0: counterclockwise around a (cross the edge (a, v[ia+1])); dir 1: clockwise.
            const int across = dir == 0 ? (ia + 2) % 3 : (ia + 1) % 3;
            cur = tris_[cur].nb[across];
            if (cur == start) break;
        }
    }
    return false;
}

std::int32_t Refiner::locate(Point2 p, std::int32_t start) {
    std::int32_t t = start;
    if (t < 0 || !tris_[t].alive) t = last_;
    if (!tris_[t].alive) {
        for (std::size_t k = 0; k < tris_.size(); ++k)
            if (tris_[k].alive) {
                t = static_cast<std::int32_t>(k);
                break;
            }
    }
    for (std::size_t guard = 0; guard < 10 * tris_.size() + 100; ++guard) {
        const auto& T = tris_[t];
        const int s = static_cast<int>(rng_() % 3);
        bool moved = false;
        for (int r = 0; r < 3; ++r) {
            const int i = (s + r) % 3;
            if (side(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) < 0.0) {
                if (T.nb[i] == kNone) throw NumericalError("mesh", "point location left the bounding box");
                t = T.nb[i];
                moved = true;
                break;
            }
        }
        if (!moved) return t;
    }
#ifdef POLYWAVE_DEBUG_MESH
    fprintf(stderr, "locate %.17g %.17g  npts %zu\n", p.x, p.y, pts_.size());
    for (int k = 0; k < 6; ++k) {
        const auto& T = tris_[t];
        fprintf(stderr, "tri %d: (%g %g) (%g %g) (%g %g)\n", t, pts_[T.v[0]].x, pts_[T.v[0]].y, pts_[T.v[1]].x, pts_[T.v[1]].y, pts_[T.v[2]].x, pts_[T.v[2]].y);
        for (int i = 0; i < 3; ++i) if (orient(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) < 0.0) { t = T.nb[i]; break; }
    }
#endif
    throw NumericalError("mesh", "point location did not terminate");
}

Refiner::Insert Refiner::insert(Point2 p, std::int32_t t0, std::uint64_t exempt, std::vector<std::uint32_t>* encroached,
                                std::uint32_t* vertex_out) {
    struct Boundary {
        std::uint32_t a, b;
        std::int32_t outer;
        bool inside;
    };
    std::vector<std::int32_t> cavity{t0};
    std::unordered_map<std::int32_t, bool> in_cavity{{t0, true}};
    const double scale = [&] {
        const auto& v = tris_[t0].v;
        return std::max({distance(pts_[v[0]], pts_[v[1]]), distance(pts_[v[1]], pts_[v[2]]),
                         distance(pts_[v[2]], pts_[v[0]])});
    }();
    const double flat_tol = 1e-12 * scale * scale;

    auto blocked = [&](std::uint32_t a, std::uint32_t b) {
        const auto key = edge_key(a, b);
        return key != exempt && seg_index_.count(key) != 0;
    };

    // Grow the cavity across non-segment edges into triangles whose circumcircle holds p.
    for (std::size_t k = 0; k < cavity.size(); ++k) {
        const Tri& T = tris_[cavity[k]];
        for (int i = 0; i < 3; ++i) {
            const std::int32_t n = T.nb[i];
            if (n == kNone || in_cavity.count(n)) continue;
            const std::uint32_t a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
            if (blocked(a, b)) continue;
            const Tri& N = tris_[n];
            const bool on_edge = std::abs(orient(pts_[a], pts_[b], p)) <= flat_tol;
            if (on_edge || incircle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], p) > 0.0) {
                in_cavity.emplace(n, true);
                cavity.push_back(n);
            }
        }
    }

    std::vector<Boundary> boundary;
    for (int attempt = 0;; ++attempt) {
        boundary.clear();
        std::int32_t grow = kNone;
        for (std::int32_t t : cavity) {
            const Tri& T = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const std::int32_t n = T.nb[i];
                if (n != kNone && in_cavity.count(n)) continue;
                const std::uint32_t a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
                if (orient(pts_[a], pts_[b], p) <= flat_tol) {
                    // p does not see this edge: the cavity must swallow the triangle beyond it.
                    if (n == kNone || blocked(a, b)) {
                        if (encroached && blocked(a, b)) {
                            encroached->push_back(seg_index_.at(edge_key(a, b)));
                            return Insert::encroaches;
                        }
#ifdef POLYWAVE_DEBUG_MESH
                        fprintf(stderr, "p=(%.17g %.17g) a=(%.17g %.17g) b=(%.17g %.17g) o=%g tol=%g n=%d seg=%d exempt=%d\n", p.x, p.y,
                                pts_[a].x, pts_[a].y, pts_[b].x, pts_[b].y, orient(pts_[a], pts_[b], p), flat_tol, n,
                                (int)is_segment(a, b), (int)(edge_key(a, b) == exempt));
#endif
                        throw NumericalError("mesh", "degenerate insertion cavity");
                    }
                    grow = n;
                }
                boundary.push_back({a, b, n, T.inside});
            }
        }
        if (grow == kNone) break;
        if (attempt > 64) throw NumericalError("mesh", "could not repair insertion cavity");
        in_cavity.emplace(grow, true);
        cavity.push_back(grow);
    }
    if (boundary.size() != cavity.size() + 2) throw NumericalError("mesh", "insertion cavity is not a disk");

    if (encroached) {
        for (const auto& e : boundary) {
            if (!is_segment(e.a, e.b)) continue;
            if (dot(pts_[e.a] - p, pts_[e.b] - p) < 0.0) encroached->push_back(seg_index_.at(edge_key(e.a, e.b)));
        }
        if (!encroached->empty()) return Insert::encroaches;
    }

    const std::uint32_t v = add_vertex(p);
    if (vertex_out) *vertex_out = v;
    for (std::int32_t t : cavity) kill_tri(t);

    created_.clear();
    for (const auto& e : boundary) {
        const std::int32_t t = new_tri(v, e.a, e.b);
        tris_[t].inside = e.inside;
        tris_[t].nb[0] = e.outer;
        if (e.outer != kNone) tris_[e.outer].nb[edge_index(e.outer, e.a, e.b)] = t;
        created_.push_back(t);
    }
    // Link the fan: the edge (b, v) of one new triangle is the edge (v, a) of the next.
    for (std::size_t x = 0; x < created_.size(); ++x) {
        Tri& T = tris_[created_[x]];
        for (std::size_t y = 0; y < created_.size(); ++y) {
            if (x == y) continue;
            const Tri& U = tris_[created_[y]];
            if (U.v[1] == T.v[2]) T.nb[1] = created_[y];
            if (U.v[2] == T.v[1]) T.nb[2] = created_[y];
        }
    }
    last_ = created_.front();
#ifdef POLYWAVE_DEBUG_MESH
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        const Tri& T = tris_[t];
        if (!T.alive) continue;
        if (orient(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]) <= 0) throw NumericalError("mesh", "debug: inverted");
        for (int i = 0; i < 3; ++i) {
            if (T.nb[i] == kNone) continue;
            const Tri& N = tris_[T.nb[i]];
            if (!N.alive || edge_index(T.nb[i], T.v[(i + 1) % 3], T.v[(i + 2) % 3]) < 0 ||
                N.nb[edge_index(T.nb[i], T.v[(i + 1) % 3], T.v[(i + 2) % 3])] != static_cast<std::int32_t>(t))
                throw NumericalError("mesh", "debug: adjacency");
        }
    }
#endif
    return Insert::ok;
}

std::uint32_t Refiner::add_vertex(Point2 p) {
    pts_.push_back(p);
    corner_.push_back(-1);
    vtri_.push_back(kNone);
    return static_cast<std::uint32_t>(pts_.size() - 1);
}

void Refiner::add_segment(std::uint32_t a, std::uint32_t b) {
    seg_index_[edge_key(a, b)] = static_cast<std::uint32_t>(segs_.size());
    segs_.push_back({a, b, true});
}

void Refiner::check_budget() const {
    if (pts_.size() > opt_.max_vertices + 4) {
        std::ostringstream msg;
        msg << "mesh exceeds the vertex budget of " << opt_.max_vertices << " vertices";
        throw InputError(msg.str());
    }
}

bool Refiner::encroached(std::uint32_t s) const {
    const Segment& S = segs_[s];
    if (!S.alive) return false;
    std::int32_t t;
    int i;
    if (!find_edge(S.a, S.b, t, i)) return true; // not yet an edge of the triangulation
    const Point2 a = pts_[S.a], b = pts_[S.b];
    for (std::int32_t side : {t, tris_[t].nb[i]}) {
        if (side == kNone) continue;
        const Tri& T = tris_[side];
        for (std::uint32_t v : T.v) {
            if (v == S.a || v == S.b || v < 4) continue;
            if (dot(a - pts_[v], b - pts_[v]) < 0.0) return true;
        }
    }
    return false;
}

void Refiner::split_segment(std::uint32_t s) {
    Segment S = segs_[s];
    if (!S.alive) return;
    const Point2 a = pts_[S.a], b = pts_[S.b];
    const double len = distance(a, b);
    Point2 m = 0.5 * (a + b);
    // Concentric shells: split at a power-of-two distance from an input corner so that
    // repeated splitting near a small angle produces matching lengths on both sides.
    const bool ca = corner_[S.a] >= 0, cb = corner_[S.b] >= 0;
    if (ca != cb) {
        const double d = std::exp2(std::round(std::log2(0.5 * len)));
        const Point2 from = ca ? a : b, to = ca ? b : a;
        m = from + (d / len) * (to - from);
    }
    std::int32_t t;
    int i;
    std::int32_t start = find_edge(S.a, S.b, t, i) ? t : vtri_[S.a];
    start = locate(m, start);
    std::uint32_t v = 0;
    insert(m, start, edge_key(S.a, S.b), nullptr, &v);
    segs_[s].alive = false;
    seg_index_.erase(edge_key(S.a, S.b));
    add_segment(S.a, v);
    add_segment(v, S.b);
    const auto n = static_cast<std::uint32_t>(segs_.size());
    seg_queue_.push_back(n - 2);
    seg_queue_.push_back(n - 1);
    // The new vertex may encroach on segments bounding its star.
    for (std::int32_t c : created_) {
        const auto& T = tris_[c];
        if (is_segment(T.v[1], T.v[2])) seg_queue_.push_back(seg_index_.at(edge_key(T.v[1], T.v[2])));
    }
    if (classified_)
        for (std::int32_t c : created_) tri_queue_.emplace_back(c, tris_[c].version);
    check_budget();
}

bool Refiner::bad(std::int32_t t) const {
    const Tri& T = tris_[t];
    if (!T.alive || !T.inside) return false;

    const Point2 a = pts_[T.v[0]], b = pts_[T.v[1]], c = pts_[T.v[2]];
    const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    const double longest = std::max({la, lb, lc});
    const Point2 centroid = (1.0 / 3.0) * (a + b + c);
    if (longest > 1.4 * opt_.size(centroid)) return true;
    // Smallest angle sits opposite the shortest edge.
    const double shortest = std::min({la, lb, lc});
    double cos_min;
    if (shortest == la) cos_min = dot(b - a, c - a) / (lc * lb);
    else if (shortest == lb) cos_min = dot(a - b, c - b) / (lc * la);
    else cos_min = dot(a - c, b - c) / (lb * la);
    return cos_min > cos_bound_;
}

void Refiner::sample_boundary() {
    const auto rings = poly_.rings();
    std::int32_t flat = 0;
    for (const auto& ring : rings) {
        const std::size_t n = ring.size();
        std::vector<std::uint32_t> ids(n);
        for (std::size_t i = 0; i < n; ++i) {
            ids[i] = stage(ring[i]);
            staged_corner_[ids[i]] = flat++;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = ring[i], b = ring[(i + 1) % n];
            const double len = distance(a, b);
            // March along the edge in steps of a fraction of the local size, accumulating
            // the number of target edges, then place vertices at integer levels.
            std::vector<double> s{0.0}, acc{0.0};
            while (s.back() < len) {
                const Point2 p = a + (s.back() / len) * (b - a);
                const double ds = std::min(0.2 * opt_.size(p), len - s.back());
                const Point2 mid = a + ((s.back() + 0.5 * ds) / len) * (b - a);
                acc.push_back(acc.back() + ds / opt_.size(mid));
                s.push_back(s.back() + ds);
                if (s.size() > 50'000'000) throw InputError("boundary sampling exceeds the vertex budget");
            }
            const auto pieces = static_cast<std::size_t>(std::max(1.0, std::round(acc.back())));
            std::uint32_t prev = ids[i];
            std::size_t j = 1;
            for (std::size_t m = 1; m < pieces; ++m) {
                const double level = acc.back() * static_cast<double>(m) / static_cast<double>(pieces);
                while (acc[j] < level) ++j;
                const double f = (level - acc[j - 1]) / (acc[j] - acc[j - 1]);
                const double at = s[j - 1] + f * (s[j] - s[j - 1]);
                const std::uint32_t v = stage(a + (at / len) * (b - a));
                staged_segs_.push_back({prev, v});
                prev = v;
            }
            staged_segs_.push_back({prev, ids[(i + 1) % n]});
            if (staged_.size() > opt_.max_vertices) check_budget_staged();
        }
    }
}

void Refiner::seed_lattice() {
    const double h = opt_.lattice_spacing;
    if (h <= 0.0) return;
    double x0 = poly_.outer[0].x, x1 = x0, y0 = poly_.outer[0].y, y1 = y0;
    for (Point2 p : poly_.outer) {
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    std::uniform_real_distribution<double> jitter(-0.05 * h, 0.05 * h);
    const double dy = h * std::sqrt(3.0) / 2.0;
    const auto rows = static_cast<long>(std::ceil((y1 - y0) / dy));
    const auto cols = static_cast<long>(std::ceil((x1 - x0) / h)) + 1;
    for (long r = 0; r <= rows; ++r) {
        const double y = y0 + static_cast<double>(r) * dy;
        for (long c = 0; c <= cols; ++c) {
            // Serpentine order keeps consecutive points close for the walk.
            const long cc = (r % 2 == 0) ? c : cols - c;
            Point2 p{x0 + (static_cast<double>(cc) + 0.5 * static_cast<double>(r % 2)) * h, y};
            p.x += jitter(rng_);
            p.y += jitter(rng_);
            if (!contains(poly_, p) || opt_.size(p) < 0.95 * h || boundary_distance(poly_, p) < 0.7 * h) continue;
            insert(p, locate(p, last_), 0, nullptr, nullptr);
            check_budget();
        }
    }
}

void Refiner::recover_segments() {
    for (std::uint32_t s = 0; s < segs_.size(); ++s) seg_queue_.push_back(s);
    while (!seg_queue_.empty()) {
        const std::uint32_t s = seg_queue_.front();
        seg_queue_.pop_front();
        if (encroached(s)) split_segment(s);
    }
}

void Refiner::classify() {
    for (auto& T : tris_) {
        if (!T.alive) continue;
        const Point2 c = (1.0 / 3.0) * (pts_[T.v[0]] + pts_[T.v[1]] + pts_[T.v[2]]);
        T.inside = T.v[0] >= 4 && T.v[1] >= 4 && T.v[2] >= 4 && contains(poly_, c);
    }
    classified_ = true;
}

void Refiner::refine() {
    for (std::size_t t = 0; t < tris_.size(); ++t)
        if (bad(static_cast<std::int32_t>(t))) tri_queue_.emplace_back(static_cast<std::int32_t>(t), tris_[t].version);

    std::vector<std::uint32_t> hit;
    while (!tri_queue_.empty() || !seg_queue_.empty()) {
        if (!seg_queue_.empty()) {
            const std::uint32_t s = seg_queue_.front();
            seg_queue_.pop_front();
            if (encroached(s)) split_segment(s);
            continue;
        }
        const auto [t, version] = tri_queue_.front();
        tri_queue_.pop_front();
        if (tris_[t].version != version || !bad(t)) continue;

        const Tri T = tris_[t];
        const Point2 c = circumcenter(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]);
        const Point2 g = (1.0 / 3.0) * (pts_[T.v[0]] + pts_[T.v[1]] + pts_[T.v[2]]);

        // Straight walk from the triangle toward its circumcenter; crossing a segment
        // means the circumcenter lies beyond it and the segment must be split instead.
        std::int32_t cur = t;
        std::int32_t crossed = -1;
        for (std::size_t guard = 0; guard < tris_.size() + 10; ++guard) {
            const Tri& C = tris_[cur];
            int exit = -1;
            for (int i = 0; i < 3 && exit < 0; ++i) {
                const Point2 a = pts_[C.v[(i + 1) % 3]], b = pts_[C.v[(i + 2) % 3]];
                if (orient(a, b, c) >= 0.0) continue;
                const double oa = orient(g, c, a), ob = orient(g, c, b);
                if ((oa <= 0.0 && ob >= 0.0) || (oa >= 0.0 && ob <= 0.0)) exit = i;
            }
            if (exit < 0) {
                for (int i = 0; i < 3 && exit < 0; ++i)
                    if (orient(pts_[C.v[(i + 1) % 3]], pts_[C.v[(i + 2) % 3]], c) < 0.0) exit = i;
            }
            if (exit < 0) break;
            const std::uint32_t a = C.v[(exit + 1) % 3], b = C.v[(exit + 2) % 3];
            if (is_segment(a, b)) {
                crossed = static_cast<std::int32_t>(seg_index_.at(edge_key(a, b)));
                break;
            }
            if (C.nb[exit] == kNone) throw NumericalError("mesh", "circumcenter walk left the bounding box");
            cur = C.nb[exit];
        }
        if (crossed >= 0) {
            split_segment(static_cast<std::uint32_t>(crossed));
            tri_queue_.emplace_back(t, tris_[t].version);
            continue;
        }
        hit.clear();
        if (insert(c, cur, 0, &hit, nullptr) == Insert::encroaches) {
            for (std::uint32_t s : hit) split_segment(s);
            if (tris_[t].alive) tri_queue_.emplace_back(t, tris_[t].version);
            continue;
        }
        for (std::int32_t n : created_)
            if (bad(n)) tri_queue_.emplace_back(n, tris_[n].version);
        check_budget();
    }
}

PlanarMesh Refiner::run() {
    double x0 = poly_.outer[0].x, x1 = x0, y0 = poly_.outer[0].y, y1 = y0;
    for (Point2 p : poly_.outer) {
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    const double span = std::max(x1 - x0, y1 - y0);
    const double m = 4.0 * span;
    add_vertex({x0 - m, y0 - m});
    add_vertex({x1 + m, y0 - m});
    add_vertex({x1 + m, y1 + m});
    add_vertex({x0 - m, y1 + m});
    const std::int32_t t0 = new_tri(0, 1, 2);
    const std::int32_t t1 = new_tri(0, 2, 3);
    tris_[t0].nb[1] = t1; // edge (2, 0)
    tris_[t1].nb[2] = t0; // edge (0, 2)
    last_ = t0;

    for (const auto& ring : poly_.rings()) {
        const auto angles = interior_angles(ring);
        for (std::size_t i = 0; i < angles.size(); ++i) {
            const double deg = angles[i] * 180.0 / std::numbers::pi;
            if (deg < opt_.min_angle_deg) {
                std::ostringstream msg;
                msg << "quality target " << opt_.min_angle_deg << " deg unreachable: input corner " << i
                    << " has angle " << deg << " deg (worst triangle touches it)";
                throw NumericalError("mesh", msg.str());
            }
        }
    }
    sample_boundary();
    insert_boundary();
    seed_lattice();
    recover_segments();
    classify();
    refine();

    // Collect the interior triangles, dropping the bounding-box vertices.
    PlanarMesh out;
    std::vector<std::int64_t> remap(pts_.size(), -1);
    std::vector<std::uint8_t> boundary(pts_.size(), 0);
    for (const auto& S : segs_)
        if (S.alive) boundary[S.a] = boundary[S.b] = 1;
    double worst = 180.0;
    for (const auto& T : tris_) {
        if (!T.alive || !T.inside) continue;
        std::array<std::uint32_t, 3> tri{};
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t v = T.v[k];
            if (remap[v] < 0) {
                remap[v] = static_cast<std::int64_t>(out.points.size());
                out.points.push_back(pts_[v]);
                out.on_boundary.push_back(boundary[v]);
                out.corner.push_back(corner_[v]);
            }
            tri[k] = static_cast<std::uint32_t>(remap[v]);
        }
        worst = std::min(worst, min_angle_deg(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]));
        out.triangles.push_back(tri);
    }
    for (const auto& S : segs_) {
        if (!S.alive) continue;
        std::int32_t t;
        int i;
        if (!find_edge(S.a, S.b, t, i)) throw NumericalError("mesh", "boundary segment missing from the triangulation");
        if (!tris_[t].inside) t = tris_[t].nb[i];
        const auto& v = tris_[t].v;
        const int k = edge_index(t, S.a, S.b);
        out.boundary_edges.push_back({static_cast<std::uint32_t>(remap[v[(k + 1) % 3]]),
                                      static_cast<std::uint32_t>(remap[v[(k + 2) % 3]])});
    }
    std::sort(out.boundary_edges.begin(), out.boundary_edges.end());
    if (worst < opt_.min_angle_deg - 1e-9) {
        std::ostringstream msg;
        msg << "quality target " << opt_.min_angle_deg << " deg not reached (worst triangle " << worst << " deg)";
        throw NumericalError("mesh", msg.str());
    }
    return out;
}

void Refiner::insert_boundary() {
    std::vector<std::uint32_t> id(staged_.size());
    for (std::size_t k = 0; k < staged_.size(); ++k) {
        const Point2 p = staged_[k];
        const std::int32_t t = locate(p, last_);
        // Duplicate points cannot occur: boundary samples are distinct by construction.
        std::uint32_t v = 0;
        insert(p, t, 0, nullptr, &v);
        corner_[v] = staged_corner_[k];
        id[k] = v;
    }
    for (const auto& [a, b] : staged_segs_) add_segment(id[a], id[b]);
    check_budget();
}

} // namespace

double min_angle_deg(Point2 a, Point2 b, Point2 c) {
    auto angle = [](Point2 p, Point2 q, Point2 r) {
        const Point2 u = q - p, w = r - p;
        return std::atan2(std::abs(cross(u, w)), dot(u, w));
    };
    const double m = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
    return m * 180.0 / std::numbers::pi;
}

PlanarMesh refine_polygon(const PolygonSpec& poly, const RefinementOptions& options) {
    if (!options.size) throw InputError("refine_polygon: no size function given");
    Refiner r(poly, options);
    return r.run();
}

} // namespace polywave

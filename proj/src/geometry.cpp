#include "polywave/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <numbers>
#include <sstream>

namespace polywave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string ring_label(std::size_t ring) {
    return ring == 0 ? std::string("outer ring") : "hole " + std::to_string(ring - 1);
}

[[noreturn]] void fail_at(std::size_t ring, std::size_t vertex, const std::string& what) {
    throw InputError(ring_label(ring) + ", vertex " + std::to_string(vertex) + ": " + what);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0) - (v < 0); }

// Closed-segment intersection test.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const int o1 = sign(orient(a, b, c));
    const int o2 = sign(orient(a, b, d));
    const int o3 = sign(orient(c, d, a));
    const int o4 = sign(orient(c, d, b));
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

double segment_distance(Point2 a, Point2 b, Point2 p) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    double s = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return distance(a + s * ab, p);
}

// Crossing-number test against one ring; boundary points are undefined here.
bool ring_contains(std::span<const Point2> ring, Point2 p) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = ring[i];
        const Point2 b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xcross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xcross) inside = !inside;
        }
    }
    return inside;
}

double ring_distance(std::span<const Point2> ring, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        best = std::min(best, segment_distance(ring[i], ring[(i + 1) % ring.size()], p));
    }
    return best;
}

void check_ring_simple(std::span<const Point2> ring, std::size_t ring_id) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
                fail_at(ring_id, j, "boundary is self-intersecting (edge " + std::to_string(j) +
                                        " meets edge " + std::to_string(i) + ")");
            }
        }
    }
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view token, std::size_t line) {
    double value = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw InputError("line " + std::to_string(line) + ": malformed number '" + std::string(token) + "'");
    }
    return value;
}

} // namespace

double norm(Point2 a) { return std::hypot(a.x, a.y); }
double distance(Point2 a, Point2 b) { return norm(a - b); }

double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

std::size_t PolygonSpec::vertex_count() const {
    std::size_t n = outer.size();
    for (const auto& h : holes) n += h.size();
    return n;
}

std::vector<std::span<const Point2>> PolygonSpec::rings() const {
    std::vector<std::span<const Point2>> out;
    out.emplace_back(outer);
    for (const auto& h : holes) out.emplace_back(h);
    return out;
}

double SurfaceSpec::curvature_sum() const {
    double sum = 0.0;
    for (const auto& c : cone_points) sum += kTwoPi - 2.0 * c.alpha;
    return sum;
}

double SurfaceSpec::max_rho() const {
    double r = 0.0;
    for (const auto& c : cone_points) r = std::max(r, c.rho);
    return r;
}

double signed_area(std::span<const Point2> ring) {
    double twice = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
    return 0.5 * twice;
}

double polygon_area(const PolygonSpec& poly) {
    double a = signed_area(poly.outer);
    for (const auto& h : poly.holes) a += signed_area(h);
    return a;
}

std::vector<double> interior_angles(std::span<const Point2> ring) {
    const std::size_t n = ring.size();
    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 to_next = ring[(i + 1) % n] - ring[i];
        const Point2 to_prev = ring[(i + n - 1) % n] - ring[i];
        double a = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
        if (a < 0) a += kTwoPi;
        angles[i] = a;
    }
    return angles;
}

bool contains(const PolygonSpec& poly, Point2 p, bool closed) {
    if (closed && boundary_distance(poly, p) <= 1e-12) return true;
    if (!ring_contains(poly.outer, p)) return false;
    for (const auto& h : poly.holes) {
        if (ring_contains(h, p)) return false;
    }
    return true;
}

double boundary_distance(const PolygonSpec& poly, Point2 p) {
    double best = ring_distance(poly.outer, p);
    for (const auto& h : poly.holes) best = std::min(best, ring_distance(h, p));
    return best;
}

bool is_convex(const PolygonSpec& poly) {
    if (!poly.holes.empty()) return false;
    for (double a : interior_angles(poly.outer)) {
        if (a > std::numbers::pi + 1e-12) return false;
    }
    return true;
}

void validate(const PolygonSpec& poly) {
    const auto rings = poly.rings();
    for (std::size_t r = 0; r < rings.size(); ++r) {
        const auto ring = rings[r];
        if (ring.size() < 3) fail_at(r, 0, "ring needs at least 3 vertices, got " + std::to_string(ring.size()));
        for (std::size_t i = 0; i < ring.size(); ++i) {
            if (ring[i] == ring[(i + 1) % ring.size()]) {
                fail_at(r, (i + 1) % ring.size(), "coincides with the previous vertex");
            }
        }
        const double area = signed_area(ring);
        if (r == 0 && area <= 0) fail_at(r, 0, "outer boundary must be counterclockwise (signed area " + std::to_string(area) + ")");
        if (r > 0 && area >= 0) fail_at(r, 0, "hole boundary must be clockwise (signed area " + std::to_string(area) + ")");

        const auto angles = interior_angles(ring);
        double turning = 0.0;
        for (std::size_t i = 0; i < angles.size(); ++i) {
            const Point2 e1 = ring[(i + 1) % ring.size()] - ring[i];
            const Point2 e0 = ring[i] - ring[(i + ring.size() - 1) % ring.size()];
            const double scale = norm(e0) * norm(e1);
            // zero or full turn means the boundary doubles back on itself
            if (std::abs(cross(e0, e1)) <= 1e-14 * scale && dot(e0, e1) < 0) {
                fail_at(r, i, "degenerate vertex angle (0 or 2*pi)");
            }
            turning += std::numbers::pi - angles[i];
        }
        const double expected = r == 0 ? kTwoPi : -kTwoPi;
        check_ring_simple(ring, r);
        if (std::abs(turning - expected) > 1e-8) {
            fail_at(r, 0, "boundary winds " + std::to_string(turning / kTwoPi) + " times");
        }
    }

    // Holes: strictly inside the outer ring, pairwise disjoint.
    for (std::size_t r = 1; r < rings.size(); ++r) {
        const auto hole = rings[r];
        for (std::size_t i = 0; i < hole.size(); ++i) {
            if (!ring_contains(poly.outer, hole[i]) || ring_distance(poly.outer, hole[i]) == 0.0) {
                fail_at(r, i, "hole vertex lies outside the outer boundary");
            }
            for (std::size_t j = 0; j < poly.outer.size(); ++j) {
                if (segments_intersect(hole[i], hole[(i + 1) % hole.size()], poly.outer[j],
                                       poly.outer[(j + 1) % poly.outer.size()])) {
                    fail_at(r, i, "hole edge crosses the outer boundary");
                }
            }
        }
        for (std::size_t s = r + 1; s < rings.size(); ++s) {
            const auto other = rings[s];
            for (std::size_t i = 0; i < hole.size(); ++i) {
                for (std::size_t j = 0; j < other.size(); ++j) {
                    if (segments_intersect(hole[i], hole[(i + 1) % hole.size()], other[j],
                                           other[(j + 1) % other.size()])) {
                        fail_at(s, j, "hole touches hole " + std::to_string(r - 1));
                    }
                }
            }
            if (ring_contains(hole, other[0]) || ring_contains(other, hole[0])) {
                fail_at(s, 0, "hole is nested inside hole " + std::to_string(r - 1));
            }
        }
    }
}

PolygonSpec parse_polygon(std::string_view text) {
    PolygonSpec poly;
    std::vector<std::pair<std::size_t, std::string>> lines;
    {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto end = text.find('\n', pos);
            std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
            ++line_no;
            if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
            auto t = trim(raw);
            if (!t.empty()) lines.emplace_back(line_no, std::move(t));
            if (end == std::string_view::npos) break;
            pos = end + 1;
        }
    }

    std::size_t cursor = 0;
    auto keyword = [&](const std::string& line, std::string& rest) {
        const auto sp = line.find_first_of(" \t");
        rest = sp == std::string::npos ? std::string() : trim(std::string_view(line).substr(sp));
        return line.substr(0, sp);
    };
    auto read_ring = [&](std::size_t count, std::size_t header_line) {
        std::vector<Point2> ring;
        for (std::size_t i = 0; i < count; ++i) {
            if (cursor >= lines.size()) {
                throw InputError("line " + std::to_string(header_line) + ": expected " + std::to_string(count) +
                                 " vertices, found " + std::to_string(i));
            }
            const auto& [ln, l] = lines[cursor++];
            std::istringstream ss(l);
            std::string xs, ys, extra;
            if (!(ss >> xs >> ys) || (ss >> extra)) {
                throw InputError("line " + std::to_string(ln) + ": vertex " + std::to_string(i) +
                                 ": expected 'x y', got '" + l + "'");
            }
            ring.push_back({parse_number(xs, ln), parse_number(ys, ln)});
        }
        return ring;
    };
    auto parse_count = [&](const std::string& s, std::size_t ln) {
        std::size_t n = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw InputError("line " + std::to_string(ln) + ": malformed vertex count '" + s + "'");
        }
        return n;
    };

    if (lines.empty()) throw InputError("polygon file is empty");
    std::string rest;
    {
        const auto& [ln, l] = lines[cursor++];
        if (keyword(l, rest) != "name") throw InputError("line " + std::to_string(ln) + ": expected 'name <label>'");
        poly.name = rest;
    }
    if (cursor >= lines.size()) throw InputError("missing 'outer <n>' block");
    {
        const auto [ln, l] = lines[cursor++];
        if (keyword(l, rest) != "outer") throw InputError("line " + std::to_string(ln) + ": expected 'outer <n>'");
        poly.outer = read_ring(parse_count(rest, ln), ln);
    }
    while (cursor < lines.size()) {
        const auto [ln, l] = lines[cursor++];
        if (keyword(l, rest) != "hole") {
            throw InputError("line " + std::to_string(ln) + ": expected 'hole <m>', got '" + l + "'");
        }
        poly.holes.push_back(read_ring(parse_count(rest, ln), ln));
    }
    validate(poly);
    return poly;
}

PolygonSpec load_polygon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open polygon file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_polygon(buf.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string format_polygon(const PolygonSpec& poly) {
    std::ostringstream out;
    out.precision(17);
    out << "name " << poly.name << "\n";
    out << "outer " << poly.outer.size() << "\n";
    for (const auto& p : poly.outer) out << p.x << " " << p.y << "\n";
    for (const auto& h : poly.holes) {
        out << "hole " << h.size() << "\n";
        for (const auto& p : h) out << p.x << " " << p.y << "\n";
    }
    return out.str();
}

SurfaceSpec double_polygon(const PolygonSpec& poly) {
    validate(poly);
    SurfaceSpec surface;
    surface.base = poly;
    const auto rings = poly.rings();
    for (std::size_t r = 0; r < rings.size(); ++r) {
        const auto angles = interior_angles(rings[r]);
        for (std::size_t i = 0; i < angles.size(); ++i) {
            ConePoint c;
            c.location = rings[r][i];
            c.alpha = angles[i];
            c.rho = angles[i] / std::numbers::pi;
            c.ring = r;
            c.index = i;
            surface.cone_points.push_back(c);
        }
    }
    surface.total_area = 2.0 * polygon_area(poly);
    return surface;
}

} // namespace polywave

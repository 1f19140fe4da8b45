#pragma once

// Compact planar domains (disk, rectangle, simple polygon) with exact area,
// perimeter, centroid dilation, membership tests, and quadrature rules used
// by every integral discretization in the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpplab {

inline constexpr double pi = 3.14159265358979323846;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline std::complex<double> to_complex(Point2 p) { return {p.x, p.y}; }
inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

// ============================================================================
// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on P_m
// ============================================================================

struct GaussLegendreRule {
    std::vector<double> x;
    std::vector<double> w;
};

inline GaussLegendreRule gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussLegendreRule rule;
    rule.x.assign(m, 0.0);
    rule.w.assign(m, 0.0);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double t = std::cos(pi * (i + 0.75) / (m + 0.5));
        double p0 = 0.0, p1 = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = 0.0;
            for (int k = 0; k < m; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) * t * p1 - k * p2) / (k + 1);
            }
            dp = m * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        rule.x[i] = -t;
        rule.x[m - 1 - i] = t;
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.w[i] = w;
        rule.w[m - 1 - i] = w;
    }
    return rule;
}

// ============================================================================
// Domain
// ============================================================================

enum class ShapeKind { disk, rectangle, polygon };

namespace detail {

inline void require_finite(Point2 p, const char* what) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw std::invalid_argument(std::string(what) + ": coordinates must be finite");
}

inline double polygon_signed_area(const std::vector<Point2>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % v.size()];
        a += cross(p, q);
    }
    return 0.5 * a;
}

inline Point2 polygon_centroid(const std::vector<Point2>& v, double signed_area) {
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % v.size()];
        const double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * signed_area), cy / (6.0 * signed_area)};
}

// proper or improper intersection of segments ab and cd, endpoints excluded
// for segments that share an endpoint
inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    auto orient = [](Point2 p, Point2 q, Point2 r) { return cross(q - p, r - p); };
    const double d1 = orient(a, b, c);
    const double d2 = orient(a, b, d);
    const double d3 = orient(c, d, a);
    const double d4 = orient(c, d, b);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0)
        return true;
    auto on_segment = [](Point2 p, Point2 q, Point2 r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    if (d1 == 0 && on_segment(a, b, c)) return true;
    if (d2 == 0 && on_segment(a, b, d)) return true;
    if (d3 == 0 && on_segment(c, d, a)) return true;
    if (d4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

inline bool polygon_is_simple(const std::vector<Point2>& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = v[i], b = v[(i + 1) % n];
        if (a.x == b.x && a.y == b.y) return false;  // zero-length edge
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent
            if (segments_cross(a, b, v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

}  // namespace detail

class Domain {
public:
    static Domain disk(double radius, Point2 center = {0.0, 0.0}) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("disk: radius must be positive and finite");
        detail::require_finite(center, "disk");
        Domain d;
        d.kind_ = ShapeKind::disk;
        d.radius_ = radius;
        d.center_ = center;
        return d;
    }

    static Domain rectangle(double width, double height, Point2 corner = {0.0, 0.0}) {
        if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
            throw std::invalid_argument("rectangle: sides must be positive and finite");
        detail::require_finite(corner, "rectangle");
        Domain d;
        d.kind_ = ShapeKind::rectangle;
        d.width_ = width;
        d.height_ = height;
        d.corner_ = corner;
        return d;
    }

    static Domain polygon(std::vector<Point2> vertices) {
        if (vertices.size() < 3)
            throw std::invalid_argument("polygon: need at least 3 vertices");
        for (const Point2& p : vertices) detail::require_finite(p, "polygon");
        double a = detail::polygon_signed_area(vertices);
        double scale = 0.0;
        for (const Point2& p : vertices) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
        if (std::abs(a) <= 1e-14 * std::max(1.0, scale * scale))
            throw std::invalid_argument("polygon: degenerate (zero area)");
        if (a < 0.0) {  // normalize to counterclockwise
            std::reverse(vertices.begin(), vertices.end());
            a = -a;
        }
        if (!detail::polygon_is_simple(vertices))
            throw std::invalid_argument("polygon: self-intersecting (must be simple)");
        Domain d;
        d.kind_ = ShapeKind::polygon;
        d.vertices_ = std::move(vertices);
        return d;
    }

    ShapeKind kind() const { return kind_; }
    double dilation_factor() const { return dilation_; }

    double area() const {
        switch (kind_) {
            case ShapeKind::disk: return pi * radius_ * radius_;
            case ShapeKind::rectangle: return width_ * height_;
            default: return detail::polygon_signed_area(vertices_);
        }
    }

    double perimeter() const {
        switch (kind_) {
            case ShapeKind::disk: return 2.0 * pi * radius_;
            case ShapeKind::rectangle: return 2.0 * (width_ + height_);
            default: {
                double p = 0.0;
                for (std::size_t i = 0; i < vertices_.size(); ++i)
                    p += norm(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
                return p;
            }
        }
    }

    Point2 centroid() const {
        switch (kind_) {
            case ShapeKind::disk: return center_;
            case ShapeKind::rectangle: return {corner_.x + 0.5 * width_, corner_.y + 0.5 * height_};
            default: return detail::polygon_centroid(vertices_, detail::polygon_signed_area(vertices_));
        }
    }

    Domain dilated(double L) const {
        if (!(L > 0.0) || !std::isfinite(L))
            throw std::invalid_argument("dilate: factor must be positive and finite");
        Domain d = *this;
        d.dilation_ = dilation_ * L;
        const Point2 c = centroid();
        switch (kind_) {
            case ShapeKind::disk:
                d.radius_ = radius_ * L;
                break;
            case ShapeKind::rectangle:
                d.width_ = width_ * L;
                d.height_ = height_ * L;
                d.corner_ = c + L * (corner_ - c);
                break;
            default:
                for (Point2& v : d.vertices_) v = c + L * (v - c);
                break;
        }
        return d;
    }

    // boundary points count as inside
    bool contains(Point2 p) const {
        switch (kind_) {
            case ShapeKind::disk:
                return norm(p - center_) <= radius_ + 1e-12 * (1.0 + radius_);
            case ShapeKind::rectangle: {
                const double ex = 1e-12 * (1.0 + width_), ey = 1e-12 * (1.0 + height_);
                return p.x >= corner_.x - ex && p.x <= corner_.x + width_ + ex &&
                       p.y >= corner_.y - ey && p.y <= corner_.y + height_ + ey;
            }
            default: return polygon_contains(p);
        }
    }

    std::pair<Point2, Point2> bounding_box() const {
        switch (kind_) {
            case ShapeKind::disk:
                return {{center_.x - radius_, center_.y - radius_},
                        {center_.x + radius_, center_.y + radius_}};
            case ShapeKind::rectangle:
                return {corner_, {corner_.x + width_, corner_.y + height_}};
            default: {
                Point2 lo = vertices_[0], hi = vertices_[0];
                for (const Point2& v : vertices_) {
                    lo.x = std::min(lo.x, v.x);
                    lo.y = std::min(lo.y, v.y);
                    hi.x = std::max(hi.x, v.x);
                    hi.y = std::max(hi.y, v.y);
                }
                return {lo, hi};
            }
        }
    }

    double disk_radius() const { require(ShapeKind::disk); return radius_; }
    Point2 disk_center() const { require(ShapeKind::disk); return center_; }
    double rect_width() const { require(ShapeKind::rectangle); return width_; }
    double rect_height() const { require(ShapeKind::rectangle); return height_; }
    Point2 rect_corner() const { require(ShapeKind::rectangle); return corner_; }
    const std::vector<Point2>& vertices() const { require(ShapeKind::polygon); return vertices_; }

    std::string describe() const {
        char buf[128];
        switch (kind_) {
            case ShapeKind::disk:
                std::snprintf(buf, sizeof buf, "disk(R=%.6g)", radius_);
                return buf;
            case ShapeKind::rectangle:
                std::snprintf(buf, sizeof buf, "rect(%.6gx%.6g)", width_, height_);
                return buf;
            default:
                std::snprintf(buf, sizeof buf, "polygon(%zu vertices)", vertices_.size());
                return buf;
        }
    }

private:
    Domain() = default;

    void require(ShapeKind k) const {
        if (kind_ != k) throw std::logic_error("Domain: accessor does not match shape kind");
    }

    bool polygon_contains(Point2 p) const {
        const auto [lo, hi] = bounding_box();
        const double eps = 1e-12 * (1.0 + std::max(hi.x - lo.x, hi.y - lo.y));
        const std::size_t n = vertices_.size();
        // boundary test first
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = vertices_[i], b = vertices_[(i + 1) % n];
            const Point2 ab = b - a, ap = p - a;
            const double len = norm(ab);
            const double dist = std::abs(cross(ab, ap)) / len;
            const double t = (ab.x * ap.x + ab.y * ap.y) / (len * len);
            if (dist <= eps && t >= -eps && t <= 1.0 + eps) return true;
        }
        // even-odd ray crossing, half-open edges
        bool inside = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = vertices_[i], b = vertices_[(i + 1) % n];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (p.x < xint) inside = !inside;
            }
        }
        return inside;
    }

    ShapeKind kind_ = ShapeKind::disk;
    double dilation_ = 1.0;
    double radius_ = 1.0;
    Point2 center_{};
    double width_ = 1.0, height_ = 1.0;
    Point2 corner_{};
    std::vector<Point2> vertices_;
};

inline Domain dilate(const Domain& d, double L) { return d.dilated(L); }
inline bool contains(const Domain& d, Point2 p) { return d.contains(p); }

// ============================================================================
// Quadrature
// ============================================================================

struct QuadratureRule {
    std::vector<Point2> nodes;
    std::vector<double> weights;
    int order = 0;

    std::size_t size() const { return nodes.size(); }
    double weight_sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

namespace detail {

using Triangle = std::array<Point2, 3>;

// closed-triangle membership: points on the boundary count, so an ear whose
// edge passes through a reflex vertex is blocked
inline bool point_in_closed_triangle(const Triangle& t, Point2 p, double eps) {
    const double d1 = cross(t[1] - t[0], p - t[0]);
    const double d2 = cross(t[2] - t[1], p - t[1]);
    const double d3 = cross(t[0] - t[2], p - t[2]);
    return d1 >= -eps && d2 >= -eps && d3 >= -eps;
}

// ear clipping of a counterclockwise simple polygon
inline std::vector<Triangle> triangulate(const std::vector<Point2>& poly) {
    std::vector<Point2> v = poly;
    std::vector<Triangle> tris;
    double scale = 0.0;
    for (const Point2& p : v) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    const double eps_area = 1e-14 * std::max(1.0, scale * scale);
    while (v.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < v.size() && !clipped; ++i) {
            const std::size_t n = v.size();
            const Point2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            if (cross(b - a, c - b) <= eps_area) continue;  // reflex or collinear
            const Triangle ear{a, b, c};
            bool blocked = false;
            for (std::size_t j = 0; j < n && !blocked; ++j) {
                if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
                if (point_in_closed_triangle(ear, v[j], eps_area)) blocked = true;
            }
            if (blocked) continue;
            tris.push_back(ear);
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
        }
        if (!clipped)
            throw std::runtime_error("quadrature: polygon triangulation failed");
    }
    tris.push_back({v[0], v[1], v[2]});
    return tris;
}

// degree-5 symmetric 7-point triangle rule (closed-form weights)
inline void triangle_rule(const Triangle& t, std::vector<Point2>& nodes, std::vector<double>& weights) {
    static const double s15 = std::sqrt(15.0);
    static const double a1 = (6.0 + s15) / 21.0, w1 = (155.0 + s15) / 1200.0;
    static const double a2 = (6.0 - s15) / 21.0, w2 = (155.0 - s15) / 1200.0;
    static const double bary[7][4] = {
        {1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40},
        {1 - 2 * a1, a1, a1, w1}, {a1, 1 - 2 * a1, a1, w1}, {a1, a1, 1 - 2 * a1, w1},
        {1 - 2 * a2, a2, a2, w2}, {a2, 1 - 2 * a2, a2, w2}, {a2, a2, 1 - 2 * a2, w2},
    };
    const double area = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    for (const auto& b : bary) {
        nodes.push_back(b[0] * t[0] + b[1] * t[1] + b[2] * t[2]);
        weights.push_back(b[3] * area);
    }
}

inline void refine_triangle(const Triangle& t, int levels, std::vector<Point2>& nodes,
                            std::vector<double>& weights) {
    if (levels == 0) {
        triangle_rule(t, nodes, weights);
        return;
    }
    const Point2 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
    refine_triangle({t[0], m01, m20}, levels - 1, nodes, weights);
    refine_triangle({m01, t[1], m12}, levels - 1, nodes, weights);
    refine_triangle({m20, m12, t[2]}, levels - 1, nodes, weights);
    refine_triangle({m01, m12, m20}, levels - 1, nodes, weights);
}

}  // namespace detail

// Disk: radial Gauss-Legendre (order points) x 2*order uniform angles.
// Rectangle: order x order tensor Gauss-Legendre.
// Polygon: ear-clip triangulation, 4-way refined degree-5 symmetric rule.
inline QuadratureRule quadrature(const Domain& d, int order) {
    if (order < 4) throw std::invalid_argument("quadrature: order must be >= 4");
    QuadratureRule rule;
    rule.order = order;
    switch (d.kind()) {
        case ShapeKind::disk: {
            const double R = d.disk_radius();
            const Point2 c = d.disk_center();
            const GaussLegendreRule gl = gauss_legendre(order);
            const int na = 2 * order;
            const double wth = 2.0 * pi / na;
            rule.nodes.reserve(static_cast<std::size_t>(order) * na);
            rule.weights.reserve(static_cast<std::size_t>(order) * na);
            for (int k = 0; k < order; ++k) {
                const double r = 0.5 * R * (gl.x[k] + 1.0);
                const double wr = 0.5 * R * gl.w[k] * r;
                for (int j = 0; j < na; ++j) {
                    const double th = wth * j;
                    rule.nodes.push_back({c.x + r * std::cos(th), c.y + r * std::sin(th)});
                    rule.weights.push_back(wr * wth);
                }
            }
            break;
        }
        case ShapeKind::rectangle: {
            const GaussLegendreRule gl = gauss_legendre(order);
            const Point2 c0 = d.rect_corner();
            const double W = d.rect_width(), H = d.rect_height();
            for (int i = 0; i < order; ++i) {
                const double x = c0.x + 0.5 * W * (gl.x[i] + 1.0);
                const double wx = 0.5 * W * gl.w[i];
                for (int j = 0; j < order; ++j) {
                    const double y = c0.y + 0.5 * H * (gl.x[j] + 1.0);
                    rule.nodes.push_back({x, y});
                    rule.weights.push_back(wx * 0.5 * H * gl.w[j]);
                }
            }
            break;
        }
        case ShapeKind::polygon: {
            const auto tris = detail::triangulate(d.vertices());
            const int levels = std::clamp(
                static_cast<int>(std::ceil(std::log2(order / 3.0))), 1, 6);
            for (const auto& t : tris)
                detail::refine_triangle(t, levels, rule.nodes, rule.weights);
            break;
        }
    }
    const double target = d.area();
    if (std::abs(rule.weight_sum() - target) > 1e-10 * target)
        throw std::runtime_error("quadrature: weight sum misses the area; increase the order");
    return rule;
}

// ============================================================================
// Polygon file format: one "x y" pair per line, '#' comments allowed
// ============================================================================

inline std::vector<Point2> load_polygon_vertices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open polygon file: " + path);
    std::vector<Point2> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        double x, y;
        if (ls >> x >> y) out.push_back({x, y});
    }
    return out;
}

inline void save_polygon_vertices(const std::string& path, const std::vector<Point2>& vertices) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write polygon file: " + path);
    char buf[64];
    for (const Point2& v : vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        out << buf;
    }
}

// "disk:R", "rect:WxH" (centered at the origin), or "poly:PATH"
inline Domain parse_domain(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("domain: expected disk:<R>, rect:<W>x<H>, or poly:<path>");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "disk") {
        return Domain::disk(std::stod(arg));
    }
    if (kind == "rect") {
        const auto x = arg.find('x');
        if (x == std::string::npos) throw std::invalid_argument("domain: rect wants <W>x<H>");
        const double w = std::stod(arg.substr(0, x));
        const double h = std::stod(arg.substr(x + 1));
        return Domain::rectangle(w, h, {-0.5 * w, -0.5 * h});
    }
    if (kind == "poly") return Domain::polygon(load_polygon_vertices(arg));
    throw std::invalid_argument("domain: unknown shape '" + kind + "'");
}

}  // namespace dpplab

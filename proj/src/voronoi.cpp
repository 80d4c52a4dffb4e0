#include "polyelast/voronoi.hpp"

#include "polyelast/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace polyelast {

Rng::Rng(std::uint64_t seed) {
    // splitmix64 expansion of the seed into the xorshift128+ state
    auto mix = [](std::uint64_t& z) {
        z += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = z;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    std::uint64_t z = seed;
    s_[0] = mix(z);
    s_[1] = mix(z);
    if (s_[0] == 0 && s_[1] == 0) s_[0] = 1;
}

std::uint64_t Rng::next_u64() {
    std::uint64_t x = s_[0];
    const std::uint64_t y = s_[1];
    s_[0] = y;
    x ^= x << 23;
    s_[1] = x ^ y ^ (x >> 17) ^ (y >> 26);
    return s_[1] + y;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * next_double(); }

std::vector<Vec2> random_seeds(const Domain& domain, int count, Rng& rng) {
    domain.validate();
    Vec2 lo = domain.outer[0], hi = domain.outer[0];
    for (const Vec2& p : domain.outer) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double margin = 1e-3 * (hi - lo).norm();
    std::vector<Vec2> seeds;
    seeds.reserve(static_cast<size_t>(count));
    int guard = 0;
    while (static_cast<int>(seeds.size()) < count) {
        if (++guard > 1000 * count + 10000)
            throw std::runtime_error("random_seeds: rejection sampling failed");
        const Vec2 p(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
        if (!point_in_polygon(p, domain.outer)) continue;
        if (distance_to_boundary(p, domain.outer) < margin) continue;
        bool bad = false;
        for (const Circle& h : domain.holes)
            if ((p - h.center).norm() < h.radius + margin) bad = true;
        if (!bad) seeds.push_back(p);
    }
    return seeds;
}

namespace {

struct CellBuilder {
    const Domain* domain = nullptr;
    std::vector<Vec2> sites;  // real seeds followed by hole-mirror points
    int n_real = 0;
    double diam = 1.0;

    void set_up(const Domain& dom, const std::vector<Vec2>& seeds) {
        domain = &dom;
        Vec2 lo = dom.outer[0], hi = dom.outer[0];
        for (const Vec2& p : dom.outer) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        diam = (hi - lo).norm();
        sites = seeds;
        n_real = static_cast<int>(seeds.size());
        const double h_typ =
            std::sqrt(std::abs(polygon_area(dom.outer)) / std::max<size_t>(seeds.size(), 1));
        for (const Circle& hole : dom.holes) {
            const double band = hole.radius + 2.5 * h_typ;
            for (int i = 0; i < n_real; ++i) {
                const Vec2 d = seeds[static_cast<size_t>(i)] - hole.center;
                const double dist = d.norm();
                if (dist <= hole.radius)
                    throw std::invalid_argument("generate_voronoi_mesh: seed inside a hole");
                if (dist < band)
                    sites.push_back(hole.center + (2.0 * hole.radius - dist) * d / dist);
            }
        }
    }

    Polygon cell(int i) const {
        const Vec2 s = sites[static_cast<size_t>(i)];
        Polygon poly = domain->outer;
        const int m = static_cast<int>(sites.size());

        std::vector<int> idx(static_cast<size_t>(m - 1));
        std::vector<double> d2(static_cast<size_t>(m));
        for (int j = 0, k = 0; j < m; ++j) {
            d2[static_cast<size_t>(j)] = (sites[static_cast<size_t>(j)] - s).squaredNorm();
            if (j != i) idx[static_cast<size_t>(k++)] = j;
        }
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            const double da = d2[static_cast<size_t>(a)], db = d2[static_cast<size_t>(b)];
            return da != db ? da < db : a < b;
        });

        // Clip nearest-first; once the next bisector is farther than every
        // cell vertex it cannot cut anything.
        for (int j : idx) {
            if (poly.empty()) break;
            double rmax2 = 0.0;
            for (const Vec2& v : poly) rmax2 = std::max(rmax2, (v - s).squaredNorm());
            if (d2[static_cast<size_t>(j)] >= 4.0 * rmax2) break;
            const Vec2 sj = sites[static_cast<size_t>(j)];
            poly = clip_halfplane(poly, 0.5 * (s + sj), s - sj);
        }
        if (poly.empty())
            throw std::runtime_error("generate_voronoi_mesh: empty cell (seed outside domain?)");
        return merge_close_vertices(poly, 1e-12 * diam);
    }
};

} // namespace

double cvt_energy(const PolygonMesh& mesh, const std::vector<Vec2>& seeds) {
    const TriangleRule rule = dunavant_triangle(6);
    double e = 0.0;
    for (size_t i = 0; i < seeds.size(); ++i) {
        const Vec2 s = seeds[i];
        e += integrate_polygon([&](const Vec2& x) { return (x - s).squaredNorm(); },
                               mesh.element_polygon(static_cast<int>(i)), rule);
    }
    return e;
}

PolygonMesh generate_voronoi_mesh(const Domain& domain, const std::vector<Vec2>& seeds,
                                  int lloyd_iterations) {
    VoronoiOptions opts;
    opts.lloyd_iterations = lloyd_iterations;
    return generate_voronoi_mesh(domain, seeds, opts);
}

PolygonMesh generate_voronoi_mesh(const Domain& domain, std::vector<Vec2> seeds,
                                  const VoronoiOptions& opts) {
    domain.validate();
    if (seeds.empty()) throw std::invalid_argument("generate_voronoi_mesh: no seeds");

    CellBuilder builder;
    builder.set_up(domain, seeds);
    const double diam = builder.diam;

    for (size_t i = 0; i < seeds.size(); ++i) {
        if (!domain.contains(seeds[i]))
            throw std::invalid_argument("generate_voronoi_mesh: seed " + std::to_string(i) +
                                        " outside domain");
        for (size_t j = i + 1; j < seeds.size(); ++j)
            if ((seeds[i] - seeds[j]).norm() < 1e-12 * diam)
                throw std::invalid_argument("generate_voronoi_mesh: duplicate seeds " +
                                            std::to_string(i) + ", " + std::to_string(j));
    }

    auto reflect = [&](const Vec2& p) -> Vec2 {
        const Vec2 d = opts.mirror_dir.normalized();
        const Vec2 r = p - opts.mirror_point;
        const Vec2 along = r.dot(d) * d;
        return opts.mirror_point + 2.0 * along - r;
    };

    std::vector<char> constrained(seeds.size(), 0);
    for (int i : opts.fixed_seeds) constrained[static_cast<size_t>(i)] = 1;
    for (const auto& pr : opts.mirrored_pairs) {
        constrained[static_cast<size_t>(pr[0])] = 2;
        constrained[static_cast<size_t>(pr[1])] = 2;
    }
    for (int i : opts.on_line_seeds) constrained[static_cast<size_t>(i)] = 3;

    for (int it = 0; it < opts.lloyd_iterations; ++it) {
        std::vector<Polygon> cells(seeds.size());
        for (size_t i = 0; i < seeds.size(); ++i) cells[i] = builder.cell(static_cast<int>(i));
        if (opts.energy_log) {
            const TriangleRule rule = dunavant_triangle(6);
            double e = 0.0;
            for (size_t i = 0; i < seeds.size(); ++i) {
                const Vec2 s = seeds[i];
                e += integrate_polygon([&](const Vec2& x) { return (x - s).squaredNorm(); },
                                       cells[i], rule);
            }
            opts.energy_log->push_back(e);
        }
        std::vector<Vec2> centroids(seeds.size());
        for (size_t i = 0; i < seeds.size(); ++i) centroids[i] = polygon_centroid(cells[i]);

        auto push_out = [&](Vec2 p) {
            for (const Circle& disk : opts.keep_out) {
                const Vec2 r = p - disk.center;
                const double d = r.norm();
                if (d < disk.radius) p = disk.center + (disk.radius / std::max(d, 1e-300)) * r;
            }
            return p;
        };

        for (size_t i = 0; i < seeds.size(); ++i) {
            if (constrained[i] == 1 || constrained[i] == 2) continue;
            Vec2 target = centroids[i];
            if (constrained[i] == 3) {
                const Vec2 d = opts.mirror_dir.normalized();
                target = opts.mirror_point + (target - opts.mirror_point).dot(d) * d;
            } else if (opts.mirror_band > 0.0) {
                const Vec2 d = opts.mirror_dir.normalized();
                const Vec2 r = target - opts.mirror_point;
                const double t = r.dot(d);
                const double off = cross2(d, r);
                if (std::abs(off) < opts.mirror_band && t > opts.mirror_seg_t0 - opts.mirror_band &&
                    t < opts.mirror_seg_t1 + opts.mirror_band) {
                    const double push = off >= 0.0 ? opts.mirror_band : -opts.mirror_band;
                    target = opts.mirror_point + t * d + push * Vec2(-d.y(), d.x());
                }
            }
            target = push_out(target);
            if (domain.contains(target)) seeds[i] = target;
        }
        for (const auto& pr : opts.mirrored_pairs) {
            const Vec2 ci = centroids[static_cast<size_t>(pr[0])];
            const Vec2 cj = centroids[static_cast<size_t>(pr[1])];
            const Vec2 si = push_out(0.5 * (ci + reflect(cj)));
            const Vec2 sj = reflect(si);
            if (domain.contains(si) && domain.contains(sj)) {
                seeds[static_cast<size_t>(pr[0])] = si;
                seeds[static_cast<size_t>(pr[1])] = sj;
            }
        }
        builder.set_up(domain, seeds);
    }

    std::vector<Polygon> cells(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i) cells[i] = builder.cell(static_cast<int>(i));

    // Merge coincident cell corners into shared mesh nodes (grid hashing).
    PolygonMesh mesh;
    const double snap = 1e-9 * diam;
    std::map<std::pair<long long, long long>, std::vector<int>> grid;
    auto node_id = [&](const Vec2& p) {
        const long long gx = static_cast<long long>(std::floor(p.x() / snap));
        const long long gy = static_cast<long long>(std::floor(p.y() / snap));
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({gx + dx, gy + dy});
                if (it == grid.end()) continue;
                for (int id : it->second)
                    if ((mesh.nodes[static_cast<size_t>(id)] - p).norm() <= snap) return id;
            }
        const int id = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(p);
        grid[{gx, gy}].push_back(id);
        return id;
    };

    for (const Polygon& cell : cells) {
        std::vector<int> elem;
        elem.reserve(cell.size());
        for (const Vec2& v : cell) {
            const int id = node_id(v);
            if (elem.empty() || (elem.back() != id && elem.front() != id)) elem.push_back(id);
        }
        if (elem.size() < 3) throw std::runtime_error("generate_voronoi_mesh: degenerate cell");
        mesh.elements.push_back(elem);
    }

    // Boundary edges: directed edges without a reverse partner.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& elem : mesh.elements) {
        const size_t n = elem.size();
        for (size_t i = 0; i < n; ++i) directed[{elem[i], elem[(i + 1) % n]}]++;
    }
    auto on_outer_edge = [&](const Vec2& p, size_t k) {
        const Vec2& a = domain.outer[k];
        const Vec2& b = domain.outer[(k + 1) % domain.outer.size()];
        const Vec2 ab = b - a;
        const double t = (p - a).dot(ab) / ab.squaredNorm();
        if (t < -1e-9 || t > 1.0 + 1e-9) return false;
        return (p - (a + t * ab)).norm() < 1e-7 * diam;
    };
    for (const auto& [edge, cnt] : directed) {
        if (directed.count({edge.second, edge.first})) continue;
        const Vec2& p0 = mesh.nodes[static_cast<size_t>(edge.first)];
        const Vec2& p1 = mesh.nodes[static_cast<size_t>(edge.second)];
        int tag = -1;
        for (size_t k = 0; k < domain.outer.size(); ++k)
            if (on_outer_edge(p0, k) && on_outer_edge(p1, k)) {
                tag = static_cast<int>(k);
                break;
            }
        if (tag < 0) {
            const Vec2 mid = 0.5 * (p0 + p1);
            for (size_t h = 0; h < domain.holes.size(); ++h) {
                const double ratio = (mid - domain.holes[h].center).norm() / domain.holes[h].radius;
                if (ratio > 0.5 && ratio < 1.6) {
                    tag = kBoundaryHole + static_cast<int>(h);
                    break;
                }
            }
        }
        if (tag < 0) throw std::runtime_error("generate_voronoi_mesh: unclassified boundary edge");
        mesh.boundary_edges.push_back({edge.first, edge.second, tag});
    }
    return mesh;
}

} // namespace polyelast

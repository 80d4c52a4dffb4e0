#pragma once

#include "polyelast/mesh.hpp"

#include <cstdint>
#include <vector>

namespace polyelast {

/// Deterministic RNG used for reproducible seed sampling (splitmix-fed
/// xorshift; identical streams across platforms).
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next_u64();
    double next_double();                 // uniform in [0, 1)
    double uniform(double a, double b);

private:
    std::uint64_t s_[2];
};

struct VoronoiOptions {
    int lloyd_iterations = 0;
    // Seeds that Lloyd relaxation must not move (e.g. crack tips).
    std::vector<int> fixed_seeds;
    // Seeds constrained to a mirror line during relaxation: pairs (i, j)
    // kept symmetric about the line through `mirror_point` along `mirror_dir`.
    std::vector<std::array<int, 2>> mirrored_pairs;
    Vec2 mirror_point = Vec2::Zero();
    Vec2 mirror_dir = Vec2(1.0, 0.0);
    // Seeds relaxed only along the mirror line.
    std::vector<int> on_line_seeds;
    // Keep free seeds at least this far from the mirror segment during Lloyd
    // (0 disables the projection).
    double mirror_band = 0.0;
    double mirror_seg_t0 = 0.0, mirror_seg_t1 = 0.0; // band extent along the line
    // Exclusion disks (e.g. around crack tips): relaxed seeds are pushed out.
    std::vector<Circle> keep_out;
    // Optional CVT energy log, one entry per Lloyd iteration (pre-move).
    std::vector<double>* energy_log = nullptr;
};

// Voronoi cells of the seeds clipped against the (convex) outer boundary;
// circular holes are resolved by reflected-seed half-planes, keeping every
// cell convex. One element per seed, in seed order.
PolygonMesh generate_voronoi_mesh(const Domain& domain, const std::vector<Vec2>& seeds,
                                  int lloyd_iterations);
PolygonMesh generate_voronoi_mesh(const Domain& domain, std::vector<Vec2> seeds,
                                  const VoronoiOptions& opts);

// Rejection-sample `count` seeds strictly inside the domain with a small
// boundary margin.
std::vector<Vec2> random_seeds(const Domain& domain, int count, Rng& rng);

// CVT energy: sum over cells of the second moment about the seed.
double cvt_energy(const PolygonMesh& mesh, const std::vector<Vec2>& seeds);

} // namespace polyelast

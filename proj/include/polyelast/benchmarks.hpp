#pragma once

#include "polyelast/postproc.hpp"
#include "polyelast/voronoi.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace polyelast::bench {

// ---------------------------------------------------------------------------
// Closed-form reference solutions
// ---------------------------------------------------------------------------

// Uniaxial-stress patch field: u = (nu/E)(1-x), v = y/E.
Vec2 exact_patch(double x, double y, double E, double nu);

struct CantileverParams {
    double P = 150.0, L = 10.0, D = 2.0, E = 3e7, nu = 0.25;
    PlaneMode mode = PlaneMode::Stress;
    double I() const { return D * D * D / 12.0; }
    Material material() const { return {E, nu, mode}; }
};

// End-loaded cantilever (Timoshenko solution); origin at the clamped end,
// load P acting downward on x = L.
Vec2 exact_cantilever_u(const CantileverParams& p, const Vec2& x);
Eigen::Vector3d exact_cantilever_stress(const CantileverParams& p, const Vec2& x);

// Infinite plate with a traction-free hole of radius a under unit tension
// along x: Cartesian stresses from the polar coordinates (r >= a).
Eigen::Vector3d exact_kirsch(double r, double theta, double a);
Eigen::Vector3d exact_kirsch_at(const Vec2& x, double a);
Vec2 exact_kirsch_u(const Vec2& x, double a, const Material& mat);

struct EdgeCrackRef {
    double C = 0.0;
    double K_ref = 0.0;
};
// Empirical edge-crack correction C(a/b) and K_ref = C sigma sqrt(pi a).
EdgeCrackRef edge_crack_reference(double a, double b, double sigma);

// Analytical SIFs of an inclined crack in an infinite plate under biaxial
// tension (sigma1 along y, sigma2 along x); beta in radians from the x-axis.
std::pair<double, double> inclined_crack_reference(double beta, double sigma1, double sigma2,
                                                   double a);

// ---------------------------------------------------------------------------
// Mesh families (deterministic in the seed)
// ---------------------------------------------------------------------------

PolygonMesh patch_mesh(int n_polygons, std::uint64_t seed);
PolygonMesh cantilever_mesh(const CantileverParams& p, int n_polygons, std::uint64_t seed);
PolygonMesh plate_hole_mesh(double size, double hole_radius, int n_polygons, std::uint64_t seed);

struct CrackedMesh {
    PolygonMesh mesh;
    std::vector<int> tip_elements;
};

// Double-edge-cracked plate [0,H] x [-L,L], cracks along y=0 of length a
// from both sides.
CrackedMesh dec_mesh(double H, double L, double a, int n_polygons, int k_tip, std::uint64_t seed);

// Square plate [-w,w]^2 with a centre crack of half-length a at angle beta.
CrackedMesh inclined_mesh(double w, double a, double beta, int n_polygons, int k_tip,
                          std::uint64_t seed);

// Plate [-W,W] x [-H,H] with a centre hole of radius R and two radial cracks
// at angle theta, tips at distance a from the centre.
CrackedMesh hole_cracks_mesh(double W, double H, double R, double a, double theta, int n_polygons,
                             int k_tip, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

struct BenchmarkCase {
    std::string name; // patch | cantilever | plate-hole | dec-lh2 | dec-lh3 |
                      // inclined-crack | inclined-crack-far | hole-cracks
    Formulation formulation = Formulation::Sbfem;
    int p = 1;
    int max_levels = 0; // 0 = all levels of the case
    std::uint64_t seed = 823543;
    nlohmann::json fixtures;
};

struct LevelRecord {
    int level = 0;
    std::string param; // e.g. "beta=45" or "aW=0.5,theta=0"
    int dofs = 0;
    double h = 0.0;
    std::optional<double> l2, h1;
    std::optional<double> K_I, K_II, F_I, F_II;
};

struct Check {
    std::string name;
    double value = 0.0;
    std::string op; // "<=", ">", "abs_tol", "rel_tol"
    double target = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct BenchmarkResult {
    std::string case_name;
    std::string formulation;
    int p = 1;
    std::vector<LevelRecord> levels;
    std::map<std::string, double> rates;
    std::vector<Check> checks;
    bool pass = true;
};

std::string formulation_name(Formulation f);
Formulation formulation_from_name(const std::string& s);

nlohmann::json load_fixtures(const std::string& path);
nlohmann::json default_fixtures();

BenchmarkResult run_benchmark(const BenchmarkCase& c);

std::vector<std::string> known_cases();

} // namespace polyelast::bench

// Compares the serial reference assembly against the OpenMP-parallel path
// on one mesh per formulation and verifies bitwise-identical results.

#include "polyelast/benchmarks.hpp"
#include "polyelast/solver.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace polyelast;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool identical(const SpMat& a, const SpMat& b) {
    if (a.nonZeros() != b.nonZeros()) return false;
    for (long i = 0; i < a.nonZeros(); ++i)
        if (a.valuePtr()[i] != b.valuePtr()[i]) return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 2000;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

    const PolygonMesh mesh = bench::patch_mesh(n, 97531);
    const Material mat{1.0, 0.3, PlaneMode::Stress};

#ifdef _OPENMP
    std::printf("mesh: %zu polygons, threads: %d\n", mesh.elements.size(), omp_get_max_threads());
#else
    std::printf("mesh: %zu polygons, no OpenMP\n", mesh.elements.size());
#endif
    std::printf("%-10s %12s %12s %9s %7s\n", "kernel", "serial [s]", "parallel [s]", "speedup",
                "equal");

    for (Formulation form : {Formulation::PolyFem, Formulation::NSfem, Formulation::Sbfem}) {
        const DofMap dofs(mesh, 1);
        double t_serial = 1e300, t_parallel = 1e300;
        AssemblyResult serial, parallel;
        for (int r = 0; r < repeats; ++r) {
            auto t0 = std::chrono::steady_clock::now();
            serial = assemble_global(mesh, form, mat, dofs, /*parallel=*/false);
            t_serial = std::min(t_serial, seconds_since(t0));
            t0 = std::chrono::steady_clock::now();
            parallel = assemble_global(mesh, form, mat, dofs, /*parallel=*/true);
            t_parallel = std::min(t_parallel, seconds_since(t0));
        }
        const bool same = identical(serial.K, parallel.K);
        std::printf("%-10s %12.4f %12.4f %8.2fx %7s\n", bench::formulation_name(form).c_str(),
                    t_serial, t_parallel, t_serial / t_parallel, same ? "yes" : "NO");
        if (!same) return 1;
    }
    return 0;
}

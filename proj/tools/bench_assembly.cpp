// Times the OpenMP-parallel assembly kernel against the serial reference on
// a slit-rectangle mesh, and verifies that both produce identical bits.
#include <chrono>
#include <cstring>
#include <iostream>

#include "cfm/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cfm;

namespace {

double time_once(const std::function<AssembledSystem()>& fn, AssembledSystem* out) {
    auto t0 = std::chrono::steady_clock::now();
    *out = fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int p = argc > 1 ? std::atoi(argv[1]) : 6;
    double h = argc > 2 ? std::atof(argv[2]) : 2.0;

    DomainSpec spec = parse_domain_spec(R"({
      "outer": [
        {"kind":"polyline","points":[[0,40],[0,0]]},
        {"kind":"polyline","points":[[0,0],[40,0]]},
        {"kind":"polyline","points":[[40,0],[40,40]]},
        {"kind":"polyline","points":[[40,40],[0,40]]}
      ],
      "corners": [0,1,2,3],
      "random_slits": {"count":5, "seed":7, "box":[5,35,5,35], "length":[2,6]}
    })");

    Mesh base = generate_mesh(spec, h);
    GradingRule rule{0.15, std::min(p, 6)};
    auto mesh = std::make_shared<Mesh>(grade_toward_singularities(base, rule));
    std::cout << "mesh: " << mesh->node_count() << " nodes, " << mesh->element_count()
              << " elements, p=" << p << "\n";
#ifdef _OPENMP
    std::cout << "omp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "omp threads: (no OpenMP)\n";
#endif

    auto chart = make_plane_chart();
    AssembledSystem par, ser;
    double t_par = time_once([&] { return assemble(mesh, chart, BasisSpec{p}); }, &par);
    double t_ser = time_once([&] { return assemble_serial(mesh, chart, BasisSpec{p}); }, &ser);

    bool identical = par.A.nnz() == ser.A.nnz() &&
                     std::memcmp(par.A.values().data(), ser.A.values().data(),
                                 sizeof(double) * par.A.values().size()) == 0;
    std::cout << "dofs: " << par.dof_count() << ", nnz: " << par.A.nnz() << "\n";
    std::cout << "parallel: " << t_par << " s\n";
    std::cout << "serial:   " << t_ser << " s\n";
    std::cout << "speedup:  " << t_ser / t_par << "x\n";
    std::cout << "bitwise identical: " << (identical ? "yes" : "NO") << "\n";
    return identical ? 0 : 1;
}

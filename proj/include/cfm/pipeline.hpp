#pragma once

#include "cfm/errorest.hpp"
#include "cfm/modulus.hpp"

namespace cfm {

struct PipelineOptions {
    int p = 4;
    double h = 0.5;
    GradingRule grading{0.15, -1};  // levels < 0: use the run's p
    bool estimate = false;
    bool parallel = true;
    int extra_quad_order = 0;
    int quad_order_override = -1;
    int samples_per_hole = 200;
};

// Meshes the domain and applies geometric grading toward the flagged
// singular vertices.
Mesh build_mesh(const DomainSpec& spec, const PipelineOptions& opts);

// Three-step solve: primary problem, conjugate construction (hole
// potentials via the reduced Schur system), conjugate problem.
struct PipelineResult {
    std::shared_ptr<const Mesh> mesh;
    AssembledSystem sys;
    Solution u;
    Solution v;
    ConjugateSetup setup;
    ModulusReport report;
    Timings timings;
    SolverStats stats;
};

PipelineResult run_pipeline(const DomainSpec& spec, const PipelineOptions& opts);
PipelineResult run_pipeline_on_mesh(const DomainSpec& spec,
                                    std::shared_ptr<const Mesh> mesh,
                                    const PipelineOptions& opts);

struct StudyRow {
    int p = 0;
    long long N = 0;  // dof count
    double M = 0, Mt = 0, reci = 0;
    double eta_primary = -1, eta_conjugate = -1;
    double t_integration = 0, t_conjugate_construction = 0, t_solve = 0,
           t_factorization = 0, t_estimation = 0;
};

// Constant-p sweep on one fixed mesh.
std::vector<StudyRow> run_study(const DomainSpec& spec, std::shared_ptr<const Mesh> mesh,
                                int p_min, int p_max, const PipelineOptions& base);

struct LineFit {
    double slope = 0, intercept = 0, r2 = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// --- deterministic artifacts ------------------------------------------------

std::string report_to_json(const PipelineResult& result);
std::string timings_to_json(const Timings& timings, const SolverStats& stats);
std::string conjugate_dump_to_json(const ConjugateSetup& setup);
std::string study_to_csv(const std::vector<StudyRow>& rows);
std::string map_to_csv(const std::vector<MapSample>& samples);

extern const char* const kStudyCsvHeader;
extern const char* const kMapCsvHeader;

}  // namespace cfm

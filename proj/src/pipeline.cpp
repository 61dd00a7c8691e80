#include "cfm/pipeline.hpp"

#include <cmath>

#include "cfm/jsonio.hpp"

namespace cfm {

Mesh build_mesh(const DomainSpec& spec, const PipelineOptions& opts) {
    Mesh mesh = generate_mesh(spec, opts.h);
    GradingRule rule = opts.grading;
    if (rule.levels < 0) rule.levels = opts.p;
    return grade_toward_singularities(mesh, rule);
}

PipelineResult run_pipeline(const DomainSpec& spec, const PipelineOptions& opts) {
    auto mesh = std::make_shared<Mesh>(build_mesh(spec, opts));
    return run_pipeline_on_mesh(spec, mesh, opts);
}

PipelineResult run_pipeline_on_mesh(const DomainSpec& spec,
                                    std::shared_ptr<const Mesh> mesh,
                                    const PipelineOptions& opts) {
    PipelineResult result;
    result.mesh = mesh;

    AssembleOptions aopts;
    aopts.parallel = opts.parallel;
    aopts.extra_quad_order = opts.extra_quad_order;
    aopts.quad_order_override = opts.quad_order_override;
    result.sys = assemble(mesh, spec.chart ? spec.chart : make_plane_chart(),
                          BasisSpec{opts.p}, aopts);

    SolveContext ctx;
    result.u = solve_primary(result.sys, ctx);
    result.setup = solve_hole_potentials(result.sys, ctx);
    result.v = solve_conjugate(result.sys, result.setup, ctx);
    result.report = build_report(result.sys, result.u, result.v, result.setup,
                                 opts.samples_per_hole);
    if (opts.estimate) {
        result.report.eta_primary =
            estimate(result.sys, result.u, RoleAssignment::primary(), ctx).eta;
        result.report.eta_conjugate =
            estimate(result.sys, result.v, RoleAssignment::conjugate(), ctx).eta;
    }
    result.timings = result.sys.timings;
    result.timings.merge(ctx.timings);
    result.stats = ctx.stats;
    return result;
}

std::vector<StudyRow> run_study(const DomainSpec& spec, std::shared_ptr<const Mesh> mesh,
                                int p_min, int p_max, const PipelineOptions& base) {
    if (p_min < 1 || p_max < p_min)
        throw Error("invalid-parameter", "study p-range is empty");
    std::vector<StudyRow> rows;
    for (int p = p_min; p <= p_max; ++p) {
        PipelineOptions opts = base;
        opts.p = p;
        PipelineResult r = run_pipeline_on_mesh(spec, mesh, opts);
        StudyRow row;
        row.p = p;
        row.N = r.sys.dof_count();
        row.M = r.report.M;
        row.Mt = r.report.Mt;
        row.reci = r.report.reci;
        row.eta_primary = r.report.eta_primary;
        row.eta_conjugate = r.report.eta_conjugate;
        row.t_integration = r.timings.get("integration");
        row.t_conjugate_construction = r.timings.get("conjugate_construction");
        row.t_solve = r.timings.get("solve");
        row.t_factorization = r.timings.get("factorization");
        row.t_estimation = r.timings.get("estimation");
        rows.push_back(row);
    }
    return rows;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("invalid-parameter", "line fit needs at least two points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LineFit f;
    double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

std::string report_to_json(const PipelineResult& result) {
    const ModulusReport& rep = result.report;
    JsonWriter w;
    w.begin_object();
    w.key("M").value(rep.M);
    w.key("Mt").value(rep.Mt);
    w.key("reci").value(rep.reci);
    w.key("h").value(rep.h);
    w.key("delta").begin_array();
    for (int i = 0; i < rep.delta.size(); ++i) w.value(rep.delta[i]);
    w.end_array();
    w.key("delta_in_range").value(rep.delta_in_range);
    w.key("canonical").begin_object();
    w.key("h").value(rep.canonical.h);
    w.key("slits").begin_array();
    for (const auto& s : rep.canonical.slits) {
        w.begin_object();
        w.key("zeta").begin_array().value(s.zeta.x).value(s.zeta.y).end_array();
        w.key("length").value(s.length);
        w.key("height").value(s.height);
        w.key("spread").value(s.spread);
        w.key("hole").value(s.hole);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.key("corner_images").begin_array();
    for (const auto& c : rep.corner_images)
        w.begin_array().value(c.x).value(c.y).end_array();
    w.end_array();
    if (rep.eta_primary >= 0) {
        w.key("eta_primary").value(rep.eta_primary);
        w.key("eta_conjugate").value(rep.eta_conjugate);
    }
    w.key("p").value(result.sys.basis.p);
    w.key("dofs").value(result.sys.dof_count());
    w.key("elements").value(result.mesh->element_count());
    w.key("quadrature_order").value(result.sys.quadrature_order);
    w.end_object();
    w.raw_newline();
    return w.str();
}

std::string timings_to_json(const Timings& timings, const SolverStats& stats) {
    JsonWriter w;
    w.begin_object();
    w.key("seconds").begin_object();
    for (const auto& [phase, s] : timings.seconds) w.key(phase).value(s);
    w.end_object();
    w.key("factorizations").begin_object();
    for (const auto& [phase, c] : stats.by_phase) w.key(phase).value(c);
    w.end_object();
    w.key("factorizations_total").value(stats.factorizations);
    w.end_object();
    w.raw_newline();
    return w.str();
}

std::string conjugate_dump_to_json(const ConjugateSetup& setup) {
    JsonWriter w;
    auto matrix = [&w](const Eigen::MatrixXd& m) {
        w.begin_array();
        for (int i = 0; i < m.rows(); ++i) {
            w.begin_array();
            for (int j = 0; j < m.cols(); ++j) w.value(m(i, j));
            w.end_array();
        }
        w.end_array();
    };
    w.begin_object();
    w.key("block_sizes").begin_array();
    for (int k : setup.R.block_sizes) w.value(k);
    w.end_array();
    w.key("K0");
    matrix(setup.K0);
    w.key("K1");
    matrix(setup.K1);
    w.key("S");
    matrix(setup.S);
    w.key("delta").begin_array();
    for (int i = 0; i < setup.delta.size(); ++i) w.value(setup.delta[i]);
    w.end_array();
    w.key("delta_in_range").value(setup.delta_in_range);
    w.end_object();
    w.raw_newline();
    return w.str();
}

const char* const kStudyCsvHeader =
    "p,N,M,Mt,reci,eta_primary,eta_conjugate,t_integration,"
    "t_conjugate_construction,t_solve,t_factorization,t_estimation";

std::string study_to_csv(const std::vector<StudyRow>& rows) {
    std::string out = kStudyCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.p);
        out += ',' + std::to_string(r.N);
        for (double v : {r.M, r.Mt, r.reci, r.eta_primary, r.eta_conjugate,
                         r.t_integration, r.t_conjugate_construction, r.t_solve,
                         r.t_factorization, r.t_estimation}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

const char* const kMapCsvHeader = "element,ref_xi,ref_eta,x,y,u,v,checker";

std::string map_to_csv(const std::vector<MapSample>& samples) {
    std::string out = kMapCsvHeader;
    out += '\n';
    for (const auto& s : samples) {
        out += std::to_string(s.element);
        for (double v : {s.ref.x, s.ref.y, s.domain.x, s.domain.y, s.canonical.x,
                         s.canonical.y}) {
            out += ',';
            out += format_double(v);
        }
        out += ',' + std::to_string(s.checker);
        out += '\n';
    }
    return out;
}

}  // namespace cfm

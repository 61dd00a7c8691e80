#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfm/jsonio.hpp"
#include "cfm/pipeline.hpp"
#include "cfm/svg.hpp"

namespace fs = std::filesystem;
using namespace cfm;

namespace {

GradingRule parse_grade(const std::string& s) {
    GradingRule rule;
    if (s.empty()) return rule;
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw Error("config-error", "--grade expects q,L");
    rule.q = std::stod(s.substr(0, comma));
    rule.levels = std::stoi(s.substr(comma + 1));
    rule.validate();
    return rule;
}

int exit_code_for(const Error& e) {
    static const char* user_errors[] = {"config-error", "invalid-parameter",
                                        "mesh-format",  "geometry-conflict",
                                        "malformed-input", "io-error"};
    for (const char* c : user_errors)
        if (e.code() == c) return 2;
    return 1;
}

struct CommonArgs {
    std::string spec_path;
    std::string mesh_path;
    double h = 0.5;
    std::string grade = "0.15,-1";
    long seed = -1;
};

std::shared_ptr<Mesh> make_or_load_mesh(const CommonArgs& c, const DomainSpec& spec,
                                        int default_levels) {
    if (!c.mesh_path.empty()) return std::make_shared<Mesh>(load_mesh(c.mesh_path));
    GradingRule rule = parse_grade(c.grade);
    if (rule.levels < 0) rule.levels = default_levels;
    Mesh m = generate_mesh(spec, c.h);
    return std::make_shared<Mesh>(grade_toward_singularities(m, rule));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal moduli and maps of multiply connected quadrilaterals "
                 "via the conjugate function method"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonArgs common;
    std::string out_dir = "out";
    int p = 4;
    std::string p_range = "2:8";
    int density = 8;
    int checker = 8;
    bool dump_conjugate = false;
    bool serial = false;
    bool no_estimates = false;
    std::string counts_path;
    std::string mesh_out;

    auto add_common = [&](CLI::App* cmd, bool needs_spec = true) {
        auto* o = cmd->add_option("--spec", common.spec_path, "domain config JSON");
        if (needs_spec) o->required();
        cmd->add_option("--h", common.h, "target mesh size");
        cmd->add_option("--grade", common.grade, "grading ratio and levels, q,L (L=-1: use p)");
        cmd->add_option("--seed", common.seed, "override the random-slit seed");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the three-step solve pipeline");
    add_common(solve);
    solve->add_option("--p", p, "polynomial degree");
    solve->add_option("--mesh", common.mesh_path, "use a prebuilt mesh file");
    solve->add_option("--density", density, "map samples per element edge");
    solve->add_option("--checker", checker, "checkerboard cells across");
    solve->add_flag("--dump-conjugate", dump_conjugate, "dump reduced matrices and potentials");
    solve->add_flag("--serial", serial, "single-threaded assembly");
    solve->add_flag("--no-estimates", no_estimates, "skip a posteriori estimates");

    CLI::App* study = app.add_subcommand("study", "constant-p convergence sweep on one mesh");
    add_common(study);
    study->add_option("--p-range", p_range, "degree range lo:hi");
    study->add_option("--mesh", common.mesh_path, "use a prebuilt mesh file");
    study->add_flag("--serial", serial, "single-threaded assembly");
    study->add_flag("--no-estimates", no_estimates, "skip a posteriori estimates");

    CLI::App* meshcmd = app.add_subcommand("mesh", "generate and grade a mesh");
    add_common(meshcmd);
    meshcmd->add_option("--mesh-out", mesh_out, "mesh file path (default <out>/mesh.json)");

    CLI::App* euler = app.add_subcommand("check-euler", "vertex/face defect balance check");
    euler->add_option("--counts", counts_path, "JSON with genus, valences, face_sizes")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (euler->parsed()) {
            nlohmann::json j = nlohmann::json::parse(read_text_file(counts_path));
            std::vector<int> val = j.at("valences").get<std::vector<int>>();
            std::vector<int> faces = j.at("face_sizes").get<std::vector<int>>();
            int genus = j.at("genus").get<int>();
            EulerReport r = euler_defect_check(val, faces, genus);
            std::cout << "lhs=" << r.lhs << " rhs=" << r.rhs
                      << " valid=" << (r.valid ? "true" : "false") << "\n";
            return 0;
        }

        DomainSpec spec = load_domain_spec(common.spec_path, common.seed);
        fs::create_directories(out_dir);

        if (meshcmd->parsed()) {
            GradingRule rule = parse_grade(common.grade);
            if (rule.levels < 0) rule.levels = 0;
            Mesh m = generate_mesh(spec, common.h);
            m = grade_toward_singularities(m, rule);
            std::string path = mesh_out.empty() ? (fs::path(out_dir) / "mesh.json").string()
                                                : mesh_out;
            save_mesh(m, path);
            write_text_file((fs::path(out_dir) / "mesh.svg").string(), svg_mesh(m));
            std::cout << "nodes=" << m.node_count() << " elements=" << m.element_count()
                      << " boundary=" << m.boundary.size() << " -> " << path << "\n";
            return 0;
        }

        if (solve->parsed()) {
            PipelineOptions opts;
            opts.p = p;
            opts.h = common.h;
            opts.grading = parse_grade(common.grade);
            opts.parallel = !serial;
            opts.estimate = !no_estimates;
            auto mesh = make_or_load_mesh(common, spec, p);
            PipelineResult r = run_pipeline_on_mesh(spec, mesh, opts);

            write_text_file((fs::path(out_dir) / "report.json").string(), report_to_json(r));
            write_text_file((fs::path(out_dir) / "timings.json").string(),
                            timings_to_json(r.timings, r.stats));
            ConformalMap map(&r.sys, &r.u.x, &r.v.x, r.report.M);
            auto samples = sample_map(map, density, checker);
            write_text_file((fs::path(out_dir) / "map.csv").string(), map_to_csv(samples));
            write_text_file((fs::path(out_dir) / "map.svg").string(),
                            svg_checkerboard(*mesh, samples, density));
            write_text_file((fs::path(out_dir) / "canonical.svg").string(),
                            svg_canonical(r.report.canonical));
            if (dump_conjugate)
                write_text_file((fs::path(out_dir) / "conjugate.json").string(),
                                conjugate_dump_to_json(r.setup));
            std::cout << "M=" << format_double(r.report.M)
                      << " Mt=" << format_double(r.report.Mt)
                      << " reci=" << format_double(r.report.reci) << " dofs="
                      << r.sys.dof_count() << "\n";
            return 0;
        }

        if (study->parsed()) {
            auto colon = p_range.find(':');
            if (colon == std::string::npos)
                throw Error("config-error", "--p-range expects lo:hi");
            int lo = std::stoi(p_range.substr(0, colon));
            int hi = std::stoi(p_range.substr(colon + 1));
            PipelineOptions opts;
            opts.h = common.h;
            opts.parallel = !serial;
            opts.estimate = !no_estimates;
            opts.grading = parse_grade(common.grade);
            if (opts.grading.levels < 0) opts.grading.levels = hi;
            std::shared_ptr<Mesh> mesh;
            if (!common.mesh_path.empty()) {
                mesh = std::make_shared<Mesh>(load_mesh(common.mesh_path));
            } else {
                Mesh m = generate_mesh(spec, common.h);
                mesh = std::make_shared<Mesh>(grade_toward_singularities(m, opts.grading));
            }
            auto rows = run_study(spec, mesh, lo, hi, opts);
            write_text_file((fs::path(out_dir) / "convergence.csv").string(), study_to_csv(rows));
            write_text_file((fs::path(out_dir) / "convergence.svg").string(), svg_convergence(rows));
            for (const auto& r : rows)
                std::cout << "p=" << r.p << " N=" << r.N << " reci=" << format_double(r.reci)
                          << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

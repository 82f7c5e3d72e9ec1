#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdwg/analysis.hpp"
#include "pdwg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string problem = "t4";
    double p = 2.0;
    double rho = 1.0;
    double tau = 0.0;
    double eps = 1e-4;
    int k = 2;
    int j = 1;
    int base_n = 8;
    int levels = 4;
    int fields_res = 64;
    std::string out = "out";
    unsigned long seed = 0;
};

std::string sci(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.5e", v);
    return b;
}

std::string full(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

void apply_json_config(const std::string& path, RunConfig& rc) {
    std::ifstream in(path);
    if (!in) throw pdwg::ConfigError("config file not readable: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw pdwg::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw pdwg::ConfigError("config file must hold a JSON object");
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "problem") rc.problem = val.get<std::string>();
            else if (key == "p") rc.p = val.get<double>();
            else if (key == "rho") rc.rho = val.get<double>();
            else if (key == "tau") rc.tau = val.get<double>();
            else if (key == "eps") rc.eps = val.get<double>();
            else if (key == "k") rc.k = val.get<int>();
            else if (key == "j") rc.j = val.get<int>();
            else if (key == "base-n" || key == "base_n") rc.base_n = val.get<int>();
            else if (key == "levels") rc.levels = val.get<int>();
            else if (key == "fields-res" || key == "fields_res") rc.fields_res = val.get<int>();
            else if (key == "out") rc.out = val.get<std::string>();
            else if (key == "seed") rc.seed = val.get<unsigned long>();
            else throw pdwg::ConfigError("unknown config key: " + key);
        }
    } catch (const json::exception& e) {
        throw pdwg::ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
}

json config_echo(const RunConfig& rc, const std::string& command) {
    return json{{"command", command},     {"problem", rc.problem},
                {"p", rc.p},              {"rho", rc.rho},
                {"tau", rc.tau},          {"eps", rc.eps},
                {"k", rc.k},              {"j", rc.j},
                {"base-n", rc.base_n},    {"levels", rc.levels},
                {"fields-res", rc.fields_res}, {"out", rc.out},
                {"seed", rc.seed}};
}

pdwg::SolverConfig to_solver(const RunConfig& rc) {
    pdwg::SolverConfig s;
    s.p = rc.p;
    s.rho = rc.rho;
    s.tau = rc.tau;
    s.eps = rc.eps;
    s.k = rc.k;
    s.j = rc.j;
    return s;
}

json log_json(const pdwg::IterationLog& log) {
    json arr = json::array();
    for (const auto& it : log.iters)
        arr.push_back({{"max_update", it.max_update},
                       {"lin_residual", it.lin_residual},
                       {"seconds", it.seconds}});
    json out{{"status", pdwg::to_string(log.status)}, {"iterations", arr}};
    if (!log.note.empty()) out["note"] = log.note;
    return out;
}

json audit_json(const pdwg::ConservationAudit& a) {
    double max_res = 0.0, max_jump = 0.0;
    for (double v : a.element_residual) max_res = std::max(max_res, v);
    for (double v : a.edge_jump) max_jump = std::max(max_jump, v);
    return json{{"max_element_residual", max_res},
                {"max_element_rel", a.max_element_rel},
                {"max_edge_jump", max_jump},
                {"max_edge_rel", a.max_edge_rel}};
}

json errors_json(const pdwg::ErrorSet& es) {
    json out{{"e_h_0q", es.e_h_0q},
             {"u_err_0q", es.u_err_0q},
             {"eps0_0p", es.eps0_0p},
             {"epsb_0p", es.epsb_0p},
             {"eps0_1p", es.eps0_1p}};
    if (es.has_second) out["eps0_2p"] = es.eps0_2p;
    return out;
}

void write_report(const fs::path& dir, const json& report) {
    std::ofstream out(dir / "report.json");
    out << report.dump(2) << "\n";
}

int status_code(pdwg::SolveStatus s) {
    switch (s) {
        case pdwg::SolveStatus::Converged: return 0;
        case pdwg::SolveStatus::MaxIters: return 3;
        case pdwg::SolveStatus::SingularSystem: return 4;
    }
    return 1;
}

void check_common(const RunConfig& rc) {
    pdwg::SolverConfig s = to_solver(rc);
    pdwg::validate(s);
    if (rc.base_n < 1) throw pdwg::ConfigError("base-n must be >= 1");
    if (rc.levels < 1) throw pdwg::ConfigError("levels must be >= 1");
    if (rc.fields_res < 1) throw pdwg::ConfigError("fields-res must be >= 1");
}

struct LevelRun {
    pdwg::Mesh mesh;
    pdwg::ElementCache cache;
    pdwg::Solution sol;
};

LevelRun solve_level(const pdwg::ProblemSpec& prob, const pdwg::Mesh& mesh,
                     const RunConfig& rc) {
    LevelRun run{mesh, pdwg::build_cache(mesh, rc.k, rc.j), {}};
    run.sol = pdwg::fixed_point_solve(run.cache, prob, to_solver(rc));
    return run;
}

int cmd_solve(const RunConfig& rc) {
    check_common(rc);
    pdwg::ProblemSpec prob = pdwg::get_problem(rc.problem);
    const auto t0 = std::chrono::steady_clock::now();
    pdwg::Mesh mesh = pdwg::make_problem_mesh(prob, rc.base_n);
    LevelRun run = solve_level(prob, mesh, rc);

    fs::create_directories(rc.out);
    json report{{"version", pdwg::kVersion}, {"config", config_echo(rc, "solve")}};
    report["solver"] = log_json(run.sol.log);
    report["dofs"] = {{"lambda", run.cache.wspace.total_dofs},
                      {"u", run.cache.pspace.total_dofs}};
    if (!run.sol.log.note.empty()) std::fprintf(stderr, "note: %s\n", run.sol.log.note.c_str());

    if (run.sol.log.status == pdwg::SolveStatus::Converged) {
        {
            std::ofstream uf(fs::path(rc.out) / "solution_u.csv");
            uf << "index,value\n";
            for (int i = 0; i < run.sol.u.coeffs.size(); ++i)
                uf << i << "," << full(run.sol.u.coeffs[i]) << "\n";
            std::ofstream lf(fs::path(rc.out) / "solution_lambda.csv");
            lf << "index,value\n";
            for (int i = 0; i < run.sol.lambda.coeffs.size(); ++i)
                lf << i << "," << full(run.sol.lambda.coeffs[i]) << "\n";
        }
        pdwg::ConservationAudit audit =
            pdwg::conservation_audit(run.cache, prob, run.sol, to_solver(rc));
        report["conservation"] = audit_json(audit);
        auto es = pdwg::compute_errors(run.cache, prob, run.sol.u, run.sol.lambda, rc.p);
        if (es) report["errors"] = errors_json(*es);
    } else {
        std::fprintf(stderr, "solver finished with status %s\n",
                     pdwg::to_string(run.sol.log.status).c_str());
    }
    report["total_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(rc.out, report);
    return status_code(run.sol.log.status);
}

int cmd_convergence(const RunConfig& rc) {
    check_common(rc);
    pdwg::ProblemSpec prob = pdwg::get_problem(rc.problem);
    if (!prob.has_exact)
        throw pdwg::ConfigError("problem " + rc.problem +
                                " carries no exact solution; convergence needs one");
    const bool second = rc.j == rc.k;
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<int> invh;
    std::vector<std::vector<double>> cols(second ? 5 : 4);
    json jlevels = json::array();
    double worst_elem_rel = 0.0, worst_edge_rel = 0.0;
    pdwg::Mesh mesh = pdwg::make_problem_mesh(prob, rc.base_n);
    pdwg::SolveStatus status = pdwg::SolveStatus::Converged;
    std::string note;

    for (int lev = 0; lev < rc.levels; ++lev) {
        if (lev > 0) mesh = pdwg::refine_problem_mesh(mesh, prob);
        LevelRun run = solve_level(prob, mesh, rc);
        if (lev == 0 && !run.sol.log.note.empty()) {
            note = run.sol.log.note;
            std::fprintf(stderr, "note: %s\n", note.c_str());
        }
        if (run.sol.log.status != pdwg::SolveStatus::Converged) {
            status = run.sol.log.status;
            std::fprintf(stderr, "level 1/h=%d finished with status %s\n",
                         run.mesh.inv_h_nominal, pdwg::to_string(status).c_str());
            break;
        }
        pdwg::ConservationAudit audit =
            pdwg::conservation_audit(run.cache, prob, run.sol, to_solver(rc));
        worst_elem_rel = std::max(worst_elem_rel, audit.max_element_rel);
        worst_edge_rel = std::max(worst_edge_rel, audit.max_edge_rel);
        pdwg::ErrorSet es =
            *pdwg::compute_errors(run.cache, prob, run.sol.u, run.sol.lambda, rc.p);
        invh.push_back(run.mesh.inv_h_nominal);
        cols[0].push_back(es.e_h_0q);
        cols[1].push_back(es.eps0_0p);
        cols[2].push_back(es.epsb_0p);
        cols[3].push_back(es.eps0_1p);
        if (second) cols[4].push_back(es.eps0_2p);
        jlevels.push_back({{"inv_h", run.mesh.inv_h_nominal},
                           {"dofs_lambda", run.cache.wspace.total_dofs},
                           {"dofs_u", run.cache.pspace.total_dofs},
                           {"iterations", run.sol.log.iters.size()},
                           {"errors", errors_json(es)},
                           {"conservation", audit_json(audit)}});
    }

    std::vector<std::vector<double>> rates;
    for (const auto& c : cols) rates.push_back(pdwg::convergence_rates(c));

    fs::create_directories(rc.out);
    {
        std::ofstream csv(fs::path(rc.out) / "convergence.csv");
        csv << "inv_h,e_h_0q,rate,eps0_0p,rate,epsb_0p,rate,eps0_1p,rate";
        if (second) csv << ",eps0_2p,rate";
        csv << "\n";
        for (size_t i = 0; i < invh.size(); ++i) {
            csv << invh[i];
            for (size_t c = 0; c < cols.size(); ++c) {
                csv << "," << sci(cols[c][i]) << ",";
                if (i > 0) csv << sci(rates[c][i - 1]);
            }
            csv << "\n";
        }
    }
    json report{{"version", pdwg::kVersion}, {"config", config_echo(rc, "convergence")}};
    report["levels"] = jlevels;
    json jrates = json::array();
    for (size_t i = 0; i + 1 < invh.size(); ++i)
        jrates.push_back({{"from_inv_h", invh[i]},
                          {"to_inv_h", invh[i + 1]},
                          {"e_h_0q", rates[0][i]},
                          {"eps0_0p", rates[1][i]},
                          {"epsb_0p", rates[2][i]},
                          {"eps0_1p", rates[3][i]}});
    report["rates"] = jrates;
    report["worst_conservation"] = {{"max_element_rel", worst_elem_rel},
                                    {"max_edge_rel", worst_edge_rel}};
    report["status"] = pdwg::to_string(status);
    if (!note.empty()) report["note"] = note;
    report["total_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(rc.out, report);
    return status_code(status);
}

int cmd_fields(const RunConfig& rc) {
    check_common(rc);
    pdwg::ProblemSpec prob = pdwg::get_problem(rc.problem);
    const auto t0 = std::chrono::steady_clock::now();
    pdwg::Mesh mesh = pdwg::make_problem_mesh(prob, rc.base_n);
    LevelRun run = solve_level(prob, mesh, rc);

    fs::create_directories(rc.out);
    json report{{"version", pdwg::kVersion}, {"config", config_echo(rc, "fields")}};
    report["solver"] = log_json(run.sol.log);
    if (!run.sol.log.note.empty()) std::fprintf(stderr, "note: %s\n", run.sol.log.note.c_str());

    if (run.sol.log.status == pdwg::SolveStatus::Converged) {
        std::ofstream csv(fs::path(rc.out) / "fields.csv");
        csv << "x,y,u_h,lambda0\n";
        const int r = rc.fields_res;
        for (int iy = 0; iy <= r; ++iy)
            for (int ix = 0; ix <= r; ++ix) {
                pdwg::Vec2 p{static_cast<double>(ix) / r, static_cast<double>(iy) / r};
                int t = pdwg::locate(run.mesh, p);
                csv << sci(p.x) << "," << sci(p.y) << ",";
                if (t >= 0)
                    csv << sci(pdwg::eval(run.cache, run.sol.u, t, p)) << ","
                        << sci(pdwg::eval0(run.cache, run.sol.lambda, t, p));
                else
                    csv << ",";
                csv << "\n";
            }
        pdwg::ConservationAudit audit =
            pdwg::conservation_audit(run.cache, prob, run.sol, to_solver(rc));
        report["conservation"] = audit_json(audit);
    } else {
        std::fprintf(stderr, "solver finished with status %s\n",
                     pdwg::to_string(run.sol.log.status).c_str());
    }
    report["total_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(rc.out, report);
    return status_code(run.sol.log.status);
}

int run(int argc, char** argv) {
    RunConfig rc;
    // the config file supplies defaults; explicit flags override it below
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) apply_json_config(argv[i + 1], rc);
        else if (a.rfind("--config=", 0) == 0) apply_json_config(a.substr(9), rc);
    }

    CLI::App app{"L^p primal-dual weak Galerkin solver for linear transport"};
    app.set_version_flag("--version", std::string("pdwg ") + pdwg::kVersion);
    app.require_subcommand(1);
    std::string config_dummy;
    auto add_opts = [&](CLI::App* sub) {
        sub->add_option("--config", config_dummy, "JSON config file; flags override its keys");
        sub->add_option("--problem", rc.problem, "problem name (t1..t8, f1..f4)");
        sub->add_option("--p", rc.p, "Lebesgue exponent p > 1");
        sub->add_option("--rho", rc.rho, "boundary stabilizer scaling");
        sub->add_option("--tau", rc.tau, "residual stabilizer scaling");
        sub->add_option("--eps", rc.eps, "lagged-weight regularization");
        sub->add_option("--k", rc.k, "order: primal degree k-1");
        sub->add_option("--j", rc.j, "dual degree (k-1 or k)");
        sub->add_option("--base-n", rc.base_n, "base mesh generator resolution");
        sub->add_option("--levels", rc.levels, "number of uniform refinements to run");
        sub->add_option("--out", rc.out, "output directory");
        sub->add_option("--fields-res", rc.fields_res, "sampling grid resolution");
        sub->add_option("--seed", rc.seed, "randomness seed (property harness only)");
    };
    CLI::App* solve = app.add_subcommand("solve", "solve once and write coefficients");
    CLI::App* conv = app.add_subcommand("convergence", "refinement study with error table");
    CLI::App* fields = app.add_subcommand("fields", "solve and sample u_h, lambda0 on a grid");
    add_opts(solve);
    add_opts(conv);
    add_opts(fields);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    if (app.got_subcommand(solve)) return cmd_solve(rc);
    if (app.got_subcommand(conv)) return cmd_convergence(rc);
    return cmd_fields(rc);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

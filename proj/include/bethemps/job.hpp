#pragma once

// Job configuration parsing, task dispatch and machine-readable reporting.
// A job is one JSON document: a model, one rapidity-set worth of data and a
// list of tasks executed in the fixed order
//   solve -> build-mps -> verify-ed / oracle-check / algebra-check.
// Complex numbers travel as two-element arrays [re, im] everywhere.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bethemps/bethe.hpp"
#include "bethemps/errors.hpp"
#include "bethemps/exact_diag.hpp"
#include "bethemps/lieb_liniger.hpp"
#include "bethemps/obc_mps.hpp"
#include "bethemps/oracle.hpp"

namespace bethemps {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

// exit codes: 0 success, 2 config error, 3 solver non-convergence,
// 4 verification failure, 5 size cap
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 2;
        case ErrorKind::Precondition: return 2;
        case ErrorKind::DegenerateInput: return 2;
        case ErrorKind::Convergence: return 3;
        case ErrorKind::DomainEscape: return 3;
        case ErrorKind::SingularMatrix: return 3;
        case ErrorKind::NullState: return 4;
        case ErrorKind::SizeLimit: return 5;
    }
    return 2;
}

struct JobConfig {
    enum class Model { Xxz, Xxx, LiebLiniger };

    Model model = Model::Xxz;
    double delta = 0.0;
    bool has_delta = false;
    cplx eta{0.0, 0.0};
    bool has_eta = false;

    double kappa = 0.0;  // lieb_liniger
    double spacing = 0.0;
    int sites = 0;

    int chain_length = 0;  // L (spin models)
    int excitations = 0;   // n
    std::vector<cplx> initial_guesses;
    SolverConfig solver;
    std::vector<std::string> tasks;
    std::uint64_t seed = 42;
    int samples = 10;
    int local_dim = 0;  // 0 = auto (2n+1)
    std::string output_path;

    bool is_spin() const { return model != Model::LiebLiniger; }

    ModelKernel kernel() const {
        if (model == Model::Xxx) return ModelKernel::rational();
        if (has_eta) return ModelKernel::trigonometric_eta(eta);
        return ModelKernel::trigonometric(delta);
    }
    LLParams ll_params() const { return LLParams{kappa, spacing, sites}; }
};

namespace jobdetail {

inline cplx parse_complex(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw BetheError(ErrorKind::Validation,
                         "config field '" + field + "' must be a two-element [re, im] array");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::ordered_json dump_complex(cplx z) {
    return nlohmann::ordered_json::array({z.real(), z.imag()});
}

inline std::string config_key(const SpinConfiguration& cfg) {
    std::string key = "x=";
    for (std::size_t i = 0; i < cfg.positions.size(); ++i)
        key += (i ? "," : "") + std::to_string(cfg.positions[i]);
    return key;
}

inline std::string occupation_key(const OccupationConfiguration& occ) {
    std::string key = "m=";
    for (std::size_t i = 0; i < occ.occupations.size(); ++i)
        key += (i ? "," : "") + std::to_string(occ.occupations[i]);
    return key;
}

}  // namespace jobdetail

inline JobConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw BetheError(ErrorKind::Validation, std::string("config is not valid JSON: ") +
                                                    e.what());
    }

    JobConfig cfg;
    const std::string model = j.value("model", std::string{});
    if (model == "xxz")
        cfg.model = JobConfig::Model::Xxz;
    else if (model == "xxx")
        cfg.model = JobConfig::Model::Xxx;
    else if (model == "lieb_liniger")
        cfg.model = JobConfig::Model::LiebLiniger;
    else
        throw BetheError(ErrorKind::Validation,
                         "config field 'model' must be xxz, xxx or lieb_liniger");

    if (j.contains("delta")) {
        cfg.delta = j["delta"].get<double>();
        cfg.has_delta = true;
    }
    if (j.contains("eta")) {
        cfg.eta = jobdetail::parse_complex(j["eta"], "eta");
        cfg.has_eta = true;
    }
    if (cfg.model == JobConfig::Model::Xxz && !cfg.has_eta) {
        if (!cfg.has_delta)
            throw BetheError(ErrorKind::Validation, "xxz model needs 'delta' or 'eta'");
        if (!(cfg.delta > 1.0))
            throw BetheError(ErrorKind::Validation,
                             "xxz with delta <= 1 needs an explicit 'eta'");
    }
    if (cfg.model == JobConfig::Model::Xxx && (cfg.has_delta || cfg.has_eta))
        if (cfg.has_delta && cfg.delta != 1.0)
            throw BetheError(ErrorKind::Validation, "xxx model fixes delta = 1");

    if (cfg.model == JobConfig::Model::LiebLiniger) {
        for (const char* field : {"kappa", "a", "N"})
            if (!j.contains(field))
                throw BetheError(ErrorKind::Validation,
                                 std::string("lieb_liniger model needs '") + field + "'");
        cfg.kappa = j["kappa"].get<double>();
        cfg.spacing = j["a"].get<double>();
        cfg.sites = j["N"].get<int>();
        if (!(cfg.kappa > 0.0) || !(cfg.spacing > 0.0) || cfg.sites < 1)
            throw BetheError(ErrorKind::Validation,
                             "lieb_liniger needs kappa > 0, a > 0, N >= 1");
    } else {
        if (!j.contains("L"))
            throw BetheError(ErrorKind::Validation, "spin models need 'L'");
        cfg.chain_length = j["L"].get<int>();
        if (cfg.chain_length < 1)
            throw BetheError(ErrorKind::Validation, "'L' must be positive");
    }

    cfg.excitations = j.value("n", 0);
    if (cfg.excitations < 0)
        throw BetheError(ErrorKind::Validation, "'n' must be nonnegative");
    if (cfg.is_spin() && cfg.excitations > cfg.chain_length)
        throw BetheError(ErrorKind::Validation, "'n' cannot exceed 'L'");

    if (j.contains("initial_guesses")) {
        for (const auto& g : j["initial_guesses"])
            cfg.initial_guesses.push_back(jobdetail::parse_complex(g, "initial_guesses"));
    }

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
        cfg.solver.tolerance = s.value("tolerance", cfg.solver.tolerance);
        cfg.solver.fd_step = s.value("fd_step", cfg.solver.fd_step);
        cfg.solver.damping = s.value("damping", cfg.solver.damping);
    }
    if (cfg.solver.max_iterations <= 0 || !(cfg.solver.tolerance > 0.0) ||
        !(cfg.solver.fd_step > 0.0) || cfg.solver.fd_step >= 1e-3 ||
        !(cfg.solver.damping > 0.0) || cfg.solver.damping > 1.0)
        throw BetheError(ErrorKind::Validation,
                         "config field 'solver' is out of range (need max_iterations > 0, "
                         "tolerance > 0, 0 < fd_step < 1e-3, damping in (0, 1])");

    static const std::set<std::string> known_tasks = {"solve", "build-mps", "verify-ed",
                                                      "oracle-check", "algebra-check"};
    if (!j.contains("tasks") || !j["tasks"].is_array() || j["tasks"].empty())
        throw BetheError(ErrorKind::Validation, "config needs a nonempty 'tasks' array");
    for (const auto& t : j["tasks"]) {
        const std::string name = t.get<std::string>();
        if (!known_tasks.count(name))
            throw BetheError(ErrorKind::Validation, "unknown task '" + name + "'");
        cfg.tasks.push_back(name);
    }
    if (!cfg.is_spin())
        for (const auto& t : cfg.tasks)
            if (t == "verify-ed")
                throw BetheError(ErrorKind::Validation,
                                 "task 'verify-ed' applies to spin models only");

    const bool solving =
        std::find(cfg.tasks.begin(), cfg.tasks.end(), "solve") != cfg.tasks.end();
    if (solving && static_cast<int>(cfg.initial_guesses.size()) != cfg.excitations)
        throw BetheError(ErrorKind::Validation,
                         "'initial_guesses' length must equal 'n' when solving");
    if (!cfg.is_spin())
        for (const cplx g : cfg.initial_guesses)
            if (std::abs(g.imag()) > 1e-9)
                throw BetheError(ErrorKind::Validation,
                                 "lieb_liniger rapidities must be real");

    cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.samples = j.value("samples", 10);
    cfg.local_dim = j.value("local_dim", 0);
    cfg.output_path = j.value("output_path", std::string{});
    return cfg;
}

struct ExecutionResult {
    nlohmann::ordered_json report;
    int exit_code = 0;
};

namespace jobdetail {

class TaskTimer {
public:
    explicit TaskTimer(nlohmann::ordered_json& slot) : slot_(slot) {
        start_ = std::chrono::steady_clock::now();
    }
    ~TaskTimer() {
        const auto end = std::chrono::steady_clock::now();
        slot_ = std::chrono::duration<double, std::milli>(end - start_).count();
    }

private:
    nlohmann::ordered_json& slot_;
    std::chrono::steady_clock::time_point start_;
};

inline void record_error(nlohmann::ordered_json& report, int& exit_code,
                         const std::string& task, const BetheError& e) {
    report["errors"].push_back({{"task", task},
                                {"kind", to_string(e.kind())},
                                {"message", e.what()}});
    if (exit_code == 0) exit_code = exit_code_for(e.kind());
}

}  // namespace jobdetail

inline ExecutionResult execute(const JobConfig& cfg) {
    using nlohmann::ordered_json;
    ExecutionResult result;
    ordered_json& report = result.report;

    report["schema_version"] = kSchemaVersion;
    report["model"] = cfg.model == JobConfig::Model::Xxz
                          ? "xxz"
                          : (cfg.model == JobConfig::Model::Xxx ? "xxx" : "lieb_liniger");
    ordered_json params;
    if (cfg.is_spin()) {
        const ModelKernel k = cfg.kernel();
        params["delta"] = k.delta();
        params["eta"] = jobdetail::dump_complex(k.eta());
        params["L"] = cfg.chain_length;
    } else {
        params["kappa"] = cfg.kappa;
        params["a"] = cfg.spacing;
        params["N"] = cfg.sites;
        params["kappa_a_recommended"] = cfg.ll_params().kappa_a_recommended();
    }
    params["n"] = cfg.excitations;
    report["parameters"] = params;
    report["seed"] = cfg.seed;
    report["tasks"] = ordered_json::object();
    report["errors"] = ordered_json::array();
    report["timing_ms"] = ordered_json::object();

    auto requested = [&](const char* name) {
        return std::find(cfg.tasks.begin(), cfg.tasks.end(), name) != cfg.tasks.end();
    };

    // rapidities flow from the solver into every later task; without a solve
    // task the initial guesses are taken as exact rapidities
    std::vector<cplx> spin_rapidities = cfg.initial_guesses;
    std::vector<double> ll_rapidities;
    for (const cplx g : cfg.initial_guesses) ll_rapidities.push_back(g.real());

    if (requested("solve")) {
        ordered_json task;
        jobdetail::TaskTimer timer(report["timing_ms"]["solve"]);
        try {
            if (cfg.is_spin()) {
                const RapiditySet set =
                    solve_bae(cfg.kernel(), cfg.chain_length, cfg.initial_guesses, cfg.solver);
                spin_rapidities = set.lambdas;
                task["roots"] = ordered_json::array();
                for (const cplx r : set.lambdas)
                    task["roots"].push_back(jobdetail::dump_complex(r));
                ordered_json residuals = ordered_json::array();
                for (const cplx r : bae_residual(cfg.kernel(), cfg.chain_length, set.lambdas))
                    residuals.push_back(std::abs(r));
                task["residuals"] = residuals;
                task["residual_norm"] = set.residual_norm;
                task["converged"] = set.converged;
                task["energy"] = jobdetail::dump_complex(energy(cfg.kernel(), set.lambdas));
                if (!set.converged) {
                    jobdetail::record_error(
                        report, result.exit_code, "solve",
                        BetheError(ErrorKind::Convergence,
                                   "solver did not reach the requested tolerance"));
                }
            } else {
                const LLRoots roots = ll_solve_bae(cfg.ll_params(), ll_rapidities, cfg.solver);
                ll_rapidities = roots.lambdas;
                task["roots"] = ordered_json::array();
                for (const double r : roots.lambdas)
                    task["roots"].push_back(jobdetail::dump_complex(cplx(r, 0.0)));
                task["residual_norm"] = roots.residual_norm;
                task["converged"] = roots.converged;
                if (!roots.converged)
                    jobdetail::record_error(
                        report, result.exit_code, "solve",
                        BetheError(ErrorKind::Convergence,
                                   "solver did not reach the requested tolerance"));
            }
        } catch (const BetheError& e) {
            jobdetail::record_error(report, result.exit_code, "solve", e);
        }
        report["tasks"]["solve"] = task;
    }

    const bool needs_state =
        requested("build-mps") || requested("verify-ed") || requested("oracle-check");

    // spin state assembly shared by build-mps / verify-ed / oracle-check
    StateVector spin_state;
    bool have_spin_state = false;
    std::vector<std::pair<std::string, cplx>> ll_amp_table;

    if (needs_state) {
        ordered_json task;
        jobdetail::TaskTimer timer(report["timing_ms"]["build-mps"]);
        try {
            if (cfg.is_spin()) {
                const MpsTensors tensors = build_site_tensors(cfg.kernel(), spin_rapidities);
                const BoundaryTensors boundary = build_boundary(tensors.n);
                spin_state = assemble_state(tensors, boundary, cfg.chain_length);
                have_spin_state = true;

                const SectorBasis basis(cfg.chain_length, cfg.excitations);
                ordered_json amps = ordered_json::object();
                for (std::size_t i = 0; i < basis.size(); ++i)
                    amps[jobdetail::config_key(basis.config(i))] =
                        jobdetail::dump_complex(spin_state.amplitudes[i]);
                task["amplitudes"] = amps;
                task["max_abs"] = spin_state.max_abs();
                task["all_zero"] = spin_state.all_zero();
            } else {
                const LLSiteTensors tensors =
                    ll_site_tensors(cfg.ll_params(), ll_rapidities);
                const BoundaryTensors boundary = build_boundary(tensors.n);
                ordered_json amps = ordered_json::object();
                double max_abs = 0.0;
                for (const auto& occ : enumerate_occupations(cfg.sites, cfg.excitations,
                                                             2 * cfg.excitations)) {
                    const cplx amp = ll_amplitude(tensors, boundary, occ);
                    ll_amp_table.emplace_back(jobdetail::occupation_key(occ), amp);
                    amps[jobdetail::occupation_key(occ)] = jobdetail::dump_complex(amp);
                    max_abs = std::max(max_abs, std::abs(amp));
                }
                task["amplitudes"] = amps;
                task["max_abs"] = max_abs;
                task["all_zero"] = max_abs <= 1e-12;
            }
        } catch (const BetheError& e) {
            jobdetail::record_error(report, result.exit_code, "build-mps", e);
        }
        if (requested("build-mps") || !task.empty()) report["tasks"]["build-mps"] = task;
    }

    if (requested("verify-ed")) {
        ordered_json task;
        jobdetail::TaskTimer timer(report["timing_ms"]["verify-ed"]);
        try {
            if (!have_spin_state)
                throw BetheError(ErrorKind::Precondition, "verify-ed needs a built state");
            const auto pairs =
                diagonalize_sector(cfg.kernel(), cfg.chain_length, cfg.excitations);
            const MatchReport match = match_state(spin_state, pairs, cfg.kernel());
            task["overlap"] = match.best_overlap;
            task["matched_energy"] = match.matched_energy;
            task["residual"] = match.residual;
            task["degenerate_group"] = match.degenerate;
            const cplx e_formula = energy(cfg.kernel(), spin_rapidities);
            task["energy_formula"] = jobdetail::dump_complex(e_formula);
            task["energy_gap"] = std::abs(e_formula - cplx(match.matched_energy, 0.0));
            ordered_json spectrum = ordered_json::array();
            for (const auto& p : pairs) spectrum.push_back(p.energy);
            task["sector_energies"] = spectrum;
            const bool pass = match.best_overlap >= 1.0 - 1e-9;
            task["pass"] = pass;
            if (!pass && result.exit_code == 0) result.exit_code = 4;
        } catch (const BetheError& e) {
            jobdetail::record_error(report, result.exit_code, "verify-ed", e);
        }
        report["tasks"]["verify-ed"] = task;
    }

    if (requested("oracle-check")) {
        ordered_json task;
        jobdetail::TaskTimer timer(report["timing_ms"]["oracle-check"]);
        try {
            if (cfg.is_spin()) {
                if (!have_spin_state)
                    throw BetheError(ErrorKind::Precondition,
                                     "oracle-check needs a built state");
                const StateVector full =
                    bethe_state_oracle(cfg.kernel(), cfg.chain_length, spin_rapidities);
                const SectorBasis basis(cfg.chain_length, cfg.excitations);
                const StateVector oracle = restrict_to_sector(full, basis, nullptr);
                const double scale = std::max(oracle.max_abs(), 1e-300);
                double max_rel = 0.0;
                for (std::size_t i = 0; i < basis.size(); ++i)
                    max_rel = std::max(max_rel, std::abs(spin_state.amplitudes[i] -
                                                         oracle.amplitudes[i]) /
                                                    scale);
                task["max_rel_diff"] = max_rel;
                const bool pass = max_rel <= 1e-10;
                task["pass"] = pass;
                if (!pass && result.exit_code == 0) result.exit_code = 4;
            } else {
                const int local_dim =
                    cfg.local_dim > 0 ? cfg.local_dim : 2 * cfg.excitations + 1;
                const LLStateVector oracle =
                    ll_oracle_state(cfg.ll_params(), ll_rapidities, local_dim);
                const double scale = std::max(oracle.max_abs(), 1e-300);
                double max_rel = 0.0;
                ordered_json table = ordered_json::object();
                for (const auto& occ : enumerate_occupations(cfg.sites, cfg.excitations,
                                                             2 * cfg.excitations)) {
                    const std::string key = jobdetail::occupation_key(occ);
                    cplx amp(0.0, 0.0);
                    for (const auto& [k2, v] : ll_amp_table)
                        if (k2 == key) amp = v;
                    const cplx ref = oracle.amplitudes[oracle.index_of(occ.occupations)];
                    const double rel = std::abs(amp - ref) / scale;
                    max_rel = std::max(max_rel, rel);
                    table[key] = {{"mps", jobdetail::dump_complex(amp)},
                                  {"oracle", jobdetail::dump_complex(ref)},
                                  {"rel_diff", rel}};
                }
                task["local_dim"] = local_dim;
                task["table"] = table;
                task["max_rel_diff"] = max_rel;
                const bool pass = max_rel <= 1e-10;
                task["pass"] = pass;
                if (!pass && result.exit_code == 0) result.exit_code = 4;
            }
        } catch (const BetheError& e) {
            jobdetail::record_error(report, result.exit_code, "oracle-check", e);
        }
        report["tasks"]["oracle-check"] = task;
    }

    if (requested("algebra-check")) {
        ordered_json task;
        jobdetail::TaskTimer timer(report["timing_ms"]["algebra-check"]);
        try {
            if (cfg.is_spin()) {
                const CheckReport r = run_algebra_checks(
                    cfg.kernel(), std::min(cfg.chain_length, kMaxReflectionChain),
                    cfg.samples, cfg.seed);
                task["yang_baxter"] = r.yang_baxter;
                task["reflection"] = r.reflection;
                task["q_tilde_trace"] = r.q_tilde_trace;
                task["b_commutation"] = r.b_commutation;
                task["transfer_commutation"] = r.transfer_commutation;
                task["samples"] = r.samples;
                const bool pass = r.worst() <= 1e-10;
                task["pass"] = pass;
                if (!pass && result.exit_code == 0) result.exit_code = 4;
            } else {
                const LLParams p = cfg.ll_params();
                const int local_dim = std::max(6, cfg.local_dim);
                std::mt19937_64 rng(cfg.seed);
                auto draw = [&]() {
                    return -1.0 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
                };
                double dq = 0.0, inv = 0.0, twine = 0.0, bcomm = 0.0;
                for (int s = 0; s < std::max(1, cfg.samples); ++s) {
                    const double mu = draw(), l1 = draw(), l2 = draw() + 1.2;
                    dq = std::max(dq, ll_quantum_determinant_residual(p, mu, local_dim));
                    inv = std::max(inv, ll_inverse_residual(p, mu, local_dim));
                    twine = std::max(twine, ll_intertwining_residual(p, l1, l2, local_dim));
                    bcomm = std::max(bcomm, ll_b_commutation_residual(p, l1, l2));
                }
                task["quantum_determinant"] = dq;
                task["l_inverse"] = inv;
                task["intertwining"] = twine;
                task["b_commutation"] = bcomm;
                task["samples"] = std::max(1, cfg.samples);
                const bool pass =
                    dq <= 1e-10 && inv <= 1e-10 && twine <= 1e-10 && bcomm <= 1e-10;
                task["pass"] = pass;
                if (!pass && result.exit_code == 0) result.exit_code = 4;
            }
        } catch (const BetheError& e) {
            jobdetail::record_error(report, result.exit_code, "algebra-check", e);
        }
        report["tasks"]["algebra-check"] = task;
    }

    report["exit_code"] = result.exit_code;

    if (!cfg.output_path.empty()) {
        std::ofstream out(cfg.output_path);
        if (!out)
            throw BetheError(ErrorKind::Validation,
                             "cannot open output path '" + cfg.output_path + "'");
        out << report.dump(2) << "\n";
    }
    return result;
}

// Fixed-width task summary for standard output.
inline std::string render_summary(const ExecutionResult& result) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "task" << std::setw(10) << "status"
       << "detail\n";
    const auto& tasks = result.report["tasks"];
    for (auto it = tasks.begin(); it != tasks.end(); ++it) {
        const auto& t = it.value();
        std::string status = "ok";
        if (t.contains("pass")) status = t["pass"].get<bool>() ? "pass" : "FAIL";
        if (t.contains("converged") && !t["converged"].get<bool>()) status = "FAIL";
        std::ostringstream detail;
        detail.setf(std::ios::scientific);
        detail << std::setprecision(3);
        if (t.contains("residual_norm"))
            detail << "residual " << t["residual_norm"].get<double>() << "  ";
        if (t.contains("max_abs")) detail << "max|amp| " << t["max_abs"].get<double>() << "  ";
        if (t.contains("overlap")) detail << "overlap " << t["overlap"].get<double>() << "  ";
        if (t.contains("matched_energy"))
            detail << "E " << t["matched_energy"].get<double>() << "  ";
        if (t.contains("max_rel_diff"))
            detail << "max rel diff " << t["max_rel_diff"].get<double>() << "  ";
        if (t.contains("yang_baxter"))
            detail << "worst residual "
                   << std::max({t["yang_baxter"].get<double>(), t["reflection"].get<double>(),
                                t["q_tilde_trace"].get<double>(),
                                t["b_commutation"].get<double>(),
                                t["transfer_commutation"].get<double>()})
                   << "  ";
        if (t.contains("quantum_determinant"))
            detail << "worst residual "
                   << std::max({t["quantum_determinant"].get<double>(),
                                t["l_inverse"].get<double>(),
                                t["intertwining"].get<double>(),
                                t["b_commutation"].get<double>()})
                   << "  ";
        os << std::left << std::setw(16) << it.key() << std::setw(10) << status
           << detail.str() << "\n";
    }
    for (const auto& e : result.report["errors"])
        os << "error[" << e["task"].get<std::string>() << "] "
           << e["kind"].get<std::string>() << ": " << e["message"].get<std::string>() << "\n";
    os << "exit code " << result.exit_code << "\n";
    return os.str();
}

}  // namespace bethemps

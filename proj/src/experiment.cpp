#include "qenc/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qenc/closed_evolution.hpp"
#include "qenc/encoding.hpp"
#include "qenc/fitting.hpp"
#include "qenc/lindblad.hpp"
#include "qenc/parallel.hpp"
#include "qenc/sampling.hpp"
#include "qenc/version.hpp"

namespace qenc {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
    if (used != v.size())
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    return x;
}

long parse_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long x = 0;
    try {
        x = std::stol(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    }
    if (used != v.size())
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::closed: return "closed";
        case Method::lindblad_analytic: return "lindblad_analytic";
        case Method::lindblad_rk4: return "lindblad_rk4";
        case Method::mps: return "mps";
        case Method::exact_oracle: return "exact_oracle";
    }
    return "?";
}

std::string to_string(EnsembleKind e) {
    switch (e) {
        case EnsembleKind::bell_grid: return "bell_grid";
        case EnsembleKind::logical_grid: return "logical_grid";
        case EnsembleKind::single: return "single";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    model.validate();
    tdvp.validate();
    if (ensemble_thin < 1) throw std::invalid_argument("ensemble_thin must be >= 1");
    if (observe_every < 1) throw std::invalid_argument("observe_every must be >= 1");
    if (strategies.empty()) throw std::invalid_argument("at least one strategy required");
    for (const auto& s : strategies) parse_strategy(s);
    parse_strategy(logical_strategy);
    if (single_basis != "bell" && single_basis != "eigen")
        throw std::invalid_argument("single_basis must be bell or eigen");
    if (method == Method::exact_oracle || method == Method::mps) {
        if (model.n_modes < 1 && method == Method::exact_oracle)
            throw std::invalid_argument("exact_oracle requires n_modes >= 1");
    }
    if (method == Method::exact_oracle && full_dimension(model) > dim_cap)
        throw std::invalid_argument("exact_oracle: dimension exceeds dim_cap");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "delta", "nu", "alpha", "omega_c", "n_modes", "n_bos", "ohmic_exponent",
        "cutoff_kind", "q0", "spectral_consistent", "dt", "krylov_tol",
        "trunc_threshold", "d_max", "t_final", "max_krylov", "method", "ensemble",
        "ensemble_thin", "strategies", "logical_strategy", "single_state",
        "single_basis", "observe_every", "out_dir", "workers", "write_realizations",
        "write_rho", "fit", "allow_unspecified_coherences", "dim_cap"};
    return keys;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "delta") cfg.model.delta = parse_double(key, value);
    else if (key == "nu") cfg.model.nu = parse_double(key, value);
    else if (key == "alpha") cfg.model.alpha = parse_double(key, value);
    else if (key == "omega_c") cfg.model.omega_c = parse_double(key, value);
    else if (key == "n_modes") cfg.model.n_modes = static_cast<int>(parse_int(key, value));
    else if (key == "n_bos") cfg.model.n_bos = static_cast<int>(parse_int(key, value));
    else if (key == "ohmic_exponent") cfg.model.ohmic_exponent = parse_double(key, value);
    else if (key == "cutoff_kind") {
        if (value == "hard") cfg.model.cutoff_kind = CutoffKind::hard;
        else if (value == "exponential") cfg.model.cutoff_kind = CutoffKind::exponential;
        else throw std::invalid_argument("config: cutoff_kind must be hard or exponential");
    } else if (key == "q0") cfg.model.q0 = parse_double(key, value);
    else if (key == "spectral_consistent") cfg.model.spectral_consistent = parse_bool(key, value);
    else if (key == "dt") cfg.tdvp.dt = parse_double(key, value);
    else if (key == "krylov_tol") cfg.tdvp.krylov_tol = parse_double(key, value);
    else if (key == "trunc_threshold") cfg.tdvp.trunc_threshold = parse_double(key, value);
    else if (key == "d_max") cfg.tdvp.d_max = static_cast<int>(parse_int(key, value));
    else if (key == "t_final") cfg.tdvp.t_final = parse_double(key, value);
    else if (key == "max_krylov") cfg.tdvp.max_krylov = static_cast<int>(parse_int(key, value));
    else if (key == "method") {
        if (value == "closed") cfg.method = Method::closed;
        else if (value == "lindblad_analytic") cfg.method = Method::lindblad_analytic;
        else if (value == "lindblad_rk4") cfg.method = Method::lindblad_rk4;
        else if (value == "mps") cfg.method = Method::mps;
        else if (value == "exact_oracle") cfg.method = Method::exact_oracle;
        else throw std::invalid_argument("config: unknown method '" + value + "'");
    } else if (key == "ensemble") {
        if (value == "bell_grid") cfg.ensemble = EnsembleKind::bell_grid;
        else if (value == "logical_grid") cfg.ensemble = EnsembleKind::logical_grid;
        else if (value == "single") cfg.ensemble = EnsembleKind::single;
        else throw std::invalid_argument("config: unknown ensemble '" + value + "'");
    } else if (key == "ensemble_thin") cfg.ensemble_thin = static_cast<int>(parse_int(key, value));
    else if (key == "strategies") cfg.strategies = split(value, ',');
    else if (key == "logical_strategy") cfg.logical_strategy = value;
    else if (key == "single_state") cfg.single_state = value;
    else if (key == "single_basis") cfg.single_basis = value;
    else if (key == "observe_every") cfg.observe_every = static_cast<int>(parse_int(key, value));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
    else if (key == "write_realizations") cfg.write_realizations = parse_bool(key, value);
    else if (key == "write_rho") cfg.write_rho = parse_bool(key, value);
    else if (key == "fit") cfg.fit = parse_bool(key, value);
    else if (key == "allow_unspecified_coherences")
        cfg.allow_unspecified_coherences = parse_bool(key, value);
    else if (key == "dim_cap") cfg.dim_cap = parse_int(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto emit = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    emit("delta", fmt17(cfg.model.delta));
    emit("nu", fmt17(cfg.model.nu));
    emit("alpha", fmt17(cfg.model.alpha));
    emit("omega_c", fmt17(cfg.model.omega_c));
    emit("n_modes", std::to_string(cfg.model.n_modes));
    emit("n_bos", std::to_string(cfg.model.n_bos));
    emit("ohmic_exponent", fmt17(cfg.model.ohmic_exponent));
    emit("cutoff_kind", cfg.model.cutoff_kind == CutoffKind::hard ? "hard" : "exponential");
    emit("q0", fmt17(cfg.model.q0));
    emit("spectral_consistent", cfg.model.spectral_consistent ? "true" : "false");
    emit("dt", fmt17(cfg.tdvp.dt));
    emit("krylov_tol", fmt17(cfg.tdvp.krylov_tol));
    emit("trunc_threshold", fmt17(cfg.tdvp.trunc_threshold));
    emit("d_max", std::to_string(cfg.tdvp.d_max));
    emit("t_final", fmt17(cfg.tdvp.t_final));
    emit("max_krylov", std::to_string(cfg.tdvp.max_krylov));
    emit("method", to_string(cfg.method));
    emit("ensemble", to_string(cfg.ensemble));
    emit("ensemble_thin", std::to_string(cfg.ensemble_thin));
    std::string strategies;
    for (std::size_t i = 0; i < cfg.strategies.size(); ++i)
        strategies += (i ? "," : "") + cfg.strategies[i];
    emit("strategies", strategies);
    emit("logical_strategy", cfg.logical_strategy);
    emit("single_state", cfg.single_state);
    emit("single_basis", cfg.single_basis);
    emit("observe_every", std::to_string(cfg.observe_every));
    emit("out_dir", cfg.out_dir);
    emit("workers", std::to_string(cfg.workers));
    emit("write_realizations", cfg.write_realizations ? "true" : "false");
    emit("write_rho", cfg.write_rho ? "true" : "false");
    emit("fit", cfg.fit ? "true" : "false");
    emit("allow_unspecified_coherences", cfg.allow_unspecified_coherences ? "true" : "false");
    emit("dim_cap", std::to_string(cfg.dim_cap));
    return os.str();
}

namespace {

TwoQubitState parse_single_state(const ExperimentConfig& cfg) {
    const std::string& name = cfg.single_state;
    TwoQubitState s;
    if (name == "S") s = bell_state(kSinglet);
    else if (name == "TAF") s = bell_state(kTripletAF);
    else if (name == "TF+") s = bell_state(kTripletFp);
    else if (name == "TF-") s = bell_state(kTripletFm);
    else if (name == "quasi_ferromagnetic") {
        // (|1> + e^{i pi/4} |3>)/sqrt(2) in the energy eigenbasis
        const auto es = eigensystem(cfg.model);
        s.amps = (es.states[1].amps +
                  std::exp(cplx(0.0, std::numbers::pi / 4.0)) * es.states[3].amps) /
                 std::sqrt(2.0);
        return s.normalized();
    } else {
        const auto parts = split(name, ',');
        if (parts.size() != 8)
            throw std::invalid_argument(
                "single_state must be S, TAF, TF+, TF-, quasi_ferromagnetic or 8 reals");
        Vector4cd v;
        for (int i = 0; i < 4; ++i)
            v[i] = cplx(parse_double("single_state", parts[2 * i]),
                        parse_double("single_state", parts[2 * i + 1]));
        if (cfg.single_basis == "eigen") {
            const auto es = eigensystem(cfg.model);
            Vector4cd bell = Vector4cd::Zero();
            for (int i = 0; i < 4; ++i) bell += v[i] * es.states[i].amps;
            v = bell;
        }
        s.amps = v;
    }
    if (std::abs(s.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("single_state is not normalized");
    return s;
}

}  // namespace

Ensemble build_ensemble(const ExperimentConfig& cfg) {
    Ensemble e;
    switch (cfg.ensemble) {
        case EnsembleKind::bell_grid: {
            const auto all = enumerate_bell_grid();
            for (std::size_t i = 0; i < all.size(); i += cfg.ensemble_thin) {
                e.ids.push_back(static_cast<int>(i));
                e.states.push_back(all[i]);
            }
            break;
        }
        case EnsembleKind::logical_grid: {
            const auto strat = parse_strategy(cfg.logical_strategy);
            const auto grid = logical_grid();
            for (std::size_t i = 0; i < grid.size(); i += cfg.ensemble_thin) {
                e.ids.push_back(static_cast<int>(i));
                e.states.push_back(
                    logical_initial_state(strat, grid[i].first, grid[i].second));
            }
            break;
        }
        case EnsembleKind::single:
            e.ids.push_back(0);
            e.states.push_back(parse_single_state(cfg));
            break;
    }
    return e;
}

namespace {

// Open-system trajectory on the sample grid, Bell basis.
std::vector<DensityMatrix4> open_trajectory(const ExperimentConfig& cfg,
                                            const TwoQubitState& state0,
                                            const std::vector<double>& t_grid,
                                            const ExactOracle* oracle,
                                            TdvpDiagnostics* diag) {
    const auto es = eigensystem(cfg.model);
    std::vector<DensityMatrix4> out;
    out.reserve(t_grid.size());
    switch (cfg.method) {
        case Method::closed: {
            for (double t : t_grid)
                out.push_back(DensityMatrix4::pure(propagate_closed(state0, cfg.model, t)));
            break;
        }
        case Method::lindblad_analytic: {
            const auto rates = decay_rate(cfg.model);
            const auto rho0 = to_eigen(DensityMatrix4::pure(state0), es);
            for (double t : t_grid) {
                auto rho = analytic_density(rho0, rates, t, cfg.allow_unspecified_coherences);
                out.push_back(to_bell(interaction_to_schroedinger(rho, es, t), es));
            }
            break;
        }
        case Method::lindblad_rk4: {
            const auto rho0 = to_eigen(DensityMatrix4::pure(state0), es);
            const auto traj =
                rk4_lindblad(rho0, cfg.model, cfg.tdvp.dt, cfg.tdvp.t_final);
            for (std::size_t j = 0; j < t_grid.size(); ++j) {
                const std::size_t idx = j * cfg.observe_every;
                if (idx >= traj.size()) throw std::logic_error("rk4 grid mismatch");
                out.push_back(to_bell(traj[idx], es));
            }
            break;
        }
        case Method::mps: {
            const auto traj =
                tdvp_evolve(state0, cfg.model, cfg.tdvp, cfg.observe_every, diag);
            if (traj.size() != t_grid.size()) throw std::logic_error("mps grid mismatch");
            for (const auto& s : traj) out.push_back(s.rho);
            break;
        }
        case Method::exact_oracle: {
            out = oracle->trajectory(state0, t_grid, 1);
            break;
        }
    }
    return out;
}

struct RealizationMetrics {
    // metric name -> strategy -> series over time
    std::map<std::string, std::map<std::string, std::vector<double>>> values;
    std::vector<DensityMatrix4> open_bell;  // kept when write_rho
    TdvpDiagnostics diag;
};

RealizationMetrics compute_metrics(const ExperimentConfig& cfg, const TwoQubitState& state0,
                                   const std::vector<double>& t_grid,
                                   const ExactOracle* oracle, bool keep_rho) {
    RealizationMetrics rm;
    auto open = open_trajectory(cfg, state0, t_grid, oracle, &rm.diag);
    const DensityMatrix4 rho_init = DensityMatrix4::pure(state0);

    std::vector<DensityMatrix4> closed;
    closed.reserve(t_grid.size());
    for (double t : t_grid)
        closed.push_back(DensityMatrix4::pure(propagate_closed(state0, cfg.model, t)));

    // strategy-independent two-qubit metrics
    auto& fid_full = rm.values["fidelity"]["full"];
    auto& pur_full = rm.values["purity"]["full"];
    fid_full.resize(t_grid.size());
    pur_full.resize(t_grid.size());
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        fid_full[j] = uhlmann_fidelity(open[j].m, closed[j].m);
        pur_full[j] = purity(open[j].m);
    }

    for (const auto& name : cfg.strategies) {
        const auto strat = parse_strategy(name);
        auto& fid = rm.values["fidelity"][name];
        auto& pur = rm.values["purity"][name];
        fid.resize(t_grid.size());
        pur.resize(t_grid.size());
        std::vector<double>* leak = nullptr;
        if (!strat.physical) {
            leak = &rm.values["leakage"][name];
            leak->resize(t_grid.size());
        }
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
            if (strat.physical) {
                const Matrix2cd ro = reduce_to_qubit1(open[j]);
                const Matrix2cd rc = reduce_to_qubit1(closed[j]);
                fid[j] = uhlmann_fidelity(ro, rc);
                pur[j] = purity(ro);
            } else {
                const auto eo = encoded_dm(open[j], strat);
                const auto ec = encoded_dm(closed[j], strat);
                fid[j] = uhlmann_fidelity(eo.rho, ec.rho);
                pur[j] = purity(eo.rho);
                (*leak)[j] = leakage(strat, rho_init, open[j]);
            }
        }
    }
    if (keep_rho) rm.open_bell = std::move(open);
    return rm;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows,
               std::vector<std::string>* files) {
    std::ofstream os(path, std::ios::binary);  // LF line endings everywhere
    if (!os) throw std::runtime_error("cannot write " + path);
    os << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    if (files) files->push_back(path);
}

void write_series_csv(const std::string& path, const TimeSeries& ts,
                      const std::vector<int>& ids, bool with_realizations,
                      std::vector<std::string>* files) {
    std::string header = "t,mean,std";
    if (with_realizations)
        for (int id : ids) header += ",r" + std::to_string(id);
    std::vector<std::vector<std::string>> rows(ts.times.size());
    for (std::size_t j = 0; j < ts.times.size(); ++j) {
        auto& row = rows[j];
        row.push_back(fmt17(ts.times[j]));
        row.push_back(fmt17(ts.mean[j]));
        row.push_back(fmt17(ts.std_dev[j]));
        if (with_realizations)
            for (std::size_t r = 0; r < ts.per_realization.size(); ++r)
                row.push_back(fmt17(ts.per_realization[r][j]));
    }
    write_csv(path, header, rows, files);
}

std::string strategy_file_tag(const std::string& name) {
    std::string tag;
    for (char c : name)
        if (std::isalnum(static_cast<unsigned char>(c))) tag += c;
        else if (c == '.' || c == ',') tag += '_';
    return tag;
}

void write_rho_csv(const std::string& path, const std::vector<double>& t_grid,
                   const std::vector<DensityMatrix4>& rhos,
                   std::vector<std::string>* files) {
    std::string header = "t";
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            header += ",re_rho" + std::to_string(i) + std::to_string(j);
            header += ",im_rho" + std::to_string(i) + std::to_string(j);
        }
    std::vector<std::vector<std::string>> rows(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        rows[k].push_back(fmt17(t_grid[k]));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                rows[k].push_back(fmt17(rhos[k].m(i, j).real()));
                rows[k].push_back(fmt17(rhos[k].m(i, j).imag()));
            }
    }
    write_csv(path, header, rows, files);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    if (cfg.out_dir.empty()) {
        if (const char* env = std::getenv("QENC_OUT_DIR")) cfg.out_dir = env;
        else throw std::invalid_argument("out_dir not set (config key or QENC_OUT_DIR)");
    }
    cfg.validate();
    if (cfg.method == Method::mps && (cfg.model.n_modes >= 100 || cfg.tdvp.t_final >= 100))
        std::cerr << "note: large chain or horizon (n_modes = " << cfg.model.n_modes
                  << ", t_final = " << cfg.tdvp.t_final
                  << "); expect long run times\n";
    const auto wall_start = std::chrono::steady_clock::now();

    fs::create_directories(cfg.out_dir);
    const Ensemble ensemble = build_ensemble(cfg);

    // common sample grid
    const double sample_dt = cfg.tdvp.dt * cfg.observe_every;
    const long n_steps = static_cast<long>(std::floor(cfg.tdvp.t_final / cfg.tdvp.dt + 1e-9));
    std::vector<double> t_grid;
    for (long s = 0; s <= n_steps; s += cfg.observe_every)
        t_grid.push_back(double(s / cfg.observe_every) * sample_dt);

    std::optional<ExactOracle> oracle;
    if (cfg.method == Method::exact_oracle) oracle.emplace(cfg.model, cfg.dim_cap);

    const std::size_t nr = ensemble.states.size();
    std::vector<RealizationMetrics> per_real(nr);
    std::vector<std::string> failures(nr);
    const bool keep_rho = cfg.write_rho || cfg.ensemble == EnsembleKind::single;
    par::for_each_index(nr, cfg.workers, [&](std::size_t r) {
        try {
            per_real[r] = compute_metrics(cfg, ensemble.states[r], t_grid,
                                          oracle ? &*oracle : nullptr, keep_rho);
        } catch (const std::exception& ex) {
            failures[r] = ex.what();
        }
    });

    std::vector<std::string> failed;
    for (std::size_t r = 0; r < nr; ++r)
        if (!failures[r].empty())
            failed.push_back("r" + std::to_string(ensemble.ids[r]) + ": " + failures[r]);

    RunResult result;
    result.times = t_grid;

    if (failed.empty()) {
        // metric -> strategy -> matrix in realization order; "full" holds the
        // strategy-independent two-qubit metrics
        std::vector<std::string> outputs = {"full"};
        outputs.insert(outputs.end(), cfg.strategies.begin(), cfg.strategies.end());
        for (const auto& name : outputs) {
            const bool full = name == "full";
            const bool physical = !full && parse_strategy(name).physical;
            const std::vector<std::string> metric_names =
                (full || physical) ? std::vector<std::string>{"fidelity", "purity"}
                                   : std::vector<std::string>{"fidelity", "purity", "leakage"};
            for (const auto& metric : metric_names) {
                std::vector<std::vector<double>> rows(nr);
                for (std::size_t r = 0; r < nr; ++r)
                    rows[r] = per_real[r].values.at(metric).at(name);
                auto ts = aggregate(metric + "_" + name, t_grid, rows);
                write_series_csv(cfg.out_dir + "/" + metric + "_" + strategy_file_tag(name) +
                                     ".csv",
                                 ts, ensemble.ids, cfg.write_realizations,
                                 &result.files_written);
                if (cfg.fit && metric == "fidelity") {
                    std::ofstream os(cfg.out_dir + "/fit_fidelity_" +
                                     strategy_file_tag(name) + ".txt");
                    try {
                        const auto fr = fit_fidelity(ts.times, ts.mean);
                        os << "c1 = " << fmt17(fr.c1) << "\nc2 = " << fmt17(fr.c2)
                           << "\nc3 = " << fmt17(fr.c3) << "\nc4 = " << fmt17(fr.c4)
                           << "\ntau = " << fmt17(fr.tau())
                           << "\nresidual_rms = " << fmt17(fr.residual_rms)
                           << "\nconverged = " << (fr.converged ? "true" : "false")
                           << "\nno_decay = " << (fr.no_decay ? "true" : "false")
                           << "\nunidentifiable = " << (fr.unidentifiable ? "true" : "false")
                           << "\nextrapolated_t200 = "
                           << (fr.unidentifiable ? "nan" : fmt17(extrapolate(fr, 200.0)))
                           << "\n";
                    } catch (const std::exception& ex) {
                        os << "error = " << ex.what() << "\n";
                    }
                }
                result.series[metric][name] = std::move(ts);
            }
        }

        // ensemble states
        {
            std::vector<std::vector<std::string>> rows(nr);
            for (std::size_t r = 0; r < nr; ++r) {
                rows[r].push_back(std::to_string(ensemble.ids[r]));
                for (int i = 0; i < 4; ++i) {
                    rows[r].push_back(fmt17(ensemble.states[r].amps[i].real()));
                    rows[r].push_back(fmt17(ensemble.states[r].amps[i].imag()));
                }
            }
            write_csv(cfg.out_dir + "/states.csv",
                      "index,re_dS,im_dS,re_dTAF,im_dTAF,re_dTFp,im_dTFp,re_dTFm,im_dTFm",
                      rows, &result.files_written);
        }

        if (cfg.write_rho)
            for (std::size_t r = 0; r < nr; ++r) {
                char name[64];
                std::snprintf(name, sizeof(name), "rho_open_r%04d.csv", ensemble.ids[r]);
                write_rho_csv(cfg.out_dir + "/" + name, t_grid, per_real[r].open_bell,
                              &result.files_written);
            }

        if (cfg.ensemble == EnsembleKind::single) {
            // eigenbasis elements of the open trajectory
            const auto es = eigensystem(cfg.model);
            std::vector<std::vector<std::string>> rows(t_grid.size());
            for (std::size_t j = 0; j < t_grid.size(); ++j) {
                const auto re = to_eigen(per_real[0].open_bell[j], es);
                auto& row = rows[j];
                row.push_back(fmt17(t_grid[j]));
                for (int i = 0; i < 4; ++i) row.push_back(fmt17(re.m(i, i).real()));
                const int pairs[3][2] = {{0, 1}, {0, 3}, {1, 3}};
                for (const auto& pr : pairs) {
                    row.push_back(fmt17(re.m(pr[0], pr[1]).real()));
                    row.push_back(fmt17(re.m(pr[0], pr[1]).imag()));
                }
                row.push_back(fmt17(std::abs(re.m(1, 3))));
            }
            write_csv(cfg.out_dir + "/dm_elements.csv",
                      "t,rho00,rho11,rho22,rho33,re_rho01,im_rho01,re_rho03,im_rho03,"
                      "re_rho13,im_rho13,abs_rho13",
                      rows, &result.files_written);
        }
    }

    // config echo + metadata
    {
        std::ofstream os(cfg.out_dir + "/config.txt", std::ios::binary);
        os << serialize_config(cfg);
    }
    {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
                .count();
        std::ofstream os(cfg.out_dir + "/metadata.txt");
        os << "version = " << kVersion << "\n";
        os << "csv_schema = " << kCsvSchemaVersion << "\n";
        os << "bell_order = S,TAF,TF+,TF-\n";
        os << "gauge_rule = first nonzero coefficient has phase 0\n";
        os << "site_order = qubit1,qubit2,modes by increasing frequency\n";
        os << "mpo_automaton = identity-passed/sigma_z-carrier/completed\n";
        os << "std_convention = population\n";
        os << "realizations = " << nr << "\n";
        if (cfg.method == Method::mps) {
            long max_bond = 1;
            int saturated = 0;
            double trunc = 0.0, drift = 0.0;
            for (const auto& rm : per_real) {
                max_bond = std::max(max_bond, rm.diag.max_bond_dim);
                saturated += rm.diag.saturated ? 1 : 0;
                trunc = std::max(trunc, rm.diag.trunc_log);
                drift = std::max(drift, rm.diag.norm_drift);
            }
            os << "max_bond_dim = " << max_bond << "\n";
            os << "saturated_realizations = " << saturated << "\n";
            os << "max_trunc_log = " << trunc << "\n";
            os << "max_norm_drift = " << drift << "\n";
        }
        os << "wall_seconds = " << wall << "\n";
        os << "failures = " << (failed.empty() ? "none" : std::to_string(failed.size()))
           << "\n";
        for (const auto& f : failed) os << "failure: " << f << "\n";
        os << "--- config ---\n" << serialize_config(cfg);
    }

    if (!failed.empty())
        throw std::runtime_error("run failed for " + std::to_string(failed.size()) +
                                 " realization(s); see metadata.txt in " + cfg.out_dir);
    return result;
}

namespace {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty csv " + path);
    for (auto& c : split(line, ',')) t.columns.push_back(c);
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto parts = split(line, ',');
        std::vector<double> row;
        row.reserve(parts.size());
        for (const auto& p : parts) row.push_back(parse_double("csv", p));
        if (row.size() != t.columns.size())
            throw std::runtime_error("ragged csv " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

RunResult encode_metrics(const std::string& run_dir,
                         const std::vector<std::string>& strategies) {
    const ExperimentConfig cfg = load_config_file(run_dir + "/config.txt");
    const Ensemble ensemble = build_ensemble(cfg);
    const std::size_t nr = ensemble.states.size();

    RunResult result;
    std::vector<std::vector<DensityMatrix4>> open(nr);
    std::vector<double> t_grid;
    for (std::size_t r = 0; r < nr; ++r) {
        char name[64];
        std::snprintf(name, sizeof(name), "rho_open_r%04d.csv", ensemble.ids[r]);
        const auto table = read_csv(run_dir + "/" + name);
        if (table.columns.size() != 33)
            throw std::runtime_error("unexpected rho csv layout in " + run_dir);
        open[r].resize(table.rows.size());
        for (std::size_t k = 0; k < table.rows.size(); ++k) {
            if (r == 0) t_grid.push_back(table.rows[k][0]);
            Matrix4cd m;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    m(i, j) = cplx(table.rows[k][1 + 2 * (4 * i + j)],
                                   table.rows[k][2 + 2 * (4 * i + j)]);
            open[r][k] = {m, DmBasis::bell};
        }
    }
    result.times = t_grid;

    for (const auto& name : strategies) {
        const auto strat = parse_strategy(name);
        std::map<std::string, std::vector<std::vector<double>>> rows;
        for (std::size_t r = 0; r < nr; ++r) {
            const auto& state0 = ensemble.states[r];
            const DensityMatrix4 rho_init = DensityMatrix4::pure(state0);
            std::vector<double> fid(t_grid.size()), pur(t_grid.size()), leak(t_grid.size());
            for (std::size_t j = 0; j < t_grid.size(); ++j) {
                const auto closed =
                    DensityMatrix4::pure(propagate_closed(state0, cfg.model, t_grid[j]));
                if (strat.physical) {
                    fid[j] = uhlmann_fidelity(reduce_to_qubit1(open[r][j]),
                                              reduce_to_qubit1(closed));
                    pur[j] = purity(reduce_to_qubit1(open[r][j]));
                } else {
                    const auto eo = encoded_dm(open[r][j], strat);
                    const auto ec = encoded_dm(closed, strat);
                    fid[j] = uhlmann_fidelity(eo.rho, ec.rho);
                    pur[j] = purity(eo.rho);
                    leak[j] = leakage(strat, rho_init, open[r][j]);
                }
            }
            rows["fidelity"].push_back(std::move(fid));
            rows["purity"].push_back(std::move(pur));
            if (!strat.physical) rows["leakage"].push_back(std::move(leak));
        }
        for (auto& [metric, data] : rows) {
            auto ts = aggregate(metric + "_" + name, t_grid, data);
            write_series_csv(run_dir + "/" + metric + "_" + strategy_file_tag(name) + ".csv",
                             ts, ensemble.ids, cfg.write_realizations,
                             &result.files_written);
            result.series[metric][name] = std::move(ts);
        }
    }
    return result;
}

CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b,
                           const std::string& out_path) {
    CompareReport report;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const std::string fname = entry.path().filename().string();
        if (fname.size() < 4 || fname.substr(fname.size() - 4) != ".csv") continue;
        if (fname.rfind("rho_open_", 0) == 0 || fname == "states.csv") continue;
        if (fs::exists(fs::path(dir_b) / fname)) names.push_back(fname);
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) throw std::runtime_error("compare: no common csv files");

    std::vector<std::vector<std::string>> rows;
    std::string header = "t";
    bool first_file = true;
    for (const auto& fname : names) {
        const auto ta = read_csv(dir_a + "/" + fname);
        const auto tb = read_csv(dir_b + "/" + fname);
        if (ta.columns != tb.columns || ta.rows.size() != tb.rows.size())
            throw std::runtime_error("compare: layout mismatch in " + fname);
        for (std::size_t k = 0; k < ta.rows.size(); ++k)
            if (ta.rows[k][0] != tb.rows[k][0])
                throw std::runtime_error("compare: time grids differ in " + fname);
        if (first_file) {
            rows.resize(ta.rows.size());
            for (std::size_t k = 0; k < ta.rows.size(); ++k)
                rows[k].push_back(fmt17(ta.rows[k][0]));
            first_file = false;
        } else if (rows.size() != ta.rows.size()) {
            throw std::runtime_error("compare: time grids differ between files");
        }
        const std::string stem = fname.substr(0, fname.size() - 4);
        // side-by-side population/coherence values for the element tables
        const bool both_values = fname == "dm_elements.csv";
        for (std::size_t c = 1; c < ta.columns.size(); ++c) {
            if (both_values) {
                header += ",a_" + stem + "." + ta.columns[c];
                header += ",b_" + stem + "." + ta.columns[c];
            }
            header += ",d_" + stem + "." + ta.columns[c];
            double max_diff = 0.0;
            for (std::size_t k = 0; k < ta.rows.size(); ++k) {
                const double d = std::abs(ta.rows[k][c] - tb.rows[k][c]);
                max_diff = std::max(max_diff, d);
                if (both_values) {
                    rows[k].push_back(fmt17(ta.rows[k][c]));
                    rows[k].push_back(fmt17(tb.rows[k][c]));
                }
                rows[k].push_back(fmt17(d));
            }
            report.columns.push_back(stem + "." + ta.columns[c]);
            report.max_abs_diff.push_back(max_diff);
        }
    }
    write_csv(out_path, header, rows, nullptr);
    report.report_path = out_path;
    return report;
}

}  // namespace qenc

// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
//
// Experiment orchestration: scenario configuration, validation, seeded
// execution, and file emission (CSV series, JSON fit/metadata, grid dumps).
#ifndef TORUSQC_RUNNER_HPP
#define TORUSQC_RUNNER_HPP

#include <torusqc/density.hpp>
#include <torusqc/dynamics.hpp>
#include <torusqc/hilbert.hpp>
#include <torusqc/propagator.hpp>
#include <torusqc/qcf.hpp>
#include <torusqc/version.hpp>
#include <torusqc/wigner.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusqc {

/// Experiment scenarios.  Each one maps to a fixed set of output files in the
/// configured output directory (see run_experiment).
enum class Scenario { Series, T1Scan, Negativity, Echo, Snapshots, Lyapunov };

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::Series: return "series";
        case Scenario::T1Scan: return "t1scan";
        case Scenario::Negativity: return "negativity";
        case Scenario::Echo: return "echo";
        case Scenario::Snapshots: return "snapshots";
        case Scenario::Lyapunov: return "lyapunov";
    }
    return "series";
}

inline Scenario scenario_from_string(const std::string& s) {
    if (s == "series") return Scenario::Series;
    if (s == "t1scan") return Scenario::T1Scan;
    if (s == "negativity") return Scenario::Negativity;
    if (s == "echo") return Scenario::Echo;
    if (s == "snapshots") return Scenario::Snapshots;
    if (s == "lyapunov") return Scenario::Lyapunov;
    throw std::invalid_argument(
        "config: unknown scenario '" + s +
        "' (expected series, t1scan, negativity, echo, snapshots, or lyapunov)");
}

inline const char* to_string(MapKind k) {
    return k == MapKind::Sawtooth ? "sawtooth" : "pcat";
}

inline MapKind map_kind_from_string(const std::string& s) {
    if (s == "sawtooth") return MapKind::Sawtooth;
    if (s == "pcat") return MapKind::PerturbedCat;
    throw std::invalid_argument("config: unknown map '" + s +
                                "' (expected sawtooth or pcat)");
}

inline const char* to_string(Formalism f) {
    return f == Formalism::ContinuousAB ? "continuous" : "discrete";
}

inline Formalism formalism_from_string(const std::string& s) {
    if (s == "continuous") return Formalism::ContinuousAB;
    if (s == "discrete") return Formalism::DiscreteMiquel;
    throw std::invalid_argument("config: unknown formalism '" + s +
                                "' (expected continuous or discrete)");
}

namespace detail_run {

/// Parse a numeric value list: a scalar ("0.5"), a comma list ("0.1,0.5"),
/// or an inclusive range "start:stop:step" with step > 0.
inline std::vector<double> parse_double_list(const std::string& text) {
    auto bad = [&text]() {
        return std::invalid_argument("config: malformed numeric list '" + text +
                                     "'");
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double a = 0.0, b = 0.0, c = 0.0;
        char tail = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &a, &b, &c, &tail) != 3)
            throw bad();
        if (!(c > 0.0) || b < a)
            throw std::invalid_argument(
                "config: range '" + text +
                "' must satisfy start <= stop and step > 0");
        // Count-based expansion keeps the nodes free of accumulated
        // rounding drift; the epsilon admits stop itself.
        const long n = static_cast<long>(std::floor((b - a) / c + 1e-9));
        for (long i = 0; i <= n; ++i)
            out.push_back(a + static_cast<double>(i) * c);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string piece =
            text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(piece, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != piece.size()) throw bad();
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw bad();
    return out;
}

/// Parse an integer value list with the same grammar as parse_double_list.
inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) {
        double r = std::round(v);
        if (std::fabs(v - r) > 1e-9)
            throw std::invalid_argument("config: expected integer list, got '" +
                                        text + "'");
        out.push_back(static_cast<int>(r));
    }
    return out;
}

}  // namespace detail_run

/// Full description of one experiment run.  The strength lists (K, mu) and
/// the dimension list (N) hold a single entry for the pointwise scenarios and
/// multiple entries for the scan scenarios (t1scan over N, lyapunov over the
/// kick strength).
struct ExperimentConfig {
    MapKind map = MapKind::Sawtooth;
    std::vector<double> K{1.0};    ///< sawtooth kick strength(s)
    std::vector<double> mu{0.1};   ///< perturbed-cat kick strength(s)
    std::optional<double> K2;      ///< echo scenario: perturbed K (default: K)
    std::optional<double> mu2;     ///< echo scenario: perturbed mu (default: mu)
    int L = 1;                     ///< momentum period (integer >= 1)
    std::vector<int> N{101};       ///< Hilbert dimension(s)
    Formalism formalism = Formalism::ContinuousAB;
    double sigma = 1.0;            ///< packet squeezing parameter
    int steps = 20;                ///< time horizon (lyapunov: trajectory length)
    int ensemble = 1;              ///< packet-ensemble size (lyapunov: trajectories)
    std::uint64_t seed = 1;
    int resolution = 0;            ///< continuous quadrature nodes/axis; 0 -> 3N
    Scenario scenario = Scenario::Series;
    std::string out = ".";
};

/// Fail-fast validation.  Throws std::invalid_argument with one diagnostic
/// naming the violated constraint; no computation happens beforehand.
inline void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) {
        throw std::invalid_argument("config: " + msg);
    };
    if (cfg.L < 1) fail("L must be >= 1");
    if (cfg.N.empty()) fail("N must contain at least one value");
    const bool scan_n = cfg.scenario == Scenario::T1Scan;
    const bool scan_strength = cfg.scenario == Scenario::Lyapunov;
    const std::vector<double>& strengths =
        cfg.map == MapKind::Sawtooth ? cfg.K : cfg.mu;
    const char* sname = cfg.map == MapKind::Sawtooth ? "K" : "mu";
    if (strengths.empty())
        fail(std::string(sname) + " must contain at least one value");
    if (!scan_strength && strengths.size() != 1)
        fail(std::string("scenario '") + to_string(cfg.scenario) +
             "' requires a single " + sname + " value");
    if (!scan_n && cfg.N.size() != 1)
        fail(std::string("scenario '") + to_string(cfg.scenario) +
             "' requires a single N value");
    if (scan_n && cfg.N.size() < 3) fail("t1scan requires at least 3 values of N");
    if (cfg.scenario != Scenario::Lyapunov) {
        for (int n : cfg.N) {
            if (n < 2) fail("N must be >= 2");
            if (n % 2 == 1 && cfg.L % 2 == 1)
                fail("odd N requires even L (torus quantization constraint)");
            if (cfg.formalism == Formalism::ContinuousAB && n % 2 == 0)
                fail("continuous formalism requires odd N");
            if (cfg.resolution != 0 &&
                cfg.formalism == Formalism::ContinuousAB &&
                cfg.resolution < 2 * n + 1)
                fail("resolution must be >= 2N+1 (or 0 for the 3N default)");
        }
    }
    if (!(cfg.sigma > 0.0)) fail("sigma must be > 0");
    if (cfg.steps < 0) fail("steps must be >= 0");
    if (cfg.ensemble < 1) fail("ensemble must be >= 1");
    if (cfg.resolution < 0) fail("resolution must be >= 0");
    if (cfg.out.empty()) fail("out must name an output directory");
    if (cfg.scenario == Scenario::Lyapunov && cfg.steps < 1000)
        fail("lyapunov scenario needs steps (trajectory length) >= 1000");
    if ((cfg.scenario == Scenario::Snapshots || cfg.scenario == Scenario::Echo) &&
        cfg.formalism != Formalism::ContinuousAB)
        fail(std::string("scenario '") + to_string(cfg.scenario) +
             "' requires the continuous formalism");
}

/// Build an ExperimentConfig from JSON using the CLI flag names as keys.
/// Unknown keys are ignored, so a previously emitted meta.json can be fed
/// back in directly.  Numeric list keys (K, mu, N) accept a scalar, an
/// array, or a range/list string ("0:1:0.05", "256,512").
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& msg) {
        throw std::invalid_argument("config: " + msg);
    };
    if (!j.is_object()) fail("JSON config must be an object");
    auto doubles = [&fail](const nlohmann::json& v, const char* key) {
        std::vector<double> out;
        if (v.is_array()) {
            for (const auto& e : v) {
                if (!e.is_number())
                    fail(std::string("key '") + key + "' has a non-numeric entry");
                out.push_back(e.get<double>());
            }
            if (out.empty()) fail(std::string("key '") + key + "' is empty");
        } else if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_string()) {
            out = detail_run::parse_double_list(v.get<std::string>());
        } else {
            fail(std::string("key '") + key +
                 "' must be a number, an array, or a list string");
        }
        return out;
    };
    ExperimentConfig cfg;
    if (j.contains("map")) {
        if (!j["map"].is_string()) fail("key 'map' must be a string");
        cfg.map = map_kind_from_string(j["map"].get<std::string>());
    }
    if (j.contains("K")) cfg.K = doubles(j["K"], "K");
    if (j.contains("mu")) cfg.mu = doubles(j["mu"], "mu");
    if (j.contains("K2")) {
        if (!j["K2"].is_number()) fail("key 'K2' must be a number");
        cfg.K2 = j["K2"].get<double>();
    }
    if (j.contains("mu2")) {
        if (!j["mu2"].is_number()) fail("key 'mu2' must be a number");
        cfg.mu2 = j["mu2"].get<double>();
    }
    auto integer = [&fail](const nlohmann::json& v, const char* key) {
        if (!v.is_number_integer())
            fail(std::string("key '") + key + "' must be an integer");
        return v.get<long long>();
    };
    if (j.contains("L")) cfg.L = static_cast<int>(integer(j["L"], "L"));
    if (j.contains("N")) {
        const auto& v = j["N"];
        if (v.is_string()) {
            cfg.N = detail_run::parse_int_list(v.get<std::string>());
        } else {
            cfg.N.clear();
            for (double d : doubles(v, "N")) {
                if (d != std::floor(d)) fail("key 'N' must hold integers");
                cfg.N.push_back(static_cast<int>(d));
            }
        }
    }
    if (j.contains("formalism")) {
        if (!j["formalism"].is_string()) fail("key 'formalism' must be a string");
        cfg.formalism = formalism_from_string(j["formalism"].get<std::string>());
    }
    if (j.contains("sigma")) {
        if (!j["sigma"].is_number()) fail("key 'sigma' must be a number");
        cfg.sigma = j["sigma"].get<double>();
    }
    if (j.contains("steps"))
        cfg.steps = static_cast<int>(integer(j["steps"], "steps"));
    if (j.contains("ensemble"))
        cfg.ensemble = static_cast<int>(integer(j["ensemble"], "ensemble"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) fail("key 'seed' must be an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("resolution"))
        cfg.resolution = static_cast<int>(integer(j["resolution"], "resolution"));
    if (j.contains("scenario")) {
        if (!j["scenario"].is_string()) fail("key 'scenario' must be a string");
        cfg.scenario = scenario_from_string(j["scenario"].get<std::string>());
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) fail("key 'out' must be a string");
        cfg.out = j["out"].get<std::string>();
    }
    return cfg;
}

/// Result of the T1-vs-dimension scan: per-N fitted onset times plus the
/// linear fit of lambda*T1 against log N (slope A, intercept B).
struct T1ScanRow {
    int N = 0;
    double T1 = 0.0;     ///< constrained-fit onset time
    double slope = 0.0;  ///< unconstrained decay slope (diagnostic)
};

struct T1ScanResult {
    std::vector<T1ScanRow> rows;
    double A = 0.0;
    double B = 0.0;
    double lambda_max = 0.0;
};

/// Fit the scan law lambda*T1 = A log N + B from per-dimension series.
/// Each series is fitted with the slope constrained to lambda_max; the row
/// also records the unconstrained slope as a per-N diagnostic.
inline T1ScanResult t1scan_fit(const std::vector<int>& Ns,
                               const std::vector<FidelitySeries>& series,
                               double lambda_max) {
    if (Ns.size() != series.size())
        throw std::invalid_argument("t1scan_fit: one series per N required");
    if (Ns.size() < 3)
        throw std::invalid_argument("t1scan_fit: at least 3 values of N required");
    if (!(lambda_max > 0.0))
        throw std::invalid_argument("t1scan_fit: lambda_max must be > 0");
    T1ScanResult result;
    result.lambda_max = lambda_max;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        DecayFit fit = fit_decay(series[i], lambda_max, Ns[i]);
        T1ScanRow row;
        row.N = Ns[i];
        row.T1 = fit.constrained_T1;
        row.slope = fit.slope;
        result.rows.push_back(row);
        const double x = std::log(static_cast<double>(Ns[i]));
        const double y = lambda_max * row.T1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(Ns.size());
    const double det = n * sxx - sx * sx;
    if (!(std::fabs(det) > 0.0))
        throw std::runtime_error("t1scan_fit: degenerate N values");
    result.A = (n * sxy - sx * sy) / det;
    result.B = (sy - result.A * sx) / n;
    return result;
}

namespace detail_run {

inline std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return std::string(buf);
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

inline ClassicalMapSpec map_spec_for(const ExperimentConfig& cfg,
                                     double strength) {
    return cfg.map == MapKind::Sawtooth
               ? ClassicalMapSpec::sawtooth(strength, cfg.L)
               : ClassicalMapSpec::perturbed_cat(strength, cfg.L);
}

inline double base_strength(const ExperimentConfig& cfg) {
    return cfg.map == MapKind::Sawtooth ? cfg.K.front() : cfg.mu.front();
}

/// Decay-rate reference for fits: exact closed form for the sawtooth,
/// a tangent-map estimate (fixed budget, seeded substream) for the
/// perturbed cat, where no closed form exists.
inline std::optional<double> lambda_max_for(const ExperimentConfig& cfg) {
    if (cfg.map == MapKind::Sawtooth) {
        const double k = cfg.K.front();
        if (k > 0.0) return lyapunov_sawtooth_exact(k);
        return std::nullopt;
    }
    ClassicalMapSpec spec = map_spec_for(cfg, cfg.mu.front());
    LyapunovEstimate est = lyapunov_numerical(spec, 100, 10000, cfg.seed);
    if (est.mean > 0.0) return est.mean;
    return std::nullopt;
}

/// Run one ensemble-averaged fidelity series at dimension n.
inline FidelitySeries run_series(const ExperimentConfig& cfg, int n) {
    const HilbertSpec h{n, cfg.L};
    const ClassicalMapSpec m = map_spec_for(cfg, base_strength(cfg));
    const QuantumMapSpec qm{m, h};
    const bool discrete = cfg.formalism == Formalism::DiscreteMiquel;
    const int res = cfg.resolution > 0 ? cfg.resolution : 3 * n;
    auto one = [&](int member, double q0, double u0) {
        (void)member;
        const QuantumState psi = coherent_state({q0, u0, cfg.sigma}, h);
        const GaussianDensity d =
            make_density(q0, u0 * static_cast<double>(cfg.L), cfg.sigma, h,
                         discrete ? 2 * n : res);
        return discrete ? qcf_discrete(psi, d, qm, cfg.steps)
                        : qcf_continuous(psi, d, qm, cfg.steps, res);
    };
    return ensemble_average(one, cfg.ensemble, cfg.seed);
}

inline void check_finite(const FidelitySeries& s) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (!std::isfinite(s.F[i]) || !std::isfinite(s.G[i]) ||
            !std::isfinite(s.P_minus[i]))
            throw std::runtime_error("series contains non-finite values at t=" +
                                     std::to_string(s.times[i]));
    }
}

inline void write_error_json(const std::string& path, const char* scenario,
                             const std::string& what) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_error_json: cannot open " + path);
    out << "{\n  \"scenario\": \"" << scenario << "\",\n  \"error\": \""
        << json_escape(what) << "\"\n}\n";
}

inline void write_t1scan_csv(const T1ScanResult& scan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_t1scan_csv: cannot open " + path);
    out << "N,T1,slope,A_fit,B_fit\n";
    for (const T1ScanRow& row : scan.rows) {
        out << row.N << ',' << num17(row.T1) << ',' << num17(row.slope) << ','
            << num17(scan.A) << ',' << num17(scan.B) << '\n';
    }
    if (!out)
        throw std::runtime_error("write_t1scan_csv: write failed for " + path);
}

inline void write_t1scan_json(const T1ScanResult& scan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_t1scan_json: cannot open " + path);
    out << "{\n";
    out << "  \"A_fit\": " << num17(scan.A) << ",\n";
    out << "  \"B_fit\": " << num17(scan.B) << ",\n";
    out << "  \"lambda_max\": " << num17(scan.lambda_max) << ",\n";
    out << "  \"points\": " << scan.rows.size() << "\n";
    out << "}\n";
    if (!out)
        throw std::runtime_error("write_t1scan_json: write failed for " + path);
}

inline void write_negativity_json(double mean, double prediction, int lo,
                                  int hi, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_negativity_json: cannot open " + path);
    out << "{\n";
    out << "  \"P_plateau_mean\": " << num17(mean) << ",\n";
    out << "  \"P_plateau_prediction\": " << num17(prediction) << ",\n";
    out << "  \"window_lo\": " << lo << ",\n";
    out << "  \"window_hi\": " << hi << "\n";
    out << "}\n";
    if (!out)
        throw std::runtime_error("write_negativity_json: write failed for " +
                                 path);
}

}  // namespace detail_run

/// Write the run metadata: the full configuration echo (keyed exactly like
/// the CLI flags, so the file round-trips through config_from_json), the
/// code version, wall time, final status, and the list of emitted files.
inline void write_meta_json(const ExperimentConfig& cfg, const std::string& path,
                            double wall_seconds,
                            const std::vector<std::string>& files,
                            const std::string& status) {
    using detail_run::json_escape;
    using detail_run::num17;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_meta_json: cannot open " + path);
    auto double_array = [&out](const char* key, const std::vector<double>& vs) {
        out << "  \"" << key << "\": [";
        for (std::size_t i = 0; i < vs.size(); ++i)
            out << (i ? ", " : "") << num17(vs[i]);
        out << "],\n";
    };
    out << "{\n";
    out << "  \"map\": \"" << to_string(cfg.map) << "\",\n";
    double_array("K", cfg.K);
    double_array("mu", cfg.mu);
    if (cfg.K2) out << "  \"K2\": " << num17(*cfg.K2) << ",\n";
    if (cfg.mu2) out << "  \"mu2\": " << num17(*cfg.mu2) << ",\n";
    out << "  \"L\": " << cfg.L << ",\n";
    out << "  \"N\": [";
    for (std::size_t i = 0; i < cfg.N.size(); ++i)
        out << (i ? ", " : "") << cfg.N[i];
    out << "],\n";
    out << "  \"formalism\": \"" << to_string(cfg.formalism) << "\",\n";
    out << "  \"sigma\": " << num17(cfg.sigma) << ",\n";
    out << "  \"steps\": " << cfg.steps << ",\n";
    out << "  \"ensemble\": " << cfg.ensemble << ",\n";
    out << "  \"seed\": " << cfg.seed << ",\n";
    out << "  \"resolution\": " << cfg.resolution << ",\n";
    out << "  \"scenario\": \"" << to_string(cfg.scenario) << "\",\n";
    out << "  \"out\": \"" << json_escape(cfg.out) << "\",\n";
    out << "  \"version\": \"" << version_string << "\",\n";
    out << "  \"wall_time_seconds\": " << num17(wall_seconds) << ",\n";
    out << "  \"status\": \"" << json_escape(status) << "\",\n";
    out << "  \"files\": [";
    for (std::size_t i = 0; i < files.size(); ++i)
        out << (i ? ", " : "") << '"' << json_escape(files[i]) << '"';
    out << "]\n";
    out << "}\n";
    if (!out)
        throw std::runtime_error("write_meta_json: write failed for " + path);
}

/// Outcome of run_experiment: exit code 0 (success), 2 (invalid
/// configuration), or 3 (numerics failure mid-run; partial files are
/// flagged in meta.json).  message carries the diagnostic for nonzero codes.
struct RunOutcome {
    int exit_code = 0;
    std::string message;
};

/// Execute the configured scenario and write its output files.
///
/// Always written: meta.json.  Scenario files:
///   series      series.csv, fit.json
///   negativity  series.csv, fit.json, negativity.json
///   t1scan      series_N<value>.csv per N, t1scan.csv, fit.json (scan fit)
///   echo        echo.csv
///   snapshots   series.csv, fit.json, wigner_tXXX.dat / density_tXXX.dat /
///               echoed_tXXX.dat for each t
///   lyapunov    lyapunov.csv
///
/// Output is deterministic for a fixed config + seed, independent of the
/// worker count (the engine folds all reductions in index order).
inline RunOutcome run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    try {
        validate_config(cfg);
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec)
            throw std::invalid_argument("config: cannot create output directory '" +
                                        cfg.out + "': " + ec.message());
    } catch (const std::exception& e) {
        return {2, e.what()};
    }

    const auto t_start = clock::now();
    std::vector<std::string> files;
    std::string status = "ok";
    RunOutcome outcome;
    auto path_of = [&cfg](const std::string& name) {
        return cfg.out + "/" + name;
    };

    try {
        switch (cfg.scenario) {
            case Scenario::Series:
            case Scenario::Negativity: {
                const int n = cfg.N.front();
                FidelitySeries series = detail_run::run_series(cfg, n);
                detail_run::check_finite(series);
                write_series_csv(series, path_of("series.csv"));
                files.push_back("series.csv");
                std::optional<DecayFit> fit;
                try {
                    fit = fit_decay(series, detail_run::lambda_max_for(cfg), n);
                    write_fit_json(*fit, path_of("fit.json"));
                } catch (const std::exception& e) {
                    // An all-plateau or all-decayed series has no fit window;
                    // record why instead of failing the whole run.
                    detail_run::write_error_json(path_of("fit.json"),
                                                 to_string(cfg.scenario),
                                                 e.what());
                }
                files.push_back("fit.json");
                if (cfg.scenario == Scenario::Negativity) {
                    int lo = cfg.steps / 2, hi = cfg.steps;
                    if (fit) {
                        const double t2 =
                            fit->has_constrained ? fit->constrained_T2 : fit->T2;
                        lo = std::min(cfg.steps,
                                      static_cast<int>(std::ceil(t2)) + 5);
                        hi = std::min(cfg.steps,
                                      static_cast<int>(std::ceil(t2)) + 15);
                    }
                    double acc = 0.0;
                    int count = 0;
                    for (std::size_t i = 0; i < series.times.size(); ++i) {
                        if (series.times[i] >= lo && series.times[i] <= hi) {
                            acc += series.P_minus[i];
                            ++count;
                        }
                    }
                    if (count == 0)
                        throw std::runtime_error(
                            "negativity: empty plateau window");
                    detail_run::write_negativity_json(
                        acc / count, random_wave_plateau(cfg.formalism, n), lo,
                        hi, path_of("negativity.json"));
                    files.push_back("negativity.json");
                }
                break;
            }
            case Scenario::T1Scan: {
                std::vector<FidelitySeries> all;
                for (int n : cfg.N) {
                    FidelitySeries s = detail_run::run_series(cfg, n);
                    detail_run::check_finite(s);
                    const std::string name =
                        "series_N" + std::to_string(n) + ".csv";
                    write_series_csv(s, path_of(name));
                    files.push_back(name);
                    all.push_back(std::move(s));
                }
                const std::optional<double> lam = detail_run::lambda_max_for(cfg);
                if (!lam)
                    throw std::runtime_error(
                        "t1scan: no positive decay-rate reference for this map");
                T1ScanResult scan = t1scan_fit(cfg.N, all, *lam);
                detail_run::write_t1scan_csv(scan, path_of("t1scan.csv"));
                files.push_back("t1scan.csv");
                detail_run::write_t1scan_json(scan, path_of("fit.json"));
                files.push_back("fit.json");
                break;
            }
            case Scenario::Echo: {
                const int n = cfg.N.front();
                const HilbertSpec h{n, cfg.L};
                const double s0 = detail_run::base_strength(cfg);
                const double s1 = cfg.map == MapKind::Sawtooth
                                      ? cfg.K2.value_or(s0)
                                      : cfg.mu2.value_or(s0);
                const QuantumMapSpec qm{detail_run::map_spec_for(cfg, s0), h};
                const QuantumMapSpec qm2{detail_run::map_spec_for(cfg, s1), h};
                // Packet center drawn exactly like ensemble member 0.
                std::mt19937_64 gen = detail::substream(cfg.seed, 0);
                const double q0 = detail::uniform01(gen);
                const double u0 = detail::uniform01(gen);
                const int res = cfg.resolution > 0 ? cfg.resolution : 3 * n;
                const QuantumState psi = coherent_state({q0, u0, cfg.sigma}, h);
                const GaussianDensity d = make_density(
                    q0, u0 * static_cast<double>(cfg.L), cfg.sigma, h, res);
                std::vector<EchoRecord> records =
                    loschmidt_echoes(psi, d, qm, qm2, cfg.steps, res);
                for (const EchoRecord& r : records)
                    if (!std::isfinite(r.residual))
                        throw std::runtime_error(
                            "echo series contains non-finite values");
                write_echo_csv(records, path_of("echo.csv"));
                files.push_back("echo.csv");
                break;
            }
            case Scenario::Snapshots: {
                const int n = cfg.N.front();
                const HilbertSpec h{n, cfg.L};
                const QuantumMapSpec qm{
                    detail_run::map_spec_for(cfg, detail_run::base_strength(cfg)),
                    h};
                const int res = cfg.resolution > 0 ? cfg.resolution : 3 * n;
                // Fixed packet center: the panel series is a deterministic
                // visual artifact, not an ensemble statistic.
                const QuantumState psi =
                    coherent_state({0.5, 0.5, cfg.sigma}, h);
                const GaussianDensity d = make_density(
                    0.5, 0.5 * static_cast<double>(cfg.L), cfg.sigma, h, res);
                FidelitySeries series =
                    qcf_continuous(psi, d, qm, cfg.steps, res);
                detail_run::check_finite(series);
                write_series_csv(series, path_of("series.csv"));
                files.push_back("series.csv");
                try {
                    DecayFit fit =
                        fit_decay(series, detail_run::lambda_max_for(cfg), n);
                    write_fit_json(fit, path_of("fit.json"));
                } catch (const std::exception& e) {
                    detail_run::write_error_json(path_of("fit.json"),
                                                 "snapshots", e.what());
                }
                files.push_back("fit.json");
                char name[64];
                for (int t = 0; t <= cfg.steps; ++t) {
                    const QuantumState evolved = propagate(psi, qm, t);
                    std::snprintf(name, sizeof(name), "wigner_t%03d.dat", t);
                    write_grid(wigner_continuous(evolved), path_of(name), t);
                    files.push_back(name);
                    std::snprintf(name, sizeof(name), "density_t%03d.dat", t);
                    write_density_grid(
                        density_grid(d, qm.classical(), t, res), res, h,
                        path_of(name), t);
                    files.push_back(name);
                    std::snprintf(name, sizeof(name), "echoed_t%03d.dat", t);
                    write_grid(echoed_wigner(psi, qm, t), path_of(name), t);
                    files.push_back(name);
                }
                break;
            }
            case Scenario::Lyapunov: {
                const std::vector<double>& values =
                    cfg.map == MapKind::Sawtooth ? cfg.K : cfg.mu;
                std::ofstream out(path_of("lyapunov.csv"));
                if (!out)
                    throw std::runtime_error("lyapunov: cannot open " +
                                             path_of("lyapunov.csv"));
                const bool sawtooth = cfg.map == MapKind::Sawtooth;
                out << (sawtooth ? "K,lambda,std_error,exact\n"
                                 : "mu,lambda,std_error\n");
                for (std::size_t i = 0; i < values.size(); ++i) {
                    const ClassicalMapSpec spec =
                        detail_run::map_spec_for(cfg, values[i]);
                    // Distinct deterministic seed per strength value.
                    std::uint64_t s = cfg.seed + 0x632BE59BD9B4E019ULL * (i + 1);
                    LyapunovEstimate est =
                        lyapunov_numerical(spec, cfg.ensemble, cfg.steps, s);
                    if (!std::isfinite(est.mean))
                        throw std::runtime_error(
                            "lyapunov estimate is non-finite");
                    out << detail_run::num17(values[i]) << ','
                        << detail_run::num17(est.mean) << ','
                        << detail_run::num17(est.std_error);
                    if (sawtooth)
                        out << ','
                            << detail_run::num17(values[i] > 0.0
                                                     ? lyapunov_sawtooth_exact(
                                                           values[i])
                                                     : 0.0);
                    out << '\n';
                }
                if (!out)
                    throw std::runtime_error("lyapunov: write failed for " +
                                             path_of("lyapunov.csv"));
                files.push_back("lyapunov.csv");
                break;
            }
        }
    } catch (const std::exception& e) {
        status = std::string("numerics-failure: ") + e.what();
        outcome.exit_code = 3;
        outcome.message = e.what();
    }

    const double wall =
        std::chrono::duration<double>(clock::now() - t_start).count();
    files.push_back("meta.json");
    write_meta_json(cfg, path_of("meta.json"), wall, files, status);
    return outcome;
}

}  // namespace torusqc

#endif  // TORUSQC_RUNNER_HPP

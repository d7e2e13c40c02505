#include "elc/report.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

#include "elc/errors.hpp"
#include "elc/fourier_index.hpp"
#include "elc/orbit_finder.hpp"
#include "elc/potential.hpp"

namespace elc {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& message)
{
    throw Error("config_invalid", "config field " + (path.empty() ? std::string("/") : path) + ": " + message);
}

double number_at(const json& v, const std::string& path)
{
    if (!v.is_number()) config_error(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_error(path, "expected a finite number");
    return x;
}

double positive_at(const json& v, const std::string& path)
{
    const double x = number_at(v, path);
    if (!(x > 0.0)) config_error(path, "expected a positive number");
    return x;
}

std::int64_t integer_at(const json& v, const std::string& path)
{
    if (!v.is_number_integer()) config_error(path, "expected an integer");
    return v.get<std::int64_t>();
}

const json& array_at(const json& v, const std::string& path, std::optional<std::size_t> size = std::nullopt)
{
    if (!v.is_array()) config_error(path, "expected an array");
    if (size && v.size() != *size)
        config_error(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(v.size()));
    return v;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known)
{
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) config_error(path + "/" + key, "unknown field");
    }
}

const json& object_at(const json& v, const std::string& path)
{
    if (!v.is_object()) config_error(path, "expected an object");
    return v;
}

}  // namespace

RunConfig parse_config(const json& doc)
{
    object_at(doc, "");
    reject_unknown(doc, "", {"dimension", "potential", "generators", "q0", "j0", "amplitudes", "branch", "seed",
                             "isotropy_basis", "tolerances", "invariance", "probe", "modes", "output"});
    RunConfig c;
    if (!doc.contains("dimension")) config_error("/dimension", "missing");
    const std::int64_t n = integer_at(doc["dimension"], "/dimension");
    if (n < 1 || n > kMaxDimension) config_error("/dimension", "must lie in [1, " + std::to_string(kMaxDimension) + "]");
    c.dimension = static_cast<int>(n);
    const auto nn = static_cast<std::size_t>(n);

    if (!doc.contains("potential") || !doc["potential"].is_string()) config_error("/potential", "expected a string");
    c.potential = doc["potential"].get<std::string>();

    if (doc.contains("generators")) {
        const json& gens = array_at(doc["generators"], "/generators");
        for (std::size_t g = 0; g < gens.size(); ++g) {
            const std::string gp = "/generators/" + std::to_string(g);
            const json& rows = array_at(gens[g], gp, nn);
            Eigen::MatrixXd m(n, n);
            for (std::size_t i = 0; i < nn; ++i) {
                const std::string rp = gp + "/" + std::to_string(i);
                const json& row = array_at(rows[i], rp, nn);
                for (std::size_t j = 0; j < nn; ++j)
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number_at(row[j], rp + "/" + std::to_string(j));
            }
            c.generators.push_back(std::move(m));
        }
    }

    if (!doc.contains("q0")) config_error("/q0", "missing");
    const json& q0 = array_at(doc["q0"], "/q0", nn);
    c.q0.resize(n);
    for (std::size_t i = 0; i < nn; ++i) c.q0(static_cast<Eigen::Index>(i)) = number_at(q0[i], "/q0/" + std::to_string(i));

    if (doc.contains("j0")) {
        const json& j = doc["j0"];
        if (j.is_string()) {
            if (j.get<std::string>() != "auto") config_error("/j0", "expected \"auto\" or a nonnegative integer");
        } else {
            const std::int64_t v = integer_at(j, "/j0");
            if (v < 0) config_error("/j0", "expected \"auto\" or a nonnegative integer");
            c.j0 = static_cast<std::size_t>(v);
        }
    }

    if (doc.contains("amplitudes")) {
        const json& a = array_at(doc["amplitudes"], "/amplitudes");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = "/amplitudes/" + std::to_string(i);
            const double x = positive_at(a[i], p);
            if (!c.amplitudes.empty() && !(x < c.amplitudes.back())) config_error(p, "amplitudes must be strictly decreasing");
            c.amplitudes.push_back(x);
        }
    }

    if (doc.contains("branch")) {
        const json& b = doc["branch"];
        const std::string s = b.is_string() ? b.get<std::string>() : "";
        if (s == "nondegenerate") {
            c.branch = Branch::Nondegenerate;
        } else if (s == "minimal") {
            c.branch = Branch::MinimalOrbit;
        } else {
            config_error("/branch", "expected \"nondegenerate\" or \"minimal\"");
        }
    }

    if (doc.contains("seed")) {
        const std::int64_t s = integer_at(doc["seed"], "/seed");
        if (s < 0) config_error("/seed", "expected a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(s);
    }

    if (doc.contains("isotropy_basis")) {
        const json& b = array_at(doc["isotropy_basis"], "/isotropy_basis");
        std::vector<Weight> basis;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string p = "/isotropy_basis/" + std::to_string(i);
            const json& v = array_at(b[i], p, c.generators.size());
            Weight w;
            for (std::size_t j = 0; j < v.size(); ++j) w.push_back(integer_at(v[j], p + "/" + std::to_string(j)));
            basis.push_back(std::move(w));
        }
        c.isotropy_basis = std::move(basis);
    }

    if (doc.contains("tolerances")) {
        const json& t = object_at(doc["tolerances"], "/tolerances");
        reject_unknown(t, "/tolerances",
                       {"invariance", "zero_cutoff", "cluster_gap", "critical", "integrator", "defect", "residual", "period"});
        auto get = [&](const char* key, double& dst) {
            if (t.contains(key)) dst = positive_at(t[key], std::string("/tolerances/") + key);
        };
        get("invariance", c.tol.invariance);
        get("zero_cutoff", c.tol.zero_cutoff);
        get("cluster_gap", c.tol.cluster_gap);
        get("critical", c.tol.critical);
        get("integrator", c.tol.integrator);
        get("defect", c.tol.defect);
        get("residual", c.tol.residual);
        get("period", c.tol.period);
    }

    if (doc.contains("invariance")) {
        const json& t = object_at(doc["invariance"], "/invariance");
        reject_unknown(t, "/invariance", {"samples", "box"});
        if (t.contains("samples")) {
            const std::int64_t s = integer_at(t["samples"], "/invariance/samples");
            if (s < 1) config_error("/invariance/samples", "expected a positive integer");
            c.invariance_samples = static_cast<int>(s);
        }
        if (t.contains("box")) c.invariance_box = positive_at(t["box"], "/invariance/box");
    }

    if (doc.contains("probe")) {
        const json& t = object_at(doc["probe"], "/probe");
        reject_unknown(t, "/probe", {"radius", "samples"});
        if (t.contains("radius")) c.probe_radius = positive_at(t["radius"], "/probe/radius");
        if (t.contains("samples")) {
            const std::int64_t s = integer_at(t["samples"], "/probe/samples");
            if (s < 1) config_error("/probe/samples", "expected a positive integer");
            c.probe_samples = static_cast<int>(s);
        }
    }

    if (doc.contains("modes")) {
        const std::int64_t m = integer_at(doc["modes"], "/modes");
        if (m < 1) config_error("/modes", "expected a positive integer");
        c.modes = static_cast<int>(m);
    }

    if (doc.contains("output")) {
        const json& o = object_at(doc["output"], "/output");
        reject_unknown(o, "/output", {"report", "branch_csv", "blocks_csv"});
        auto get = [&](const char* key, std::string& dst) {
            if (!o.contains(key)) return;
            if (!o[key].is_string()) config_error(std::string("/output/") + key, "expected a string");
            dst = o[key].get<std::string>();
        };
        get("report", c.report_path);
        get("branch_csv", c.branch_csv_path);
        get("blocks_csv", c.blocks_csv_path);
    }
    return c;
}

namespace {

std::string format_double(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json signature_json(const ReprSignature& s)
{
    json w = json::array();
    for (const auto& t : s.weights()) w.push_back({{"m", t.m}, {"k", t.k}});
    return {{"text", to_string(s)}, {"rank", s.rank()}, {"k0", s.k0()}, {"weights", w}, {"frak_S", frak_S(s)}};
}

json spectral_json(const SpectralReport& r)
{
    json betas = json::array();
    for (const auto& b : r.betas)
        betas.push_back({{"beta", b.beta},
                         {"mu", b.mu},
                         {"multiplicity", b.multiplicity},
                         {"eig_signature", signature_json(b.eig_signature)}});
    json spectrum = json::array();
    for (const auto& c : r.spectrum) spectrum.push_back({{"mu", c.mu}, {"multiplicity", c.multiplicity}});
    return {{"q0", vector_json(r.q0)},
            {"grad_residual", r.grad_residual},
            {"hessian_norm", r.hessian_norm},
            {"orbit_dim", r.orbit_dim},
            {"isotropy_dim", r.isotropy_dim},
            {"isotropy_basis", r.isotropy_basis},
            {"kernel_dim", r.kernel_dim},
            {"null_excess_dim", r.null_excess_dim},
            {"nondegenerate", r.nondegenerate},
            {"betas", betas},
            {"spectrum", spectrum}};
}

json flags_json(const HypothesisFlags& f)
{
    return {{"invariance", f.invariance},
            {"criticality", f.criticality},
            {"resonance", f.resonance},
            {"nondegeneracy_or_minimality", f.nondegeneracy_or_minimality},
            {"isolation", f.isolation}};
}

json certificate_json(const Certificate& c)
{
    return {{"j0", c.j0},
            {"beta", c.beta},
            {"lambda_star", c.lambda_star},
            {"epsilon", c.epsilon},
            {"lambda_minus", c.lambda_minus},
            {"lambda_plus", c.lambda_plus},
            {"U_signature", signature_json(c.u_signature)},
            {"time_circle_restriction", signature_json(c.time_restriction)},
            {"frakS_jump", c.frakS_jump},
            {"theorem_branch", to_string(c.branch)},
            {"hypothesis_flags", flags_json(c.flags)},
            {"justification", c.justification},
            {"null_factor_cancels", c.null_factor_cancels}};
}

json window_json(const IndexWindow& w)
{
    return {{"lambda_minus", w.lambda_minus},
            {"lambda_plus", w.lambda_plus},
            {"modes", w.modes},
            {"n0", w.n0},
            {"dim_plus_minus", w.dim_plus_minus},
            {"dim_plus_plus", w.dim_plus_plus},
            {"jump", w.jump},
            {"per_mode_minus", w.per_mode_minus},
            {"per_mode_plus", w.per_mode_plus}};
}

std::string blocks_csv(const std::vector<HessianCluster>& spectrum, const IndexWindow& w)
{
    std::string out = "k,mu,block_eig_lambda_minus,block_eig_lambda_plus\n";
    for (int k = 0; k <= w.modes; ++k) {
        const BlockSpectrum lo = block_spectrum(spectrum, k, w.lambda_minus);
        const BlockSpectrum hi = block_spectrum(spectrum, k, w.lambda_plus);
        for (std::size_t i = 0; i < lo.entries.size(); ++i)
            out += std::to_string(k) + "," + format_double(lo.entries[i].mu) + "," +
                   format_double(lo.entries[i].block_eig) + "," + format_double(hi.entries[i].block_eig) + "\n";
    }
    return out;
}

struct Pipeline {
    Expr u;
    SkewGeneratorSet gens;
    SpectralReport spectral;
    Certificate cert;
    IndexWindow window;
};

void fail(RunResult& r, int code, const Error& e, const char* verdict)
{
    r.exit_code = code;
    r.report["verdict"] = verdict;
    r.report["error"] = error_object(e.code(), e.what());
}

std::optional<Pipeline> analyze_into(const RunConfig& config, bool dump_blocks, RunResult& r, const char* command)
{
    json& rep = r.report;
    rep["schema"] = kReportSchema;
    rep["timestamp"] = utc_timestamp();
    rep["command"] = command;
    rep["seed"] = config.seed;
    json& hyp = rep["hypotheses"];
    for (const char* k : {"invariance", "criticality", "resonance", "nondegeneracy_or_minimality", "isolation"})
        hyp[k] = {{"status", "not_checked"}};

    Pipeline p;
    try {
        p.u = parse_expr(config.potential, config.dimension);
        rep["potential"] = print(p.u);
        p.gens = SkewGeneratorSet(config.dimension, config.generators);
        if (config.q0.size() != config.dimension) throw Error("config_invalid", "config field /q0: wrong length");

        std::mt19937_64 rng(config.seed);
        const InvarianceCheck inv =
            check_invariance(p.u, p.gens, config.invariance_samples, config.tol.invariance, config.invariance_box, rng);
        hyp["invariance"] = {{"status", inv.invariant ? "pass" : "fail"},
                             {"worst_violation", inv.worst},
                             {"samples", config.invariance_samples},
                             {"tolerance", config.tol.invariance}};

        SpectralOptions opt;
        opt.zero_cutoff = config.tol.zero_cutoff;
        opt.cluster_gap = config.tol.cluster_gap;
        opt.cluster_ambiguity = std::max(1e-5, 100.0 * config.tol.cluster_gap);
        opt.critical_tol = config.tol.critical;
        opt.isotropy_basis = config.isotropy_basis;
        const double grad = verify_critical(p.u, config.q0);
        try {
            p.spectral = spectral_report(p.u, p.gens, config.q0, opt);
        } catch (const HypothesisError&) {
            hyp["criticality"] = {{"status", "fail"}, {"grad_residual", grad}};
            throw;
        }
        hyp["criticality"] = {{"status", "pass"},
                              {"grad_residual", grad},
                              {"tolerance", config.tol.critical * (1.0 + p.spectral.hessian_norm)}};
        rep["spectral_report"] = spectral_json(p.spectral);

        HypothesisInputs inputs;
        inputs.invariance = inv.invariant;
        if (config.branch == Branch::MinimalOrbit) {
            const ProbeResult probe =
                minimality_probe(p.u, p.gens, config.q0, config.probe_radius, config.probe_samples, rng);
            json pj = {{"status", probe.pass ? "pass" : "fail"},
                       {"label", "probe, not proof"},
                       {"points", probe.points},
                       {"radius", config.probe_radius}};
            if (!probe.pass) {
                pj["witness_kind"] = probe.witness_kind;
                pj["witness"] = vector_json(probe.witness);
                pj["witness_value"] = probe.witness_value;
            }
            hyp["nondegeneracy_or_minimality"] = pj;
            hyp["isolation"] = {{"status", probe.witness_kind == "critical_point" ? "fail" : "pass"},
                                {"label", "probe, not proof"}};
            inputs.probe = probe;
        } else {
            hyp["nondegeneracy_or_minimality"] = {{"status", p.spectral.nondegenerate ? "pass" : "fail"},
                                                  {"kernel_dim", p.spectral.kernel_dim},
                                                  {"orbit_dim", p.spectral.orbit_dim}};
            if (p.spectral.nondegenerate) hyp["isolation"] = {{"status", "pass"}, {"reason", "nondegenerate orbit"}};
        }

        const std::vector<double> betas = p.spectral.beta_values();
        std::size_t j0 = 0;
        if (config.j0) {
            j0 = *config.j0;
        } else if (!betas.empty()) {
            const auto picked = auto_j0(betas);
            if (!picked)
                throw HypothesisError("resonance_violated", "resonance condition violated for every positive eigenvalue");
            j0 = *picked;
        }
        rep["j0"] = config.j0 ? json(j0) : json{{"auto", j0}};
        if (j0 < betas.size()) {
            const bool ok = resonance_filter(betas, j0);
            hyp["resonance"] = {{"status", ok ? "pass" : "fail"}};
        }
        p.cert = certify(p.spectral, j0, config.branch, inputs);
        rep["certificate"] = certificate_json(p.cert);

        double max_mu = 0.0;
        for (const auto& c : p.spectral.spectrum) max_mu = std::max(max_mu, c.mu);
        const int n0 = stabilization_mode(max_mu, p.cert.lambda_plus);
        p.window = index_window(p.spectral.spectrum, p.cert.beta, p.cert.epsilon, config.modes.value_or(n0 + 5));
        rep["index_window"] = window_json(p.window);
        if (dump_blocks) r.blocks_csv = blocks_csv(p.spectral.spectrum, p.window);

        const HypothesisFlags& f = p.cert.flags;
        const bool all = f.invariance && f.criticality && f.resonance && f.nondegeneracy_or_minimality && f.isolation;
        if (all && p.cert.frakS_jump >= 1 && p.window.jump != 0) {
            rep["verdict"] = "bifurcation-certified";
            r.exit_code = kCertified;
        } else {
            rep["verdict"] = "not-certified";
            rep["error"] = error_object("index_unchanged", "index jump is zero");
            r.exit_code = kHypothesisFailure;
            return std::nullopt;
        }
    } catch (const HypothesisError& e) {
        fail(r, kHypothesisFailure, e, "hypothesis-failed");
        return std::nullopt;
    } catch (const SolverError& e) {
        fail(r, kSolverFailure, e, "solver-failed");
        return std::nullopt;
    } catch (const Error& e) {
        fail(r, kInputError, e, "input-error");
        return std::nullopt;
    }
    return p;
}

}  // namespace

RunResult run_analyze(const RunConfig& config, bool dump_blocks)
{
    RunResult r;
    analyze_into(config, dump_blocks, r, "analyze");
    return r;
}

RunResult run_orbits(const RunConfig& config, bool dump_blocks)
{
    RunResult r;
    auto p = analyze_into(config, dump_blocks, r, "orbits");
    r.branch_csv = "amplitude,lambda,minimal_period,residual,orbit_distance\n";
    if (!p) return r;
    json rows = json::array();
    try {
        const std::vector<FamilyMember> family = liapunov_family(p->u, p->gens, p->spectral, p->cert, config.amplitudes,
                                                                 ShootOptions{.integrator_tol = config.tol.integrator,
                                                                              .defect_tol = config.tol.defect,
                                                                              .residual_tol = config.tol.residual});
        for (const auto& m : family) {
            const PeriodicOrbit& o = m.orbit;
            rows.push_back({{"amplitude", m.amplitude},
                            {"lambda", o.lambda},
                            {"minimal_period", o.minimal_period},
                            {"mode_divisor", o.mode_divisor},
                            {"residual", o.residual},
                            {"orbit_distance", o.orbit_distance},
                            {"h1_amplitude", o.amplitude},
                            {"periodicity_defect", o.periodicity_defect},
                            {"energy_drift", o.energy_drift},
                            {"newton_iterations", o.iterations}});
            r.branch_csv += format_double(m.amplitude) + "," + format_double(o.lambda) + "," +
                            format_double(o.minimal_period) + "," + format_double(o.residual) + "," +
                            format_double(o.orbit_distance) + "\n";
        }
        r.report["family"] = {{"rows", rows},
                              {"minimal_period_rule", "gcd of active Fourier modes (numerical stand-in)"},
                              {"target_period", 2.0 * std::numbers::pi * p->cert.lambda_star}};
        if (!family.empty()) {
            const double err = std::abs(family.back().orbit.minimal_period - 2.0 * std::numbers::pi * p->cert.lambda_star);
            r.report["family"]["final_period_error"] = err;
            if (err > config.tol.period)
                throw SolverError("period_not_converged", "|T - 2 pi lambda*| = " + format_double(err) +
                                                              " at the smallest amplitude exceeds " +
                                                              format_double(config.tol.period));
        }
    } catch (const Error& e) {
        r.report["family"]["rows"] = rows;
        fail(r, kSolverFailure, e, "solver-failed");
    }
    return r;
}

ReprSignature signature_of(const SkewGeneratorSet& gens)
{
    return decompose(gens, Eigen::MatrixXd::Identity(gens.dimension(), gens.dimension()));
}

std::string run_chi(const std::vector<std::string>& signatures, int rank)
{
    std::vector<ReprSignature> sigs;
    for (const auto& s : signatures) sigs.push_back(parse_signature(s, rank));
    std::ostringstream out;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        out << "[" << i + 1 << "] " << to_string(sigs[i]) << "\n";
        out << "    \xF0\x9D\x94\x96 = " << frak_S(sigs[i]) << "\n";
        out << "    \xCF\x87 = " << to_string(chi_sphere(sigs[i])) << "\n";
    }
    if (sigs.size() >= 2) {
        out << "distinguishability:\n";
        for (std::size_t i = 0; i < sigs.size(); ++i)
            for (std::size_t j = i + 1; j < sigs.size(); ++j) {
                const Distinguishability d = distinguishable(sigs[i], sigs[j]);
                out << "    [" << i + 1 << "] vs [" << j + 1 << "]: " << to_string(d.verdict) << " (" << d.reason << ")\n";
            }
    }
    return out.str();
}

std::string canonical_dump(json report)
{
    report.erase("timestamp");
    return report.dump(2);
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("io_error", "cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw Error("io_error", "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("io_error", "cannot move report into place at " + path);
    }
}

json error_object(const std::string& code, const std::string& message)
{
    return {{"code", code}, {"message", message}};
}

}  // namespace elc

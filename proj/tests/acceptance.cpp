// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elc/errors.hpp"
#include "elc/fourier_index.hpp"
#include "elc/orbit_finder.hpp"
#include "elc/potential.hpp"
#include "elc/symmetry_analysis.hpp"
#include "elc/torus_rep.hpp"
#include "gallery.hpp"
#include "oracles.hpp"

using namespace elc;

namespace {

// Pinned limits.
constexpr double kAdditivitySeconds = 1.0;
constexpr double kEnumerationSeconds = 5.0;
constexpr double kRoundingResidual = 1e-6;
constexpr double kAutodiffRelative = 1e-6;
constexpr double kBetaTol = 1e-10;
constexpr double kResidualTol = 1e-8;
constexpr double kPeriodTolA = 1e-4;
constexpr double kOrbitDistanceA = 2e-3;
constexpr double kRadialOracleTol = 1e-6;
constexpr double kPeriodTolC = 1e-3;
constexpr double kExampleSeconds = 30.0;
constexpr double kLevelTol = 1e-10;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

int failures = 0;

void run(int id, const char* title, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    const auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    std::string detail = o.detail.str();
    std::printf("%s criterion %2d  %-40s %7.3f s%s%s\n", o.pass ? "PASS" : "FAIL", id, title, dt,
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

Eigen::MatrixXd rot(int n, int i, int j)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    a(i, j) = -1;
    a(j, i) = 1;
    return a;
}

std::string num(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

// Every signature of rank l with k0 <= 2, weights from {+-1, +-2}^l taken up
// to sign, multiplicities <= 2.
std::vector<ReprSignature> enumerate(int l)
{
    std::vector<Weight> lines;
    const int vals[] = {-2, -1, 1, 2};
    if (l == 1) {
        lines = {{1}, {2}};
    } else {
        for (int a : vals)
            for (int b : vals)
                if (a > 0) lines.push_back({a, b});
    }
    std::vector<ReprSignature> out;
    std::vector<int> mult(lines.size(), 0);
    while (true) {
        for (int k0 = 0; k0 <= 2; ++k0) {
            ReprSignature s(l, k0);
            for (std::size_t i = 0; i < lines.size(); ++i)
                if (mult[i]) s.add_weight(lines[i], mult[i]);
            out.push_back(std::move(s));
        }
        std::size_t i = 0;
        while (i < mult.size() && ++mult[i] == 3) mult[i++] = 0;
        if (i == mult.size()) break;
    }
    return out;
}

// Independent equality of weight multisets: compare sorted (normalized line, k) lists.
std::vector<std::pair<Weight, std::int64_t>> multiset(const ReprSignature& s)
{
    std::vector<std::pair<Weight, std::int64_t>> out;
    for (const auto& t : s.weights()) {
        Weight m = t.m;
        const auto first = std::find_if(m.begin(), m.end(), [](auto x) { return x != 0; });
        if (*first < 0)
            for (auto& x : m) x = -x;
        out.emplace_back(m, t.k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct ExampleRun {
    SpectralReport report;
    Certificate cert;
};

ExampleRun analyze_example(const Expr& u, const SkewGeneratorSet& g, const Eigen::VectorXd& q0, std::size_t j0)
{
    std::mt19937_64 rng(7);
    const InvarianceCheck inv = check_invariance(u, g, 200, 1e-10, 2.0, rng);
    ExampleRun r;
    r.report = spectral_report(u, g, q0);
    r.cert = certify(r.report, j0, Branch::Nondegenerate, {inv.invariant, std::nullopt});
    return r;
}

}  // namespace

int main()
{
    run(1, "frak_S additivity", [](Outcome& o) {
        std::mt19937_64 rng(101);
        const auto t0 = Clock::now();
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            const int rank = 1 + i % 3;
            const ReprSignature a = oracle::random_signature(rng, rank, 4, 4, 5, 6);
            const ReprSignature b = oracle::random_signature(rng, rank, 4, 4, 5, 6);
            std::int64_t expect = 0;
            for (const auto& t : a.weights()) expect += t.k;
            for (const auto& t : b.weights()) expect += t.k;
            if (frak_S(direct_sum(a, b)) != expect || frak_S(a) + frak_S(b) != expect) ++bad;
        }
        const double dt = seconds_since(t0);
        o.require(bad == 0, std::to_string(bad) + " of 1000 pairs not additive");
        o.require(dt < kAdditivitySeconds, "took " + num(dt) + " s");
    });

    run(2, "distinguishability soundness", [](Outcome& o) {
        const auto t0 = Clock::now();
        long long pairs = 0, missed = 0, equal_bad = 0;
        for (int l = 1; l <= 2; ++l) {
            const std::vector<ReprSignature> sigs = enumerate(l);
            std::vector<std::int64_t> s(sigs.size());
            std::vector<std::size_t> cls(sigs.size());
            std::map<std::vector<std::pair<Weight, std::int64_t>>, std::size_t> classes;
            for (std::size_t i = 0; i < sigs.size(); ++i) {
                s[i] = 0;
                for (const auto& t : sigs[i].weights()) s[i] += t.k;
                cls[i] = classes.try_emplace(multiset(sigs[i]), classes.size()).first->second;
            }
            for (std::size_t i = 0; i < sigs.size(); ++i)
                for (std::size_t j = i + 1; j < sigs.size(); ++j) {
                    ++pairs;
                    const Verdict v = distinguishable(sigs[i], sigs[j]).verdict;
                    if (s[i] != s[j] && v != Verdict::Distinct) ++missed;
                    if (cls[i] != cls[j] && v == Verdict::Equal) ++equal_bad;
                }
        }
        const double dt = seconds_since(t0);
        o.detail << pairs << " pairs";
        o.require(missed == 0, std::to_string(missed) + " frak_S differences not Distinct");
        o.require(equal_bad == 0, std::to_string(equal_bad) + " Equal verdicts on differing weights");
        o.require(dt < kEnumerationSeconds, "took " + num(dt) + " s");
    });

    run(3, "suspension changes frak_S", [](Outcome& o) {
        std::mt19937_64 rng(303);
        int done = 0, bad = 0;
        while (done < 200) {
            const int rank = 1 + done % 3;
            const ReprSignature base = oracle::random_signature(rng, rank, 3, 3, 3, 4);
            const ReprSignature extra = oracle::random_signature(rng, rank, 3, 3, 3, 4);
            if (extra.weights().empty()) continue;  // need frak_S(extra) >= 1
            ++done;
            if (!suspension_distinct(base, extra) || frak_S(direct_sum(base, extra)) == frak_S(base)) ++bad;
        }
        o.require(bad == 0, std::to_string(bad) + " of 200 cases failed");
    });

    run(4, "weight recovery", [](Outcome& o) {
        std::mt19937_64 rng(404);
        int done = 0, wrong = 0;
        double worst = 0.0;
        while (done < 100) {
            const int rank = 1 + done % 3;
            const ReprSignature s = oracle::random_signature(rng, rank, 3, 4, 2, 3);
            if (s.dimension() == 0 || s.dimension() > 12) continue;
            ++done;
            const auto d = static_cast<Eigen::Index>(s.dimension());
            const SkewGeneratorSet g(static_cast<int>(d), oracle::realize(s, rng));
            const Decomposition dec = decompose_with_diagnostics(g, Eigen::MatrixXd::Identity(d, d));
            worst = std::max(worst, dec.rounding_residual);
            if (!(dec.signature == s)) ++wrong;
        }
        o.detail << "max pre-round residual " << num(worst);
        o.require(wrong == 0, std::to_string(wrong) + " of 100 signatures not recovered");
        o.require(worst < kRoundingResidual, "residual above 1e-6");
    });

    run(5, "circle-sphere cell oracle", [](Outcome& o) {
        for (long m = 1; m <= 3; ++m)
            for (int k0 = 0; k0 <= 3; ++k0) {
                ReprSignature s(1, k0);
                s.add_weight({m}, 1);
                const EulerElem chi = chi_sphere(s);
                const auto cells = oracle::euler_sum(oracle::circle_sphere_cells(k0, m));
                EulerElem expect(1);
                for (const auto& [label, c] : cells)
                    expect.add_term(label == 0 ? SubgroupLabel::full() : SubgroupLabel::codim1({label}), c);
                o.require(chi == expect, "m = " + std::to_string(m) + ", k0 = " + std::to_string(k0) + ": " +
                                             to_string(chi) + " vs " + to_string(expect));
            }
    });

    run(6, "autodiff vs finite differences", [](Outcome& o) {
        std::mt19937_64 rng(606);
        std::uniform_real_distribution<double> box(-1.5, 1.5);
        double worst_g = 0.0, worst_h = 0.0;
        for (const auto& p : gallery::potentials()) {
            const Expr e = parse_expr(p.text, p.n);
            const oracle::Fn f = [&](const Eigen::VectorXd& q) { return e.eval(q); };
            for (int s = 0; s < 100; ++s) {
                Eigen::VectorXd q(p.n);
                for (auto& x : q) x = box(rng);
                const Jet2<double> j = e.jet2(q);
                const Eigen::VectorXd g = oracle::fd_gradient(f, q);
                const Eigen::MatrixXd h = oracle::fd_hessian(f, q);
                worst_g = std::max(worst_g, (j.grad - g).norm() / std::max(1.0, g.norm()));
                worst_h = std::max(worst_h, (j.hess - h).norm() / std::max(1.0, h.norm()));
            }
        }
        o.detail << "gradient " << num(worst_g) << ", Hessian " << num(worst_h);
        o.require(worst_g <= kAutodiffRelative && worst_h <= kAutodiffRelative, "relative error above 1e-6");
    });

    run(7, "Example A end to end", [](Outcome& o) {
        const auto t0 = Clock::now();
        const Expr u = parse_expr(gallery::kExampleA, 2);
        const SkewGeneratorSet g(2, {rot(2, 0, 1)});
        const Eigen::VectorXd q0 = Eigen::VectorXd::Unit(2, 0);
        const ExampleRun r = analyze_example(u, g, q0, 0);
        o.require(std::abs(r.report.betas.at(0).beta - std::numbers::sqrt2) <= kBetaTol, "beta != sqrt 2");
        o.require(r.report.kernel_dim == 1 && r.report.orbit_dim == 1, "kernel / orbit dimension != 1");
        o.require(std::abs(r.cert.lambda_star - 1.0 / std::numbers::sqrt2) <= kBetaTol, "lambda* != 1/sqrt 2");
        o.require(r.cert.frakS_jump == 1, "frakS_jump = " + std::to_string(r.cert.frakS_jump));
        const int n0 = stabilization_mode(2.0, r.cert.lambda_plus);
        for (int n : {n0, n0 + 5}) {
            const IndexWindow w = index_window(r.report.spectrum, r.cert.beta, r.cert.epsilon, n);
            o.require(w.jump == 2, "jump at N = " + std::to_string(n) + " is " + std::to_string(w.jump));
        }
        const auto family = liapunov_family(u, g, r.report, r.cert, {1e-1, 1e-2, 1e-3});
        for (const auto& m : family) {
            o.require(m.orbit.residual <= kResidualTol, "residual " + num(m.orbit.residual));
            const double oracle_t = oracle::radial_period(m.amplitude);
            o.require(std::abs(m.orbit.minimal_period - oracle_t) <= kRadialOracleTol,
                      "T(" + num(m.amplitude) + ") off the radial oracle by " +
                          num(std::abs(m.orbit.minimal_period - oracle_t)));
        }
        const PeriodicOrbit& last = family.back().orbit;
        const double err = std::abs(last.minimal_period - kTwoPi / std::numbers::sqrt2);
        o.detail << "|T(1e-3) - 2 pi/sqrt 2| = " << num(err) << ", orbit distance " << num(last.orbit_distance);
        o.require(err <= kPeriodTolA, "period error too large");
        o.require(last.orbit_distance <= kOrbitDistanceA, "orbit distance too large");
        const double dt = seconds_since(t0);
        o.require(dt < kExampleSeconds, "took " + num(dt) + " s");
    });

    run(8, "Example C end to end", [](Outcome& o) {
        const auto t0 = Clock::now();
        const Expr u = parse_expr(gallery::kExampleC, 4);
        const SkewGeneratorSet g(4, {rot(4, 0, 1), rot(4, 2, 3)});
        const Eigen::VectorXd q0 = Eigen::VectorXd::Unit(4, 0);
        const ExampleRun r = analyze_example(u, g, q0, 1);
        o.require(r.report.isotropy_dim == 1, "isotropy dimension " + std::to_string(r.report.isotropy_dim));
        const BetaCluster& b = r.report.betas.at(1);
        ReprSignature eig(1, 0);
        eig.add_weight({1}, 1);
        o.require(std::abs(b.beta - 1.0) <= kBetaTol, "beta_j0 != 1");
        o.require(b.eig_signature == eig, "eigenspace signature " + to_string(b.eig_signature));

        ReprSignature expected_u(2, 0);
        expected_u.add_weight({1, 1}, 1);
        o.require(r.cert.u_signature == expected_u,
                  "U_signature " + to_string(r.cert.u_signature) + ", expected " + to_string(expected_u));
        for (const auto& t : r.cert.u_signature.weights())
            o.require(std::any_of(t.m.begin(), t.m.end(), [](auto x) { return x != 0; }), "zero weight");
        o.require(std::abs(r.cert.lambda_star - 1.0) <= kBetaTol, "lambda* != 1");
        const int n0 = stabilization_mode(2.0, r.cert.lambda_plus);
        const IndexWindow w = index_window(r.report.spectrum, r.cert.beta, r.cert.epsilon, n0 + 5);
        o.require(w.jump == 4, "index jump " + std::to_string(w.jump));

        // With |x| = 1 the y-block decouples as y'' = -y: period 2 pi.
        const double oracle_t = kTwoPi;
        const auto family = liapunov_family(u, g, r.report, r.cert, {1e-1, 1e-2});
        const double err = std::abs(family.back().orbit.minimal_period - oracle_t);
        o.require(err <= kPeriodTolC, "|T(1e-2) - 2 pi| = " + num(err));
        const double dt = seconds_since(t0);
        o.require(dt < kExampleSeconds, "took " + num(dt) + " s");
    });

    run(9, "resonance set vs zero blocks", [](Outcome& o) {
        std::mt19937_64 rng(909);
        std::uniform_real_distribution<double> beta_d(0.3, 3.0), lambda_d(0.05, 6.0);
        constexpr int kModes = 6;
        long long checked = 0;
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> betas(1 + trial % 4);
            for (auto& b : betas) b = beta_d(rng);
            std::sort(betas.begin(), betas.end(), std::greater<>());
            std::vector<HessianCluster> h = {{0.0, 1}};
            for (double b : betas) h.push_back({b * b, 1});
            const std::vector<double> levels = bifurcation_levels(betas, kModes);
            auto near_level = [&](double lambda) {
                for (double v : levels)
                    if (std::abs(v - lambda) <= kLevelTol * std::max(1.0, v)) return true;
                return false;
            };
            auto has_zero_block = [&](double lambda) {
                for (int k = 1; k <= kModes; ++k)
                    for (const auto& e : block_spectrum(h, k, lambda).entries)
                        if (e.mu > 0.0 && e.sign == 0) return true;
                return false;
            };
            for (double v : levels) {
                ++checked;
                if (!has_zero_block(v)) o.require(false, "level " + num(v) + " has no zero block");
            }
            for (int s = 0; s < 200; ++s) {
                const double lambda = lambda_d(rng);
                ++checked;
                if (has_zero_block(lambda) != near_level(lambda))
                    o.require(false, "lambda " + num(lambda) + " disagrees");
            }
        }
        o.detail << checked << " values of lambda";
    });

    run(10, "truncation stability", [](Outcome& o) {
        struct Case {
            const char* name;
            std::string text;
            int n;
            std::vector<Eigen::MatrixXd> gens;
            std::size_t j0;
        };
        const std::vector<Case> cases = {{"A", gallery::kExampleA, 2, {rot(2, 0, 1)}, 0},
                                         {"C", gallery::kExampleC, 4, {rot(4, 0, 1), rot(4, 2, 3)}, 1}};
        for (const auto& c : cases) {
            const Expr u = parse_expr(c.text, c.n);
            const SkewGeneratorSet g(c.n, c.gens);
            const ExampleRun r = analyze_example(u, g, Eigen::VectorXd::Unit(c.n, 0), c.j0);
            double max_mu = 0.0;
            for (const auto& cl : r.report.spectrum) max_mu = std::max(max_mu, cl.mu);
            const int n0 = stabilization_mode(max_mu, r.cert.lambda_plus);
            const IndexWindow base = index_window(r.report.spectrum, r.cert.beta, r.cert.epsilon, n0);
            for (int n = n0; n <= n0 + 10; ++n) {
                const IndexWindow w = index_window(r.report.spectrum, r.cert.beta, r.cert.epsilon, n);
                bool same = w.n0 == base.n0 && w.dim_plus_minus == base.dim_plus_minus &&
                            w.dim_plus_plus == base.dim_plus_plus && w.jump == base.jump &&
                            w.lambda_minus == base.lambda_minus && w.lambda_plus == base.lambda_plus;
                for (int k = 0; k <= n; ++k) {
                    const std::int64_t lo = k <= n0 ? base.per_mode_minus[static_cast<std::size_t>(k)] : 0;
                    const std::int64_t hi = k <= n0 ? base.per_mode_plus[static_cast<std::size_t>(k)] : 0;
                    same = same && w.per_mode_minus[static_cast<std::size_t>(k)] == lo &&
                           w.per_mode_plus[static_cast<std::size_t>(k)] == hi;
                }
                o.require(same, std::string(c.name) + ": window differs at N = " + std::to_string(n));
            }
            o.detail << c.name << ": n0 = " << n0 << ", jump " << base.jump << "  ";
        }
    });

    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}

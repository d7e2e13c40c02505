// elc: command-line front end.
//
//   elc analyze --config run.json [--out report.json] [--dump-blocks] [--seed N]
//   elc orbits  --config run.json [--out report.json] [--csv branch.csv] [--dump-blocks] [--seed N]
//   elc chi "0 + 1·[1]" "2 + 1·[2]" --rank 1
//   elc chi --config run.json
//
// Exit codes: 0 certified, 1 input error, 2 hypothesis failure, 3 solver failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "elc/errors.hpp"
#include "elc/report.hpp"

namespace {

constexpr const char* kGrammar = R"(Potential grammar (config field "potential"):
  expr    := term (('+' | '-') term)*
  term    := unary (('*' | '/') unary)*
  unary   := '-' unary | power
  power   := primary ('^' ['-'] integer)*
  primary := number | x<i> | sin(expr) | cos(expr) | exp(expr) | sqrt(expr) | (expr)
Variables are x1..xn with n = config "dimension".)";

nlohmann::json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw elc::Error("io_error", "cannot read config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw elc::Error("config_malformed", std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

std::string sibling(const std::string& out, const char* suffix)
{
    std::filesystem::path p(out);
    p.replace_extension();
    return p.string() + suffix;
}

int emit_error(const std::string& out, const elc::Error& e)
{
    nlohmann::json rep = {{"schema", elc::kReportSchema},
                          {"verdict", "input-error"},
                          {"error", elc::error_object(e.code(), e.what())}};
    const std::string text = rep.dump(2) + "\n";
    if (!out.empty()) {
        try {
            elc::write_atomic(out, text);
        } catch (const elc::Error&) {
        }
    }
    std::cerr << text;
    return elc::kInputError;
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
    } else {
        elc::write_atomic(path, text);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Equivariant Liapunov center analysis"};
    app.footer(kGrammar);
    app.require_subcommand(1);

    std::string config_path, out_path, csv_path;
    bool dump_blocks = false;
    std::int64_t seed = -1;

    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        cmd->add_option("--out", out_path, "report path (default: stdout)");
        cmd->add_flag("--dump-blocks", dump_blocks, "write the Fourier block CSV (k, mu, block_eig at both window ends)");
        cmd->add_option("--seed", seed, "seed for the sampling checks (overrides the config)")->check(CLI::NonNegativeNumber);
    };

    CLI::App* analyze = app.add_subcommand("analyze", "check hypotheses and build the bifurcation certificate");
    add_run_options(analyze);
    CLI::App* orbits = app.add_subcommand("orbits", "analyze, then compute the family of periodic orbits");
    add_run_options(orbits);
    orbits->add_option("--csv", csv_path, "branch CSV path");

    CLI::App* chi = app.add_subcommand("chi", "frak_S, truncated Euler characteristic and distinguishability");
    std::vector<std::string> signatures;
    int rank = 1;
    std::string chi_config;
    chi->add_option("signatures", signatures, "signatures such as \"0 + 1·[1]\"");
    chi->add_option("--rank", rank, "torus rank of the signatures")->check(CLI::NonNegativeNumber);
    chi->add_option("--config", chi_config, "take the representation from the generators of a run config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : elc::kInputError;
    }

    if (chi->parsed()) {
        try {
            if (!chi_config.empty()) {
                const elc::RunConfig cfg = elc::parse_config(load_json(chi_config));
                const elc::SkewGeneratorSet gens(cfg.dimension, cfg.generators);
                const elc::ReprSignature sig = elc::signature_of(gens);
                signatures.insert(signatures.begin(), elc::to_string(sig));
                rank = gens.rank();
            }
            if (signatures.empty()) throw elc::Error("usage", "chi needs at least one signature or --config");
            std::cout << elc::run_chi(signatures, rank);
            return 0;
        } catch (const elc::Error& e) {
            return emit_error("", e);
        }
    }

    elc::RunConfig cfg;
    try {
        cfg = elc::parse_config(load_json(config_path));
    } catch (const elc::Error& e) {
        return emit_error(out_path, e);
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (out_path.empty()) out_path = cfg.report_path;

    const bool want_orbits = orbits->parsed();
    elc::RunResult result = want_orbits ? elc::run_orbits(cfg, dump_blocks) : elc::run_analyze(cfg, dump_blocks);

    try {
        emit(out_path, result.report.dump(2) + "\n");
        if (dump_blocks && !result.blocks_csv.empty()) {
            std::string path = cfg.blocks_csv_path;
            if (path.empty() && !out_path.empty()) path = sibling(out_path, ".blocks.csv");
            emit(path, result.blocks_csv);
        }
        if (want_orbits) {
            std::string path = csv_path.empty() ? cfg.branch_csv_path : csv_path;
            if (path.empty() && !out_path.empty()) path = sibling(out_path, ".branch.csv");
            emit(path, result.branch_csv);
        }
    } catch (const elc::Error& e) {
        std::cerr << elc::error_object(e.code(), e.what()).dump() << "\n";
        return elc::kInputError;
    }
    if (result.exit_code != elc::kCertified && result.report.contains("error"))
        std::cerr << result.report["error"].dump() << "\n";
    return result.exit_code;
}

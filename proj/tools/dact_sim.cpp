// dact_sim: run scenarios, attack suites, depth sweeps and transcript replays.

#include <dact/error.hpp>
#include <dact/harness.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dact;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::ConfigInvalid, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::ConfigInvalid, "cannot write " + path.string());
    out << text;
}

ScenarioConfig load(const std::string& what)
{
    if (fs::exists(what)) return ScenarioConfig::parse(read_file(what));
    return builtin_scenario(what);
}

bool report(const ScenarioConfig& cfg, const ScenarioResult& r, bool verbose)
{
    for (const auto& v : r.verdicts)
        if (verbose || !v.pass) std::cout << "  " << (v.pass ? "ok   " : "FAIL ") << v.name << ": " << v.detail << "\n";
    std::cout << (r.passed() ? "PASS " : "FAIL ") << cfg.name << " (" << r.transcript.records().size()
              << " records, digest " << r.transcript.digest().to_hex().substr(0, 16) << ")\n";
    return r.passed();
}

void write_outputs(const fs::path& dir, const ScenarioConfig& cfg, const ScenarioResult& r)
{
    fs::create_directories(dir);
    write_file(dir / "transcript.jsonl", transcript_file(cfg, r.transcript));
    write_file(dir / "metrics.jsonl", r.metrics.to_jsonl());
    write_file(dir / "linkability.jsonl", r.linkability.to_jsonl());
}

std::vector<int> parse_depths(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            fail(Errc::ConfigInvalid, "bad depth '" + item + "'");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cross-chain dApp settlement simulator"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    if (const char* env = std::getenv("DACT_SEED")) seed = std::strtoull(env, nullptr, 10);

    std::string scenario, out_dir, depths = "4,8,12,16,20,24,28,32", transcript_path;
    bool verbose = false;

    auto* run = app.add_subcommand("run", "Run a scenario file or builtin scenario");
    run->add_option("scenario", scenario, "Path to a scenario JSON or a builtin name")->required();
    run->add_option("--seed", seed, "Override the scenario seed (also DACT_SEED)");
    run->add_option("--out", out_dir, "Write transcript, metrics and linkability JSONL here");
    run->add_flag("-v,--verbose", verbose, "Print every verdict");

    auto* attacks = app.add_subcommand("attacks", "Run the builtin attack scenarios");
    bool all = false;
    attacks->add_flag("--all", all, "Run every attack (the default)");
    attacks->add_option("--out", out_dir, "Write one output directory per attack");
    attacks->add_flag("-v,--verbose", verbose, "Print every verdict");

    auto* sweep = app.add_subcommand("sweep", "Cost sweep over Merkle depths");
    std::string base = "sweep_base";
    sweep->add_option("--depths", depths, "Comma-separated depths in 1..32");
    sweep->add_option("--base", base, "Scenario to sweep");
    sweep->add_option("--out", out_dir, "Write sweep.jsonl here");

    auto* replay = app.add_subcommand("replay", "Re-run a stored transcript and compare digests");
    replay->add_option("transcript", transcript_path, "transcript.jsonl written by run --out")->required();

    app.add_subcommand("list", "List builtin scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = load(scenario);
            if (seed) cfg.seed = *seed;
            auto r = run_scenario(cfg);
            if (!out_dir.empty()) write_outputs(out_dir, cfg, r);
            return report(cfg, r, verbose) ? 0 : 1;
        }
        if (*attacks) {
            bool ok = true;
            for (const auto& name : attack_names()) {
                auto cfg = builtin_scenario(name);
                if (seed) cfg.seed = *seed;
                auto r = run_scenario(cfg);
                if (!out_dir.empty()) write_outputs(fs::path(out_dir) / name, cfg, r);
                ok = report(cfg, r, verbose) && ok;
            }
            return ok ? 0 : 1;
        }
        if (*sweep) {
            auto cfg = load(base);
            if (seed) cfg.seed = *seed;
            auto text = sweep_to_jsonl(sweep_depths(cfg, parse_depths(depths)));
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                write_file(fs::path(out_dir) / "sweep.jsonl", text);
            }
            std::cout << text;
            return 0;
        }
        if (*replay) {
            auto r = replay_transcript(read_file(transcript_path));
            std::cout << (r.identical ? "identical " : "DIFFERENT ") << r.stored_digest << " " << r.replayed_digest;
            if (r.first_difference) std::cout << " first difference at record " << *r.first_difference;
            std::cout << "\n";
            return r.identical ? 0 : 1;
        }
        for (const auto& name : builtin_names()) {
            auto cfg = builtin_scenario(name);
            std::cout << name;
            for (const auto& t : cfg.tags) std::cout << " [" << t << "]";
            std::cout << "  " << cfg.description << "\n";
        }
        return 0;
    } catch (const ProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

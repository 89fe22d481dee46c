// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <dact/error.hpp>
#include <dact/harness.hpp>
#include <dact/mimc.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace dact;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why)
    {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }
};

std::string failures(const ScenarioResult& r)
{
    for (const auto& v : r.verdicts)
        if (!v.pass) return v.name + ": " + v.detail;
    return "";
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s)
{
    std::ostringstream ss;
    ss.precision(3);
    ss << std::fixed << s << " s";
    return ss.str();
}

Json base_json(std::uint64_t seed, int depth = 16)
{
    Json j{{"name", "acceptance"},
           {"seed", seed},
           {"merkle_depth", depth},
           {"chains", {1001, 1002, 1003}},
           {"multiplexer", 1002},
           {"windows", {{"revert_window", 20}, {"cool_down", 5}, {"revert_fee", 1}}}};
    j["dapps"] = Json::array({Json{{"name", "swap"}, {"chains", {1001, 1003}}}});
    j["wallets"] = Json::array({Json{{"name", "alice"}, {"funds", {{"1001", 1000}}}}});
    j["script"] = Json::array();
    j["checks"] = {"settle_xor_revert"};
    return j;
}

Json act(std::string op, std::initializer_list<std::pair<const char*, Json>> fields = {})
{
    Json a{{"do", std::move(op)}};
    for (const auto& [k, v] : fields) a[k] = v;
    return a;
}

Json deposit(const std::string& note, std::uint64_t value = 10)
{
    return act("deposit", {{"wallet", "alice"}, {"note", note}, {"source", 1001}, {"dapp", "swap"}, {"dest", 1003},
                           {"value", value}});
}

// ------------------------------------------------------------------ 1
Outcome end_to_end()
{
    Outcome o;
    auto cfg = builtin_scenario("settlement_happy_path");
    auto t0 = std::chrono::steady_clock::now();
    auto r = run_scenario(cfg);
    auto dt = seconds_since(t0);
    o.require(cfg.merkle_depth == 16 && cfg.chains.size() == 3, "topology is not 3 chains at depth 16");
    o.require(r.passed(), failures(r));
    o.require(r.outcomes.at("n1") == "settled", "payload not delivered");
    for (const auto& f : r.linkability.findings)
        if (f.kind == LinkFinding::Kind::Leak)
            o.require(false, f.field + " visible in " + f.view + " view at seq " + std::to_string(f.seq));
    o.require(dt < 1.0, "took " + fmt_seconds(dt));
    o.detail = o.pass ? "delivered, no leaks, " + fmt_seconds(dt) : o.detail;
    return o;
}

// ------------------------------------------------------------------ 2
Outcome double_spend()
{
    Outcome o;
    std::size_t rejected = 0;
    for (std::uint64_t seed = 1; seed <= 100 && o.pass; ++seed) {
        std::mt19937_64 gen(seed);
        auto j = base_json(seed, 8);
        auto& s = j["script"];
        auto distractors = gen() % 3;
        for (std::uint64_t d = 0; d < distractors; ++d) s.push_back(deposit("d" + std::to_string(d)));
        s.push_back(deposit("n"));
        s.push_back(act("advance", {{"blocks", 2}}));
        s.push_back(act("withdraw", {{"note", "n"}}));
        auto attempts = 1 + gen() % 5;
        for (std::uint64_t i = 0; i < attempts; ++i) {
            if (gen() % 2) s.push_back(act("advance", {{"blocks", 1 + gen() % 4}}));
            if (gen() % 3 == 0) s.push_back(deposit("late" + std::to_string(i)));
            switch (gen() % 4) {
            case 0: s.push_back(act("withdraw", {{"note", "n"}, {"reuse", true}, {"expect", "DoubleSpend"}})); break;
            case 1: s.push_back(act("withdraw", {{"note", "n"}, {"expect", "DoubleSpend"}})); break;
            case 2:
                s.push_back(act("withdraw", {{"note", "n"}, {"reuse", true}, {"via_relayer", true},
                                             {"expect", "DoubleSpend"}}));
                break;
            default: s.push_back(act("revert_mark", {{"note", "n"}, {"expect", "DoubleSpend"}})); break;
            }
            ++rejected;
        }
        auto r = run_scenario(ScenarioConfig::from_json(j));
        o.require(r.passed(), "seed " + std::to_string(seed) + ": " + failures(r));
        o.require(r.outcomes.at("n") == "settled", "seed " + std::to_string(seed) + ": not settled once");
    }
    if (o.pass) o.detail = "100 interleavings, " + std::to_string(rejected) + " resubmissions rejected";
    return o;
}

// ------------------------------------------------------------------ 3
Outcome forged_root()
{
    Outcome o;
    auto base = builtin_scenario("oracle_forged_root");
    for (std::uint64_t seed = 1; seed <= 50 && o.pass; ++seed) {
        auto cfg = base;
        cfg.seed = seed;
        auto r = run_scenario(cfg);
        o.require(r.passed(), "seed " + std::to_string(seed) + ": " + failures(r));
        bool saw = false;
        for (const auto& rec : r.transcript.records())
            saw = saw || (rec.op == "forge_settlement" && rec.result == "ConstraintViolation(signature)");
        o.require(saw, "seed " + std::to_string(seed) + ": proving was not refused on the signature");
    }
    if (o.pass) o.detail = "50 seeds, every forged proof refused at the signature constraint";
    return o;
}

// ------------------------------------------------------------------ 4
Outcome custody()
{
    Outcome o;
    for (std::uint64_t seed = 1; seed <= 20 && o.pass; ++seed) {
        std::mt19937_64 gen(seed);
        auto j = base_json(seed);
        auto value = 1 + gen() % 500;
        auto& s = j["script"];
        s.push_back(deposit("n", value));
        s.push_back(act("advance", {{"blocks", 2 + gen() % 3}}));
        s.push_back(act("revert_mark", {{"note", "n"}}));
        s.push_back(act("go_offline", {{"actor", "oracle"}}));
        s.push_back(act("go_offline", {{"actor", "swap"}}));
        s.push_back(act("revert_init", {{"note", "n"}}));
        s.push_back(act("advance", {{"blocks", 19}}));
        s.push_back(act("execute", {{"note", "n"}, {"expect", "WindowActive"}}));
        s.push_back(act("advance", {{"blocks", 1 + gen() % 5}}));
        s.push_back(act("execute", {{"note", "n"}}));
        s.push_back(act("assert", {{"what", "refunded"}, {"note", "n"}}));
        s.push_back(act("assert", {{"what", "balance"}, {"wallet", "alice"}, {"chain", 1001}, {"equals", 1000}}));
        auto r = run_scenario(ScenarioConfig::from_json(j));
        o.require(r.passed(), "seed " + std::to_string(seed) + ": " + failures(r));
        o.require(r.outcomes.at("n") == "reverted", "seed " + std::to_string(seed) + ": not reverted");
    }
    if (o.pass) o.detail = "20 seeds, escrow returned at window expiry";
    return o;
}

// ------------------------------------------------------------------ 5
Outcome race_matrix()
{
    Outcome o;
    std::size_t settled = 0, reverted = 0;
    const std::vector<std::string> moves{"withdraw", "revert_mark", "revert_init", "execute", "advance", "halt"};
    for (std::uint64_t seed = 1; seed <= 100 && o.pass; ++seed) {
        std::mt19937_64 gen(seed * 7919);
        auto j = base_json(seed, 8);
        j["checks"] = {"settle_xor_revert", "all_resolved"};
        auto& s = j["script"];
        auto notes = 1 + gen() % 3;
        std::vector<std::string> labels;
        for (std::uint64_t i = 0; i < notes; ++i) {
            labels.push_back("n" + std::to_string(i));
            s.push_back(deposit(labels.back()));
        }
        auto prefix = gen() % 12;
        for (std::uint64_t i = 0; i < prefix; ++i) {
            const auto& m = moves[gen() % moves.size()];
            const auto& note = labels[gen() % labels.size()];
            if (m == "advance")
                s.push_back(act("advance", {{"blocks", 1 + gen() % 25}}));
            else if (m == "halt")
                s.push_back(act("halt", {{"expect", "*"}}));
            else
                s.push_back(act(m, {{"note", note}, {"expect", "*"}}));
        }
        auto all = [&](const char* op) {
            for (const auto& n : labels) s.push_back(act(op, {{"note", n}, {"expect", "*"}}));
        };
        s.push_back(act("advance", {{"blocks", 21}}));
        all("execute");
        all("withdraw");
        all("revert_mark");
        s.push_back(act("advance", {{"blocks", 6}}));
        all("revert_init");
        s.push_back(act("advance", {{"blocks", 21}}));
        all("execute");

        auto r = run_scenario(ScenarioConfig::from_json(j));
        o.require(r.passed(), "seed " + std::to_string(seed) + ": " + failures(r));
        for (const auto& [label, out] : r.outcomes) {
            settled += out == "settled";
            reverted += out == "reverted";
        }
    }
    if (o.pass)
        o.detail = "100 seeds, " + std::to_string(settled) + " settled and " + std::to_string(reverted) +
                   " reverted, none both";
    return o;
}

// ------------------------------------------------------------------ 6
FieldElement naive_root(const std::vector<FieldElement>& leaves, int depth)
{
    std::vector<FieldElement> level(std::size_t{1} << depth, merkle_zero());
    std::copy(leaves.begin(), leaves.end(), level.begin());
    while (level.size() > 1) {
        std::vector<FieldElement> up;
        for (std::size_t i = 0; i < level.size(); i += 2) up.push_back(mimc_hash2(level[i], level[i + 1]));
        level = std::move(up);
    }
    return level[0];
}

Outcome merkle_equivalence()
{
    Outcome o;
    std::size_t prefixes = 0;
    for (int depth = 1; depth <= 8 && o.pass; ++depth) {
        SeededRng rng(depth);
        MerkleTree tree(depth);
        std::vector<FieldElement> leaves;
        o.require(tree.root() == naive_root(leaves, depth), "empty root differs at depth " + std::to_string(depth));
        while (tree.size() < tree.capacity() && o.pass) {
            leaves.push_back(random_field_31(rng));
            tree.insert(leaves.back());
            ++prefixes;
            o.require(tree.root() == naive_root(leaves, depth),
                      "depth " + std::to_string(depth) + " prefix " + std::to_string(leaves.size()));
        }
        try {
            tree.insert(random_field_31(rng));
            o.require(false, "full tree accepted a leaf at depth " + std::to_string(depth));
        } catch (const ProtocolError& e) {
            o.require(e.code() == Errc::TreeFull, std::string("full tree: ") + e.what());
        }
    }
    if (o.pass) o.detail = std::to_string(prefixes) + " prefixes over depths 1-8 match";
    return o;
}

// ------------------------------------------------------------------ 7
Outcome cost_shape()
{
    Outcome o;
    auto series = sweep_depths(builtin_scenario("sweep_base"), {4, 8, 12, 16, 20, 24, 28, 32});
    std::optional<std::uint64_t> verify;
    for (const auto& p : series) {
        o.require(!p.insert_mimc.empty() && !p.verify_units.empty(), "no samples at depth " + std::to_string(p.depth));
        for (auto m : p.insert_mimc)
            o.require(m == std::uint64_t(p.depth), "insert at depth " + std::to_string(p.depth) + " cost " +
                                                       std::to_string(m));
        for (auto v : p.verify_units) {
            if (!verify) verify = v;
            o.require(v == *verify, "verify cost varies: " + std::to_string(v) + " vs " + std::to_string(*verify));
        }
    }
    o.require(series.back().depth == 32 && series.back().capacity == 4294967296ULL, "depth-32 capacity wrong");
    if (o.pass)
        o.detail = "insert = depth at 4..32, verify = " + std::to_string(*verify) + " units at every depth, capacity " +
                   std::to_string(series.back().capacity);
    return o;
}

// ------------------------------------------------------------------ 8
Outcome tiers()
{
    Outcome o;
    std::size_t cases = 0;
    auto accepts = [](auto&& fn) {
        try {
            fn();
            return true;
        } catch (const ProtocolError&) {
            return false;
        }
    };
    for (std::uint64_t v : {0ULL, 1ULL, 1000ULL, 1001ULL, 10000ULL, 10001ULL}) {
        bool version_ok = v >= 1 && v <= 1000;
        bool chain_ok = v >= 1001 && v <= 10000;
        auto tag = std::to_string(v);

        o.require(accepts([&] { Version{v}; }) == version_ok, "Version(" + tag + ")");
        o.require(accepts([&] { ChainId{v}; }) == chain_ok, "ChainId(" + tag + ")");

        DepositRequest req{FieldElement::from_u64(5), {}, Version(1), Address::from_label("d")};
        auto wire = serialize_deposit(req);
        auto word = be_word(v);
        std::copy(word.begin(), word.end(), wire.begin() + 64);
        o.require(accepts([&] { parse_deposit(wire); }) == version_ok, "deposit wire version " + tag);

        auto j = base_json(1, 4);
        j["chains"] = {1002, v};
        j.erase("dapps");
        j.erase("wallets");
        o.require(accepts([&] { ScenarioConfig::from_json(j); }) == chain_ok, "scenario chain " + tag);

        j = base_json(1, 4);
        j["script"].push_back(act("deposit", {{"wallet", "alice"}, {"note", "n"}, {"source", 1001}, {"dapp", "swap"},
                                              {"dest", 1003}, {"version", v}}));
        auto r = run_scenario(ScenarioConfig::from_json(j));
        o.require(r.passed() == version_ok, "wallet deposit with version " + tag);

        j = base_json(1, 4);
        j["script"].push_back(act("deposit", {{"wallet", "alice"}, {"note", "n"}, {"source", 1001}, {"dapp", "swap"},
                                              {"dest", v}}));
        r = run_scenario(ScenarioConfig::from_json(j));
        o.require(r.passed() == chain_ok, "wallet deposit to chain " + tag);
        cases += 6;
    }
    if (o.pass) o.detail = std::to_string(cases) + " boundary cases accepted or rejected per tier";
    return o;
}

// ------------------------------------------------------------------ 9
Outcome replay()
{
    Outcome o;
    auto dir = std::filesystem::temp_directory_path() / "dact_acceptance";
    std::filesystem::create_directories(dir);
    for (const auto& name : builtin_names()) {
        auto cfg = builtin_scenario(name);
        auto a = run_scenario(cfg).transcript.to_jsonl();
        auto b = run_scenario(cfg);
        o.require(a == b.transcript.to_jsonl(), name + ": rerun differs");

        auto path = dir / (name + ".jsonl");
        {
            std::ofstream out(path, std::ios::binary);
            out << transcript_file(cfg, b.transcript);
        }
        std::ifstream in(path, std::ios::binary);
        std::stringstream text;
        text << in.rdbuf();
        auto rr = replay_transcript(text.str());
        o.require(rr.identical, name + ": stored transcript does not replay");

        auto edited = text.str();
        auto pos = edited.rfind("\"result\":\"ok\"");
        if (pos != std::string::npos) {
            edited.replace(pos, 13, "\"result\":\"no\"");
            o.require(!replay_transcript(edited).identical, name + ": edited transcript still replays");
        }
    }
    std::filesystem::remove_all(dir);
    if (o.pass) o.detail = std::to_string(builtin_names().size()) + " builtins rerun byte-identical and replay from disk";
    return o;
}

// ------------------------------------------------------------------ 10
Outcome attacks()
{
    Outcome o;
    auto names = attack_names();
    const std::vector<std::string> expected{"censorship",         "dapp_hash_squat",       "double_spend",
                                            "oracle_forged_root", "payload_tamper",        "unsigned_leaf",
                                            "withdraw_revert_race", "wrong_chain_withdraw", "wrong_dapp"};
    o.require(names == expected, "attack set is not the nine expected scenarios");
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& n : names) {
        auto r = run_scenario(builtin_scenario(n));
        o.require(r.passed(), n + ": " + failures(r));
    }
    auto dt = seconds_since(t0);
    o.require(dt < 10.0, "took " + fmt_seconds(dt));
    if (o.pass) o.detail = std::to_string(names.size()) + " attacks pass in " + fmt_seconds(dt);
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"end-to-end settlement", end_to_end},
        {"double spend", double_spend},
        {"forged-root neutralization", forged_root},
        {"custody under total outage", custody},
        {"withdraw-revert race", race_matrix},
        {"merkle oracle equivalence", merkle_equivalence},
        {"cost-curve shape", cost_shape},
        {"tier enforcement", tiers},
        {"replay determinism", replay},
        {"attack matrix", attacks},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " " << name << ": " << o.detail << " [" << fmt_seconds(seconds_since(t0))
                  << "]\n";
    }
    return failed ? 1 : 0;
}

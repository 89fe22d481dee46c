#include <dact/error.hpp>
#include <dact/harness.hpp>

#include <algorithm>
#include <set>

namespace dact {

namespace {

const std::set<std::string>& vocabulary()
{
    static const std::set<std::string> v{
        "deposit", "sign",    "relay",   "push_root", "withdraw", "revert_mark", "revert_init", "halt",
        "execute", "advance", "go_offline", "revert", "participating", "oracle_mode", "forge_settlement",
        "register", "assert",
    };
    return v;
}

const std::set<std::string>& check_names()
{
    static const std::set<std::string> v{"settle_xor_revert", "deposit_minimality", "oracle_blind", "source_blind",
                                         "all_resolved"};
    return v;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback)
{
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(Errc::ConfigInvalid, std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T require(const Json& j, const char* key)
{
    if (!j.contains(key)) fail(Errc::ConfigInvalid, std::string("missing field '") + key + "'");
    return get_or<T>(j, key, T{});
}

OraclePolicy::Mode parse_mode(const std::string& s)
{
    using M = OraclePolicy::Mode;
    for (auto m : {M::Honest, M::ForgeRoot, M::CensorDapp, M::CensorChain, M::Replay})
        if (oracle_mode_name(m) == s) return m;
    fail(Errc::ConfigInvalid, "unknown oracle mode '" + s + "'");
}

} // namespace

ScenarioConfig ScenarioConfig::from_json(const Json& j)
{
    if (!j.is_object()) fail(Errc::ConfigInvalid, "scenario must be an object");
    ScenarioConfig c;
    c.name = require<std::string>(j, "name");
    c.description = get_or<std::string>(j, "description", "");
    c.tags = get_or<std::vector<std::string>>(j, "tags", {});
    c.seed = get_or<std::uint64_t>(j, "seed", 1);
    c.merkle_depth = get_or<int>(j, "merkle_depth", 16);
    c.chains = require<std::vector<std::uint64_t>>(j, "chains");
    c.multiplexer = require<std::uint64_t>(j, "multiplexer");
    c.auto_step = get_or<bool>(j, "auto", true);
    c.checks = get_or<std::vector<std::string>>(j, "checks", {});

    if (c.merkle_depth < 1 || c.merkle_depth > kMaxTreeDepth) fail(Errc::ConfigInvalid, "merkle_depth not in 1..32");
    std::set<std::uint64_t> chain_set(c.chains.begin(), c.chains.end());
    if (chain_set.size() != c.chains.size()) fail(Errc::ConfigInvalid, "duplicate chain id");
    for (auto id : c.chains)
        if (!is_valid_chain_id(id)) fail(Errc::ConfigInvalid, "chain id " + std::to_string(id) + " out of tier");
    if (!chain_set.count(c.multiplexer)) fail(Errc::ConfigInvalid, "multiplexer must be one of the chains");

    if (j.contains("windows")) {
        const auto& w = j.at("windows");
        c.windows.window = get_or<std::uint64_t>(w, "revert_window", 100);
        c.windows.cool_down = get_or<std::uint64_t>(w, "cool_down", 10);
        c.windows.fee = get_or<std::uint64_t>(w, "revert_fee", 1);
        if (c.windows.window == 0) fail(Errc::ConfigInvalid, "revert_window must be positive");
    }

    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        c.oracle.mode = parse_mode(get_or<std::string>(o, "mode", "honest"));
        c.oracle.censor_dapp = get_or<std::string>(o, "censor_dapp", "");
        c.oracle.censor_chain = get_or<std::uint64_t>(o, "censor_chain", 0);
        c.oracle.forged_root = get_or<std::string>(o, "forged_root", "");
        c.oracle.relay_period = get_or<std::uint64_t>(o, "relay_period", 1);
        c.oracle.root_push_period = get_or<std::uint64_t>(o, "root_push_period", 1);
        if (c.oracle.relay_period == 0 || c.oracle.root_push_period == 0)
            fail(Errc::ConfigInvalid, "oracle periods must be positive");
    }

    std::set<std::string> names{"oracle", "script", "contract", "user", "mixer"};
    auto claim = [&](const std::string& n) {
        if (n.empty() || !names.insert(n).second) fail(Errc::ConfigInvalid, "actor name '" + n + "' reused");
    };

    for (const auto& d : get_or<std::vector<Json>>(j, "dapps", {})) {
        DappConfig dc;
        dc.name = require<std::string>(d, "name");
        claim(dc.name);
        dc.chains = require<std::vector<std::uint64_t>>(d, "chains");
        for (auto id : dc.chains)
            if (!chain_set.count(id)) fail(Errc::ConfigInvalid, dc.name + ": unknown chain " + std::to_string(id));
        dc.register_at_genesis = get_or<bool>(d, "register", true);
        if (d.contains("signer")) {
            const auto& s = d.at("signer");
            auto scheme = get_or<std::string>(s, "scheme", "single");
            if (scheme == "threshold") {
                dc.signer.kind = SignerScheme::Kind::Threshold;
                dc.signer.n = get_or<unsigned>(s, "n", 1);
                dc.signer.k = get_or<unsigned>(s, "k", 1);
                dc.signer.participating = get_or<unsigned>(s, "participating", dc.signer.n);
                if (dc.signer.k == 0 || dc.signer.k > dc.signer.n || dc.signer.n > 255)
                    fail(Errc::ConfigInvalid, dc.name + ": threshold needs 1 <= k <= n <= 255");
            } else if (scheme != "single") {
                fail(Errc::ConfigInvalid, dc.name + ": unknown signer scheme '" + scheme + "'");
            }
        }
        if (d.contains("resilience")) {
            const auto& r = d.at("resilience");
            dc.resilience.max_reverts_per_period =
                get_or<std::uint64_t>(r, "max_reverts_per_period", dc.resilience.max_reverts_per_period);
            dc.resilience.period = get_or<std::uint64_t>(r, "period", dc.resilience.period);
            dc.resilience.max_value_per_revert =
                get_or<std::uint64_t>(r, "max_value_per_revert", dc.resilience.max_value_per_revert);
        }
        c.dapps.push_back(std::move(dc));
    }

    for (const auto& w : get_or<std::vector<Json>>(j, "wallets", {})) {
        WalletConfig wc;
        wc.name = require<std::string>(w, "name");
        claim(wc.name);
        if (w.contains("funds")) {
            for (const auto& [k, v] : w.at("funds").items()) {
                std::uint64_t id = 0;
                try {
                    id = std::stoull(k);
                } catch (const std::exception&) {
                    fail(Errc::ConfigInvalid, wc.name + ": funds key '" + k + "' is not a chain id");
                }
                if (!chain_set.count(id)) fail(Errc::ConfigInvalid, wc.name + ": unknown chain " + k);
                if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(Errc::ConfigInvalid, wc.name + ": funds must be unsigned");
                wc.funds[id] = v.get<std::uint64_t>();
            }
        }
        c.wallets.push_back(std::move(wc));
    }

    if (!c.oracle.censor_dapp.empty() &&
        std::none_of(c.dapps.begin(), c.dapps.end(), [&](const auto& d) { return d.name == c.oracle.censor_dapp; }))
        fail(Errc::ConfigInvalid, "censor_dapp names no dApp");

    for (const auto& a : get_or<std::vector<Json>>(j, "script", {})) {
        if (!a.is_object() || !a.contains("do") || !a.at("do").is_string())
            fail(Errc::ConfigInvalid, "script action needs a \"do\" string");
        auto op = a.at("do").get<std::string>();
        if (!vocabulary().count(op)) fail(Errc::ConfigInvalid, "unknown action '" + op + "'");
        if (a.contains("expect") && !a.at("expect").is_string()) fail(Errc::ConfigInvalid, "expect must be a string");
        c.script.push_back(a);
    }
    for (const auto& ch : c.checks)
        if (!check_names().count(ch)) fail(Errc::ConfigInvalid, "unknown check '" + ch + "'");
    return c;
}

ScenarioConfig ScenarioConfig::parse(std::string_view text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::ConfigInvalid, std::string("not JSON: ") + e.what());
    }
    return from_json(j);
}

Json ScenarioConfig::to_json() const
{
    Json j;
    j["name"] = name;
    if (!description.empty()) j["description"] = description;
    if (!tags.empty()) j["tags"] = tags;
    j["seed"] = seed;
    j["merkle_depth"] = merkle_depth;
    j["chains"] = chains;
    j["multiplexer"] = multiplexer;
    j["windows"] = {{"revert_window", windows.window}, {"cool_down", windows.cool_down}, {"revert_fee", windows.fee}};

    Json o;
    o["mode"] = std::string(oracle_mode_name(oracle.mode));
    if (!oracle.censor_dapp.empty()) o["censor_dapp"] = oracle.censor_dapp;
    if (oracle.censor_chain) o["censor_chain"] = oracle.censor_chain;
    if (!oracle.forged_root.empty()) o["forged_root"] = oracle.forged_root;
    o["relay_period"] = oracle.relay_period;
    o["root_push_period"] = oracle.root_push_period;
    j["oracle"] = std::move(o);

    Json ds = Json::array();
    for (const auto& d : dapps) {
        Json dj;
        dj["name"] = d.name;
        dj["chains"] = d.chains;
        if (d.signer.kind == SignerScheme::Kind::Threshold)
            dj["signer"] = {{"scheme", "threshold"}, {"n", d.signer.n}, {"k", d.signer.k},
                            {"participating", d.signer.participating}};
        else
            dj["signer"] = {{"scheme", "single"}};
        ResiliencePolicy def;
        Json r = Json::object();
        if (d.resilience.max_reverts_per_period != def.max_reverts_per_period)
            r["max_reverts_per_period"] = d.resilience.max_reverts_per_period;
        if (d.resilience.period != def.period) r["period"] = d.resilience.period;
        if (d.resilience.max_value_per_revert != def.max_value_per_revert)
            r["max_value_per_revert"] = d.resilience.max_value_per_revert;
        if (!r.empty()) dj["resilience"] = std::move(r);
        if (!d.register_at_genesis) dj["register"] = false;
        ds.push_back(std::move(dj));
    }
    j["dapps"] = std::move(ds);

    Json ws = Json::array();
    for (const auto& w : wallets) {
        Json f = Json::object();
        for (const auto& [chain, amount] : w.funds) f[std::to_string(chain)] = amount;
        ws.push_back({{"name", w.name}, {"funds", std::move(f)}});
    }
    j["wallets"] = std::move(ws);
    j["auto"] = auto_step;
    j["script"] = script;
    j["checks"] = checks;
    return j;
}

} // namespace dact

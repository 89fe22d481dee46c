#pragma once

#include <dact/actors.hpp>

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dact {

using Json = nlohmann::ordered_json;

struct WalletConfig {
    std::string name;
    std::map<std::uint64_t, std::uint64_t> funds; // chain -> balance
};

struct DappConfig {
    std::string name;
    std::vector<std::uint64_t> chains;
    SignerScheme signer;
    ResiliencePolicy resilience;
    bool register_at_genesis = true;
};

struct OracleConfig {
    OraclePolicy::Mode mode = OraclePolicy::Mode::Honest;
    std::string censor_dapp; // dApp name, resolved to its global hash
    std::uint64_t censor_chain = 0;
    std::string forged_root; // hex; empty = random
    std::uint64_t relay_period = 1;
    std::uint64_t root_push_period = 1;
};

/// Parsed, validated scenario. `script` keeps each action as its JSON object;
/// the vocabulary is documented in the README.
struct ScenarioConfig {
    std::string name;
    std::string description;
    std::vector<std::string> tags;
    std::uint64_t seed = 1;
    int merkle_depth = 16;
    std::vector<std::uint64_t> chains;
    std::uint64_t multiplexer = 0;
    RevertParams windows;
    OracleConfig oracle;
    std::vector<DappConfig> dapps;
    std::vector<WalletConfig> wallets;
    bool auto_step = true;
    std::vector<Json> script;
    std::vector<std::string> checks;

    /// Throws ConfigInvalid.
    static ScenarioConfig from_json(const Json& j);
    static ScenarioConfig parse(std::string_view text);
    Json to_json() const;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct MetricsReport {
    std::map<std::string, OpCounts> phases; // by script action
    OpCounts total;
    std::vector<std::uint64_t> insert_mimc;
    std::vector<std::uint64_t> prove_constraints;
    std::vector<OpCounts> verify;

    std::string to_jsonl() const;
};

/// Cost-model units of one sample: MiMC permutations + Keccak blocks +
/// signature verifications.
std::uint64_t cost_units(const OpCounts& c) noexcept;

/// Ground truth for the linkability analyzer; never part of a transcript.
struct NoteSecrets {
    std::string label;
    std::uint64_t source = 0;
    std::uint64_t dest = 0;
    std::string commitment;
    std::string tpc;
    std::string payload;
    std::string dest_word;
    std::string salt;
    std::string secret;
    std::string nullifier;
};

struct ViewSpec {
    std::uint64_t multiplexer = 0;
    std::vector<std::string> oracle_actors;
};

struct LinkFinding {
    enum class Kind { Leak, ExpectedLinkage, Correlation };
    Kind kind = Kind::Leak;
    std::string view;  // "oracle", "source", or "chain:<id>"
    std::string field; // payload, dest_chain, salt, secret, nullifier, commitment, tpc
    std::string note;
    std::uint64_t seq = 0;
};

std::string_view link_kind_name(LinkFinding::Kind k) noexcept;

struct LinkabilityReport {
    std::vector<LinkFinding> findings;

    bool leaks_in(std::string_view view) const;
    std::size_t count(LinkFinding::Kind k) const;
    std::string to_jsonl() const;
};

/// Byte-scans the oracle-visible view (oracle calls, multiplexer chain,
/// Deposit events) and each note's source-chain view for the note's private
/// encodings. Also reports commitments seen off their source chain (revert
/// linkage) and trustless public commitments seen off their source chain.
LinkabilityReport analyze_linkability(const Transcript& t, const std::vector<NoteSecrets>& notes,
                                      const ViewSpec& views);

struct ScenarioResult {
    Transcript transcript;
    MetricsReport metrics;
    std::vector<Verdict> verdicts;
    std::vector<NoteSecrets> secrets;
    LinkabilityReport linkability;
    /// note label -> outcome ("settled", "reverted", "pending")
    std::map<std::string, std::string> outcomes;

    bool passed() const;
};

/// Deterministic in (config, config.seed). Throws ConfigInvalid.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct DepthPoint {
    int depth = 0;
    std::uint64_t capacity = 0;
    std::vector<std::uint64_t> insert_mimc;
    std::vector<std::uint64_t> prove_constraints;
    std::vector<std::uint64_t> verify_units;
};

std::vector<DepthPoint> sweep_depths(const ScenarioConfig& base, const std::vector<int>& depths);
std::string sweep_to_jsonl(const std::vector<DepthPoint>& series);

/// Transcript file: a header line {"scenario": <config>} then the records.
std::string transcript_file(const ScenarioConfig& config, const Transcript& t);

struct ReplayResult {
    bool identical = false;
    std::string stored_digest;
    std::string replayed_digest;
    std::optional<std::uint64_t> first_difference; // line index
};

ReplayResult replay_transcript(std::string_view file_text);

/// Scenarios shipped in scenarios/, compiled in.
std::vector<std::string> builtin_names();
/// Throws ConfigInvalid for an unknown name.
ScenarioConfig builtin_scenario(std::string_view name);
/// Names tagged "attack", in file order.
std::vector<std::string> attack_names();

} // namespace dact

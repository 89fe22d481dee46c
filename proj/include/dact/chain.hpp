#pragma once

#include <dact/circuit.hpp>
#include <dact/merkle.hpp>
#include <dact/op_counter.hpp>
#include <dact/signature.hpp>
#include <dact/transcript.hpp>
#include <dact/types.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dact {

enum class EventKind : std::uint8_t {
    DappRegistered,
    Deposit,
    RootUpdated,
    LeafInserted,
    SignatureStored,
    Settled,
    RevertMarked,
    RevertInitiated,
    RevertHalted,
    RevertExecuted,
};

std::string_view event_name(EventKind kind) noexcept;

struct Event {
    EventKind kind = EventKind::Deposit;
    Bytes payload;
    ChainId emitting_chain;
    std::uint64_t block = 0;
    Address origin; // contract that caused the event
};

/// Deposit event payload: commitment | tpc | source chain word, 96 bytes.
struct DepositEventData {
    FieldElement commitment;
    TrustlessPublicCommitment tpc;
    ChainId source_chain;
};

inline constexpr std::size_t kDepositEventSize = 96;

Bytes encode_deposit_event(const DepositEventData& d);
/// Throws MalformedDeposit.
DepositEventData decode_deposit_event(ByteView payload);

/// RevertInitiated payload: nullifier hash | commitment | window end word | dApp address.
struct RevertEventData {
    FieldElement nullifier_hash;
    FieldElement commitment;
    std::uint64_t window_end = 0;
    Address dapp;
};

Bytes encode_revert_event(const RevertEventData& d);
RevertEventData decode_revert_event(ByteView payload);

struct RevertParams {
    std::uint64_t window = 100;
    std::uint64_t cool_down = 10;
    std::uint64_t fee = 1;
};

struct PendingRevert {
    FieldElement commitment;
    Address dapp;
    std::uint64_t window_end = 0;
    bool halted = false;
};

struct CommitmentRecord {
    TrustlessPublicCommitment tpc;
    Address dapp;
};

inline constexpr std::size_t kRouterRootWindow = 2;

struct RouterState {
    std::map<DappGlobalHash, Address> dapp_registry;
    std::map<Address, DappGlobalHash> hash_of_dapp;
    std::map<VerifyingKey, DappGlobalHash> hash_of_key;
    std::map<DappGlobalHash, VerifyingKey> key_of_hash;
    std::deque<FieldElement> known_roots; // oldest first, at most two
    std::set<FieldElement> nullifier_spent;
    std::set<FieldElement> nullifier_reverted;
    std::map<FieldElement, PendingRevert> pending_reverts; // by nullifier hash
    std::map<FieldElement, CommitmentRecord> commitment_log;
    std::map<FieldElement, std::uint64_t> last_revert_attempt; // by commitment
    std::set<Address> oracles;
    std::map<Address, std::uint64_t> fees_paid;
    std::uint64_t fees_collected = 0;

    bool is_known_root(const FieldElement& root) const;
};

struct MixerState {
    explicit MixerState(int depth) : tree(depth) {}

    std::set<FieldElement> commitments_seen;
    MerkleTree tree;
    std::vector<Leaf> leaves; // metadata, parallel to tree.leaves()
    std::map<std::uint64_t, std::map<VerifyingKey, Signature>> leaf_signatures;

    std::optional<Signature> signature(std::uint64_t index, const VerifyingKey& key) const;
    std::optional<std::uint64_t> index_of(const FieldElement& leaf_value) const;
};

/// Demo value-transfer dApp: escrows value on deposit, receives payloads on
/// settlement, refunds the depositor when a revert executes.
struct DappContract {
    struct Escrow {
        Address depositor;
        std::uint64_t amount = 0;
    };

    Address address;
    Address owner;
    std::map<FieldElement, Escrow> escrow; // by commitment
    std::vector<Payload> delivered;
    std::vector<FieldElement> refunded;
};

struct SettlementOutcome {
    FieldElement nullifier_hash;
    Address dapp;
    Payload payload{};
};

/// Per-call cost samples the metrics layer reads back.
struct CostLog {
    std::vector<std::uint64_t> insert_mimc;
    std::vector<OpCounts> verify;
    std::vector<std::uint64_t> prove_constraints;
};

struct ChainConfig {
    ChainId id;
    bool multiplexer = false;
    int merkle_depth = 16;
    RevertParams revert;
};

class Network;

/// One ledger: block clock, event log, Router, and on the multiplexer chain
/// the Mixer with its Merkle tree. Every public mutator is one contract call;
/// it is recorded in the transcript with its outcome and either fully applies
/// or throws ProtocolError leaving state untouched.
class Chain {
public:
    Chain(const ChainConfig& cfg, Network& net);
    Chain(const Chain&) = delete;
    Chain& operator=(const Chain&) = delete;

    ChainId id() const noexcept { return cfg_.id; }
    std::uint64_t height() const noexcept { return height_; }
    bool is_multiplexer() const noexcept { return mixer_ != nullptr; }
    const RevertParams& revert_params() const noexcept { return cfg_.revert; }

    const std::vector<Event>& events() const noexcept { return events_; }
    const RouterState& router() const noexcept { return router_; }
    /// Throws PreconditionViolated off the multiplexer chain.
    const MixerState& mixer() const;
    const DappContract* dapp(const Address& address) const;
    std::uint64_t balance(const Address& who) const;

    // Genesis setup, not recorded.
    void add_oracle(const Address& oracle);
    void deploy_dapp(const Address& dapp, const Address& owner);
    void fund(const Address& who, std::uint64_t amount);

    /// The owner asks its dApp contract to register. `pop` is the dApp key's
    /// signature over registration_message(...), proving key possession.
    DappGlobalHash register_dapp(const Address& sender, const Address& dapp, std::span<const Address> others,
                                 const VerifyingKey& key, const Signature& pop);
    static Bytes registration_message(ChainId chain, const DappGlobalHash& g, const Address& dapp);

    /// User deposit through the dApp: escrows `value` and forwards the request
    /// to the Router. Returns the emitted Deposit event.
    Event deposit(const Address& sender, const Address& dapp, const FieldElement& commitment,
                  const ByteHash32& obfuscated_data, Version version, std::uint64_t value);

    void update_root(const Address& sender, const FieldElement& root);

    SettlementOutcome withdraw(const Address& sender, const Proof& proof, const Payload& payload,
                               const FieldElement& salt, ChainId dest_chain_claim, Version version);

    void revert_mark(const Address& sender, const Proof& proof, const Payload& payload, const FieldElement& salt,
                     Version version, const DappGlobalHash& g);
    std::uint64_t revert_initiate(const Address& sender, const Proof& proof);
    void revert_halt(const Address& sender, const FieldElement& nullifier_hash);
    void revert_execute(const Address& sender, const FieldElement& nullifier_hash);

    std::uint64_t mixer_submit(const Address& sender, const Event& deposit_event);
    void mixer_store_signature(const Address& sender, std::uint64_t index, const VerifyingKey& key,
                               const Signature& sig);

    /// Throws PreconditionViolated for n == 0.
    std::uint64_t advance_blocks(std::uint64_t n);

private:
    template <class F>
    auto call(const Address& sender, std::string op, std::vector<std::pair<std::string, std::string>> args,
              F&& body);

    void emit(EventKind kind, Bytes payload, const Address& origin);
    MixerState& mixer_mut();
    DappContract& dapp_mut(const Address& address);

    ChainConfig cfg_;
    Network& net_;
    std::uint64_t height_ = 0;
    std::vector<Event> events_;
    RouterState router_;
    std::unique_ptr<MixerState> mixer_;
    std::map<Address, DappContract> dapps_;
    std::map<Address, std::uint64_t> balances_;
};

struct NetworkConfig {
    std::vector<std::uint64_t> chains;
    std::uint64_t multiplexer = 0;
    int merkle_depth = 16;
    RevertParams revert;
    std::uint64_t seed = 0;
};

/// All chains of one scenario plus the shared transcript, proof system and
/// cost log. Throws ConfigInvalid on bad topology.
class Network {
public:
    explicit Network(const NetworkConfig& cfg);
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    Chain& chain(ChainId id);
    const Chain& chain(ChainId id) const;
    bool has_chain(ChainId id) const { return chains_.count(id.value()) != 0; }
    Chain& multiplexer() { return chain(ChainId(multiplexer_)); }
    const Chain& multiplexer() const { return chain(ChainId(multiplexer_)); }
    std::vector<ChainId> chain_ids() const;

    const ProofSystem& proofs() const noexcept { return proofs_; }
    Transcript& transcript() noexcept { return transcript_; }
    const Transcript& transcript() const noexcept { return transcript_; }
    CostLog& costs() noexcept { return costs_; }
    const CostLog& costs() const noexcept { return costs_; }

    void set_name(const Address& a, std::string name) { names_[a] = std::move(name); }
    std::string name_of(const Address& a) const;

    /// Off-chain actor record.
    std::size_t log(std::string actor, std::string op, std::vector<std::pair<std::string, std::string>> args,
                    std::string result = "ok");

    /// Every chain moves forward by one block.
    void tick();

private:
    std::map<std::uint64_t, std::unique_ptr<Chain>> chains_;
    std::uint64_t multiplexer_;
    ProofSystem proofs_;
    Transcript transcript_;
    CostLog costs_;
    std::map<Address, std::string> names_;
};

} // namespace dact

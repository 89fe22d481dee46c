#pragma once

#include <dact/chain.hpp>

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dact {

// ---------------------------------------------------------------- wallet

struct HeldNote {
    Note note;
    PayloadIntent intent;
    Version version;
    DappGlobalHash g;
    ChainId source;
    Address dapp;
    FieldElement commitment;
    TrustlessPublicCommitment tpc;
    std::uint64_t value = 0;
};

/// Everything a withdraw call needs besides the target chain.
struct SettlementBundle {
    Proof proof;
    Payload payload{};
    FieldElement salt;
    ChainId dest_chain_claim;
    Version version;
};

struct RevertBundle {
    Proof proof;
    Payload payload{};
    FieldElement salt;
    Version version;
    DappGlobalHash g;
};

/// A user. Notes stay inside the wallet; transcript records carry only
/// commitments and public call arguments.
class Wallet {
public:
    Wallet(std::string name, SeededRng rng);

    const std::string& name() const noexcept { return name_; }
    const Address& address() const noexcept { return address_; }

    /// Fresh note, obfuscated intent, deposit through the dApp on `source`.
    FieldElement deposit(Network& net, ChainId source, const Address& dapp, const PayloadIntent& intent,
                         Version version, std::uint64_t value);

    /// Proof against the newest root the destination router knows that
    /// covers the leaf. Throws IndexUnknown (leaf not in the mixer yet),
    /// UnknownRoot (no synced root covers it), SignatureMissing, or
    /// ConstraintViolation.
    SettlementBundle build_settlement(Network& net, const FieldElement& commitment) const;
    SettlementOutcome withdraw(Network& net, const SettlementBundle& bundle, ChainId target) const;

    /// Revert proof against the newest root known on `against`.
    RevertBundle build_revert(Network& net, const FieldElement& commitment, ChainId against) const;
    void revert_mark(Network& net, const FieldElement& commitment) const;
    std::uint64_t revert_initiate(Network& net, const FieldElement& commitment,
                                  std::optional<ChainId> on = std::nullopt) const;
    void revert_execute(Network& net, const FieldElement& commitment, std::optional<ChainId> on = std::nullopt) const;

    /// Mark, initiate, wait out the window (calling `tick` once per block),
    /// execute. Errors propagate; a halted revert surfaces as Halted.
    void revert(Network& net, const FieldElement& commitment, const std::function<void()>& tick) const;

    /// Throws NoteUnknown.
    const HeldNote& note(const FieldElement& commitment) const;
    const std::map<FieldElement, HeldNote>& notes() const noexcept { return notes_; }

private:
    std::uint64_t leaf_index(const Network& net, const HeldNote& h) const;
    FieldElement root_for(const Network& net, ChainId chain, std::uint64_t index, std::uint64_t& prefix) const;

    std::string name_;
    Address address_;
    SeededRng rng_;
    std::map<FieldElement, HeldNote> notes_;
};

// ---------------------------------------------------------------- oracle

struct OraclePolicy {
    enum class Mode { Honest, ForgeRoot, CensorDapp, CensorChain, Replay };

    Mode mode = Mode::Honest;
    FieldElement forged_root{};
    DappGlobalHash censored_dapp{};
    std::uint64_t censored_chain = 0;
    std::uint64_t relay_period = 1;
    std::uint64_t root_push_period = 1;
};

std::string_view oracle_mode_name(OraclePolicy::Mode m) noexcept;

struct OracleActions {
    std::uint64_t relayed = 0;
    std::uint64_t roots_pushed = 0;
    std::uint64_t rejected = 0; // calls the contracts refused
};

/// The oracle network, modeled as one authenticated relayer. It moves
/// Deposit events into the mixer, pushes roots to every router, and also
/// offers to forward withdraw transactions (which is where censorship bites).
class Oracle {
public:
    Oracle(std::string name, OraclePolicy policy);

    const std::string& name() const noexcept { return name_; }
    const Address& address() const noexcept { return address_; }
    const OraclePolicy& policy() const noexcept { return policy_; }
    void set_policy(const OraclePolicy& p) { policy_ = p; }

    bool online() const noexcept { return online_; }
    void go_offline() { online_ = false; }

    /// Scheduler tick: relay and push on their configured periods.
    OracleActions step(Network& net);
    OracleActions relay(Network& net);
    OracleActions push_roots(Network& net);

    /// Throws Censored when the policy drops the submission, Offline when
    /// offline, otherwise whatever the router says.
    SettlementOutcome forward_withdraw(Network& net, const SettlementBundle& bundle, ChainId target,
                                       const Address& on_behalf_of);

private:
    std::string name_;
    Address address_;
    OraclePolicy policy_;
    bool online_ = true;
    std::map<std::uint64_t, std::size_t> cursor_;
    std::vector<Event> relayed_;
};

// ---------------------------------------------------------------- dApp

struct Share {
    FieldElement x;
    FieldElement y;
};

/// Shamir k-of-n over the scalar field; x coordinates are 1..n.
std::vector<Share> shamir_split(const FieldElement& secret, unsigned n, unsigned k, SeededRng& rng);
/// Lagrange interpolation at zero over exactly the given shares.
FieldElement shamir_combine(std::span<const Share> shares);

struct SignerScheme {
    enum class Kind { Single, Threshold };

    Kind kind = Kind::Single;
    unsigned n = 1;
    unsigned k = 1;
    unsigned participating = 1; // share holders currently reachable
};

struct ResiliencePolicy {
    std::uint64_t max_reverts_per_period = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t period = 100;
    std::uint64_t max_value_per_revert = std::numeric_limits<std::uint64_t>::max();
};

/// A dApp operator: owner account, one contract address shared by all its
/// chains, a signing key (single or threshold), a leaf signer, and the revert
/// watcher.
class DappNode {
public:
    DappNode(std::string name, SeededRng rng, SignerScheme scheme, ResiliencePolicy resilience = {});

    const std::string& name() const noexcept { return name_; }
    const Address& owner() const noexcept { return owner_; }
    const Address& contract() const noexcept { return contract_; }
    const std::vector<Address>& companions() const noexcept { return companions_; }
    const VerifyingKey& verifying_key() const noexcept { return vk_; }
    DappGlobalHash global_hash() const { return dapp_global_hash(contract_, companions_); }
    const std::vector<ChainId>& chains() const noexcept { return chains_; }

    bool online() const noexcept { return online_; }
    void go_offline() { online_ = false; }
    void set_participating(unsigned p) { scheme_.participating = p; }
    const SignerScheme& scheme() const noexcept { return scheme_; }

    /// Genesis: deploy the contract on each chain (no registration).
    void deploy(Network& net, std::span<const ChainId> chains);
    /// Register on every deployed chain.
    void register_all(Network& net);
    DappGlobalHash register_on(Network& net, ChainId chain);

    /// Throws ThresholdUnmet if fewer than k share holders participate.
    Signature sign(ByteView message) const;

    /// Returns signatures stored this call.
    std::uint64_t scan_and_sign(Network& net);
    /// Returns halts issued this call.
    std::uint64_t watch_reverts(Network& net);

private:
    struct Known {
        FieldElement commitment;
        TrustlessPublicCommitment tpc;
        ChainId source;
    };

    bool should_halt(const Network& net, const Chain& source, const RevertEventData& ev);

    std::string name_;
    Address owner_;
    Address contract_;
    std::vector<Address> companions_;
    SignerScheme scheme_;
    ResiliencePolicy resilience_;
    VerifyingKey vk_;
    std::optional<KeyPair> single_;
    std::vector<Share> shares_;
    bool online_ = true;

    std::vector<ChainId> chains_;
    std::map<FieldElement, Known> recognized_; // by leaf value
    std::map<std::uint64_t, std::size_t> deposit_cursor_;
    std::map<std::uint64_t, std::size_t> revert_cursor_;
    std::uint64_t mixer_cursor_ = 0;
    std::vector<std::uint64_t> allowed_revert_heights_;
};

} // namespace dact

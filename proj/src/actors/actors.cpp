#include <dact/actors.hpp>
#include <dact/commitment.hpp>
#include <dact/error.hpp>

#include <algorithm>

namespace dact {

namespace {

template <class F>
auto logged(Network& net, const std::string& actor, std::string op,
            std::vector<std::pair<std::string, std::string>> args, F&& body)
{
    auto pos = net.log(actor, std::move(op), std::move(args), "");
    try {
        auto out = body();
        net.transcript().set_result(pos, "ok");
        return out;
    } catch (const ProtocolError& e) {
        net.transcript().set_result(pos, e.what());
        throw;
    }
}

std::array<std::uint8_t, 32> seed_bytes(const FieldElement& s) { return s.to_bytes(); }

} // namespace

// ---------------------------------------------------------------- wallet

Wallet::Wallet(std::string name, SeededRng rng)
    : name_(std::move(name)), address_(Address::from_label("wallet/" + name_)), rng_(std::move(rng))
{
}

const HeldNote& Wallet::note(const FieldElement& commitment) const
{
    auto it = notes_.find(commitment);
    if (it == notes_.end()) fail(Errc::NoteUnknown, commitment.to_hex());
    return it->second;
}

FieldElement Wallet::deposit(Network& net, ChainId source, const Address& dapp, const PayloadIntent& intent,
                             Version version, std::uint64_t value)
{
    auto& chain = net.chain(source);
    auto g = chain.router().hash_of_dapp.find(dapp);
    if (g == chain.router().hash_of_dapp.end()) fail(Errc::UnknownDapp, "dApp not registered on source");

    auto n = note_new(rng_);
    auto c = commit(n.secret, n.nullifier);
    auto ev = chain.deposit(address_, dapp, c, obfuscate(intent, n.salt), version, value);
    auto tpc = decode_deposit_event(ev.payload).tpc;
    notes_.insert_or_assign(c, HeldNote{n, intent, version, g->second, source, dapp, c, tpc, value});
    return c;
}

std::uint64_t Wallet::leaf_index(const Network& net, const HeldNote& h) const
{
    auto leaf = make_leaf(h.commitment, h.tpc, h.source);
    auto index = net.multiplexer().mixer().index_of(leaf.value);
    if (!index) fail(Errc::IndexUnknown, "leaf not inserted yet");
    return *index;
}

FieldElement Wallet::root_for(const Network& net, ChainId chain, std::uint64_t index, std::uint64_t& prefix) const
{
    const auto& roots = net.chain(chain).router().known_roots;
    const auto& tree = net.multiplexer().mixer().tree;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
        auto size = tree.size_at_root(*it);
        if (size && *size > index) {
            prefix = *size;
            return *it;
        }
    }
    fail(Errc::UnknownRoot, "no synced root covers the leaf");
}

SettlementBundle Wallet::build_settlement(Network& net, const FieldElement& commitment) const
{
    return logged(net, name_, "wallet_build_settlement", {{"commitment", commitment.to_hex()}}, [&] {
        const auto& h = note(commitment);
        auto index = leaf_index(net, h);
        std::uint64_t prefix = 0;
        auto root = root_for(net, h.intent.dest_chain, index, prefix);

        const auto& dest = net.chain(h.intent.dest_chain).router();
        auto key = dest.key_of_hash.find(h.g);
        if (key == dest.key_of_hash.end()) fail(Errc::UnknownDapp, "dApp not registered on destination");
        const auto& mixer = net.multiplexer().mixer();
        auto sig = mixer.signature(index, key->second);
        if (!sig) fail(Errc::SignatureMissing);

        SettlementWitness w{h.note.nullifier, h.note.secret, mixer.tree.path(index, prefix), h.source, *sig};
        SettlementPublic p{nullifier_hash(h.note.nullifier), root, h.tpc, key->second};
        OpScope scope;
        auto proof = net.proofs().prove(w, p);
        net.costs().prove_constraints.push_back(scope.delta().constraints);
        return SettlementBundle{proof, h.intent.payload, h.note.salt, h.intent.dest_chain, h.version};
    });
}

namespace {

// Destination-side calls come from a one-time address so the destination
// sender does not repeat the depositor's address.
Address one_time_address(const std::string& wallet, const FieldElement& tag)
{
    return Address::from_label("onetime/" + wallet + "/" + tag.to_hex());
}

} // namespace

SettlementOutcome Wallet::withdraw(Network& net, const SettlementBundle& b, ChainId target) const
{
    auto sender = one_time_address(name_, FieldElement::from_bytes_reduce(b.proof.attestation));
    net.set_name(sender, "user");
    return net.chain(target).withdraw(sender, b.proof, b.payload, b.salt, b.dest_chain_claim, b.version);
}

RevertBundle Wallet::build_revert(Network& net, const FieldElement& commitment, ChainId against) const
{
    return logged(net, name_, "wallet_build_revert", {{"commitment", commitment.to_hex()}}, [&] {
        const auto& h = note(commitment);
        auto index = leaf_index(net, h);
        std::uint64_t prefix = 0;
        auto root = root_for(net, against, index, prefix);
        const auto& tree = net.multiplexer().mixer().tree;

        RevertWitness w{h.note.nullifier, h.note.secret, tree.path(index, prefix)};
        RevertPublic p{h.commitment, h.source, nullifier_hash(h.note.nullifier), root, h.tpc};
        OpScope scope;
        auto proof = net.proofs().prove(w, p);
        net.costs().prove_constraints.push_back(scope.delta().constraints);
        return RevertBundle{proof, h.intent.payload, h.note.salt, h.version, h.g};
    });
}

void Wallet::revert_mark(Network& net, const FieldElement& commitment) const
{
    const auto& h = note(commitment);
    auto b = build_revert(net, commitment, h.intent.dest_chain);
    auto sender = one_time_address(name_, FieldElement::from_bytes_reduce(b.proof.attestation));
    net.set_name(sender, "user");
    net.chain(h.intent.dest_chain).revert_mark(sender, b.proof, b.payload, b.salt, b.version, b.g);
}

std::uint64_t Wallet::revert_initiate(Network& net, const FieldElement& commitment, std::optional<ChainId> on) const
{
    auto chain = on.value_or(note(commitment).source);
    auto b = build_revert(net, commitment, chain);
    return net.chain(chain).revert_initiate(address_, b.proof);
}

void Wallet::revert_execute(Network& net, const FieldElement& commitment, std::optional<ChainId> on) const
{
    const auto& h = note(commitment);
    net.chain(on.value_or(h.source)).revert_execute(address_, nullifier_hash(h.note.nullifier));
}

void Wallet::revert(Network& net, const FieldElement& commitment, const std::function<void()>& tick) const
{
    const auto& h = note(commitment);
    revert_mark(net, commitment);
    auto end = revert_initiate(net, commitment);
    while (net.chain(h.source).height() < end) tick();
    revert_execute(net, commitment);
}

// ---------------------------------------------------------------- oracle

std::string_view oracle_mode_name(OraclePolicy::Mode m) noexcept
{
    switch (m) {
    case OraclePolicy::Mode::Honest: return "honest";
    case OraclePolicy::Mode::ForgeRoot: return "forge_root";
    case OraclePolicy::Mode::CensorDapp: return "censor_dapp";
    case OraclePolicy::Mode::CensorChain: return "censor_chain";
    case OraclePolicy::Mode::Replay: return "replay";
    }
    return "unknown";
}

Oracle::Oracle(std::string name, OraclePolicy policy)
    : name_(std::move(name)), address_(Address::from_label("oracle/" + name_)), policy_(policy)
{
}

OracleActions Oracle::step(Network& net)
{
    OracleActions out;
    if (!online_) return out;
    auto h = net.multiplexer().height();
    if (policy_.relay_period && h % policy_.relay_period == 0) out = relay(net);
    if (policy_.root_push_period && h % policy_.root_push_period == 0) out.roots_pushed = push_roots(net).roots_pushed;
    return out;
}

OracleActions Oracle::relay(Network& net)
{
    if (!online_) fail(Errc::Offline, name_);
    OracleActions out;
    auto& mux = net.multiplexer();
    for (auto id : net.chain_ids()) {
        const auto& events = net.chain(id).events();
        auto& cur = cursor_[id.value()];
        for (; cur < events.size(); ++cur) {
            if (events[cur].kind != EventKind::Deposit) continue;
            try {
                mux.mixer_submit(address_, events[cur]);
                ++out.relayed;
            } catch (const ProtocolError&) {
                ++out.rejected;
            }
            relayed_.push_back(events[cur]);
        }
    }
    if (policy_.mode == OraclePolicy::Mode::Replay && out.relayed > 0) {
        try {
            mux.mixer_submit(address_, relayed_.front());
        } catch (const ProtocolError&) {
            ++out.rejected;
        }
    }
    return out;
}

OracleActions Oracle::push_roots(Network& net)
{
    if (!online_) fail(Errc::Offline, name_);
    OracleActions out;
    auto root = policy_.mode == OraclePolicy::Mode::ForgeRoot ? policy_.forged_root
                                                              : net.multiplexer().mixer().tree.root();
    for (auto id : net.chain_ids()) {
        auto& chain = net.chain(id);
        const auto& known = chain.router().known_roots;
        if (!known.empty() && known.back() == root) continue;
        try {
            chain.update_root(address_, root);
            ++out.roots_pushed;
        } catch (const ProtocolError&) {
            ++out.rejected;
        }
    }
    return out;
}

SettlementOutcome Oracle::forward_withdraw(Network& net, const SettlementBundle& b, ChainId target,
                                           const Address& on_behalf_of)
{
    bool drop = false;
    if (policy_.mode == OraclePolicy::Mode::CensorChain) drop = target.value() == policy_.censored_chain;
    if (policy_.mode == OraclePolicy::Mode::CensorDapp && b.proof.circuit == CircuitId::Settlement) {
        auto pub = decode_settlement_public(b.proof.public_signals);
        const auto& keys = net.chain(target).router().hash_of_key;
        auto g = keys.find(pub.dapp_key);
        drop = g != keys.end() && g->second == policy_.censored_dapp;
    }
    return logged(net, name_, "forward_withdraw",
                  {{"target", std::to_string(target.value())}, {"for", net.name_of(on_behalf_of)}}, [&] {
        if (!online_) fail(Errc::Offline, name_);
        if (drop) fail(Errc::Censored);
        return net.chain(target).withdraw(address_, b.proof, b.payload, b.salt, b.dest_chain_claim, b.version);
    });
}

// ---------------------------------------------------------------- dApp

std::vector<Share> shamir_split(const FieldElement& secret, unsigned n, unsigned k, SeededRng& rng)
{
    if (k == 0 || k > n) fail(Errc::PreconditionViolated, "need 1 <= k <= n");
    std::vector<FieldElement> coeffs{secret};
    for (unsigned i = 1; i < k; ++i) coeffs.push_back(random_field_31(rng));
    std::vector<Share> out;
    for (unsigned x = 1; x <= n; ++x) {
        auto fx = FieldElement::from_u64(x);
        FieldElement y;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * fx + *it;
        out.push_back({fx, y});
    }
    return out;
}

FieldElement shamir_combine(std::span<const Share> shares)
{
    FieldElement acc;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        auto num = FieldElement::from_u64(1);
        auto den = FieldElement::from_u64(1);
        for (std::size_t j = 0; j < shares.size(); ++j) {
            if (i == j) continue;
            num *= shares[j].x;
            den *= shares[j].x - shares[i].x;
        }
        acc += shares[i].y * num * den.inverse();
    }
    return acc;
}

DappNode::DappNode(std::string name, SeededRng rng, SignerScheme scheme, ResiliencePolicy resilience)
    : name_(std::move(name)),
      owner_(Address::from_label("dapp-owner/" + name_)),
      contract_(Address::from_label("dapp/" + name_)),
      companions_{Address::from_label("dapp/" + name_ + "/treasury")},
      scheme_(scheme),
      resilience_(resilience)
{
    if (scheme.kind == SignerScheme::Kind::Single) scheme_.n = scheme_.k = 1;
    if (scheme_.k == 0 || scheme_.k > scheme_.n || scheme_.n > 255)
        fail(Errc::ConfigInvalid, "threshold needs 1 <= k <= n <= 255");

    auto secret = random_field_31(rng);
    auto kp = KeyPair::from_seed(seed_bytes(secret));
    vk_ = kp.verifying_key();
    if (scheme_.kind == SignerScheme::Kind::Single)
        single_ = kp;
    else
        shares_ = shamir_split(secret, scheme_.n, scheme_.k, rng);
}

Signature DappNode::sign(ByteView message) const
{
    if (single_) return single_->sign(message);
    if (scheme_.participating < scheme_.k)
        fail(Errc::ThresholdUnmet,
             std::to_string(scheme_.participating) + " of " + std::to_string(scheme_.k) + " shares");
    auto present = std::min<std::size_t>(scheme_.participating, shares_.size());
    std::span<const Share> quorum(shares_.data(), std::min<std::size_t>(present, scheme_.k));
    auto kp = KeyPair::from_seed(seed_bytes(shamir_combine(quorum)));
    if (kp.verifying_key() != vk_) fail(Errc::ThresholdUnmet, "shares do not reconstruct the key");
    return kp.sign(message);
}

void DappNode::deploy(Network& net, std::span<const ChainId> chains)
{
    net.set_name(owner_, name_);
    net.set_name(contract_, name_ + ".contract");
    for (auto id : chains) {
        net.chain(id).deploy_dapp(contract_, owner_);
        chains_.push_back(id);
    }
}

DappGlobalHash DappNode::register_on(Network& net, ChainId chain)
{
    auto g = global_hash();
    auto pop = sign(Chain::registration_message(chain, g, contract_));
    return net.chain(chain).register_dapp(owner_, contract_, companions_, vk_, pop);
}

void DappNode::register_all(Network& net)
{
    for (auto id : chains_) register_on(net, id);
}

std::uint64_t DappNode::scan_and_sign(Network& net)
{
    if (!online_) fail(Errc::Offline, name_);
    for (auto id : chains_) {
        const auto& events = net.chain(id).events();
        auto& cur = deposit_cursor_[id.value()];
        for (; cur < events.size(); ++cur) {
            const auto& ev = events[cur];
            if (ev.kind != EventKind::Deposit || ev.origin != contract_) continue;
            auto d = decode_deposit_event(ev.payload);
            recognized_.insert_or_assign(make_leaf(d.commitment, d.tpc, d.source_chain).value,
                                         Known{d.commitment, d.tpc, d.source_chain});
        }
    }

    auto& mux = net.multiplexer();
    const auto& mixer = mux.mixer();
    std::vector<std::uint64_t> todo;
    for (auto i = mixer_cursor_; i < mixer.tree.size(); ++i)
        if (recognized_.count(mixer.leaves[i].value) && !mixer.signature(i, vk_)) todo.push_back(i);
    if (!todo.empty() && !single_ && scheme_.participating < scheme_.k)
        fail(Errc::ThresholdUnmet,
             std::to_string(scheme_.participating) + " of " + std::to_string(scheme_.k) + " shares");

    std::uint64_t stored = 0;
    for (auto i : todo) {
        try {
            mux.mixer_store_signature(owner_, i, vk_, sign(mixer.leaves[i].canonical_bytes()));
            ++stored;
        } catch (const ProtocolError&) {
        }
    }
    mixer_cursor_ = mixer.tree.size();
    return stored;
}

bool DappNode::should_halt(const Network& net, const Chain& source, const RevertEventData& ev)
{
    bool reverted = false;
    bool spent_only = false;
    for (auto id : net.chain_ids()) {
        const auto& r = net.chain(id).router();
        if (r.nullifier_reverted.count(ev.nullifier_hash))
            reverted = true;
        else if (r.nullifier_spent.count(ev.nullifier_hash))
            spent_only = true;
    }
    if (!reverted || spent_only) return true;

    auto h = source.height();
    auto recent = std::count_if(allowed_revert_heights_.begin(), allowed_revert_heights_.end(),
                                [&](auto at) { return at + resilience_.period > h; });
    if (static_cast<std::uint64_t>(recent) >= resilience_.max_reverts_per_period) return true;

    const auto* contract = source.dapp(contract_);
    if (contract) {
        auto esc = contract->escrow.find(ev.commitment);
        if (esc != contract->escrow.end() && esc->second.amount > resilience_.max_value_per_revert) return true;
    }
    return false;
}

std::uint64_t DappNode::watch_reverts(Network& net)
{
    if (!online_) fail(Errc::Offline, name_);
    std::uint64_t halts = 0;
    for (auto id : chains_) {
        auto& chain = net.chain(id);
        const auto& events = chain.events();
        auto& cur = revert_cursor_[id.value()];
        for (; cur < events.size(); ++cur) {
            if (events[cur].kind != EventKind::RevertInitiated || events[cur].origin != contract_) continue;
            auto ev = decode_revert_event(events[cur].payload);
            if (!should_halt(net, chain, ev)) {
                allowed_revert_heights_.push_back(chain.height());
                continue;
            }
            try {
                chain.revert_halt(owner_, ev.nullifier_hash);
                ++halts;
            } catch (const ProtocolError&) {
            }
        }
    }
    return halts;
}

} // namespace dact

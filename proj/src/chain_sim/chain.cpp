#include <dact/chain.hpp>
#include <dact/error.hpp>

#include <algorithm>
#include <type_traits>

namespace dact {

std::string_view event_name(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::DappRegistered: return "DappRegistered";
    case EventKind::Deposit: return "Deposit";
    case EventKind::RootUpdated: return "RootUpdated";
    case EventKind::LeafInserted: return "LeafInserted";
    case EventKind::SignatureStored: return "SignatureStored";
    case EventKind::Settled: return "Settled";
    case EventKind::RevertMarked: return "RevertMarked";
    case EventKind::RevertInitiated: return "RevertInitiated";
    case EventKind::RevertHalted: return "RevertHalted";
    case EventKind::RevertExecuted: return "RevertExecuted";
    }
    return "Unknown";
}

namespace {

std::uint64_t read_u64_word(ByteView word)
{
    if (std::any_of(word.begin(), word.begin() + 24, [](auto b) { return b != 0; }))
        fail(Errc::MalformedDeposit, "word overflows 64 bits");
    std::uint64_t v = 0;
    for (std::size_t i = 24; i < 32; ++i) v = v << 8 | word[i];
    return v;
}

FieldElement read_field(ByteView bytes)
{
    auto f = FieldElement::from_canonical(bytes);
    if (!f) fail(Errc::MalformedDeposit, "non-canonical field element");
    return *f;
}

std::string dec(std::uint64_t v) { return std::to_string(v); }

const Address& mixer_address()
{
    static const Address a = Address::from_label("dact.mixer");
    return a;
}

} // namespace

Bytes encode_deposit_event(const DepositEventData& d)
{
    Bytes out;
    out.reserve(kDepositEventSize);
    append(out, d.commitment.to_bytes());
    append(out, d.tpc.value.to_bytes());
    append(out, d.source_chain.word());
    return out;
}

DepositEventData decode_deposit_event(ByteView p)
{
    if (p.size() != kDepositEventSize) fail(Errc::MalformedDeposit, "deposit event size");
    auto tpc_word = p.subspan(32, 32);
    if (std::any_of(tpc_word.begin(), tpc_word.begin() + 22, [](auto b) { return b != 0; }) || tpc_word[22] > 1)
        fail(Errc::MalformedDeposit, "tpc wider than 73 bits");
    auto src = read_u64_word(p.subspan(64, 32));
    if (!is_valid_chain_id(src)) fail(Errc::MalformedDeposit, "source chain out of tier");
    return {read_field(p.subspan(0, 32)), {read_field(tpc_word)}, ChainId(src)};
}

Bytes encode_revert_event(const RevertEventData& d)
{
    Bytes out;
    append(out, d.nullifier_hash.to_bytes());
    append(out, d.commitment.to_bytes());
    append(out, be_word(d.window_end));
    append(out, d.dapp.bytes);
    return out;
}

RevertEventData decode_revert_event(ByteView p)
{
    if (p.size() != 116) fail(Errc::MalformedDeposit, "revert event size");
    RevertEventData d;
    d.nullifier_hash = read_field(p.subspan(0, 32));
    d.commitment = read_field(p.subspan(32, 32));
    d.window_end = read_u64_word(p.subspan(64, 32));
    std::copy_n(p.begin() + 96, 20, d.dapp.bytes.begin());
    return d;
}

bool RouterState::is_known_root(const FieldElement& root) const
{
    return std::find(known_roots.begin(), known_roots.end(), root) != known_roots.end();
}

std::optional<Signature> MixerState::signature(std::uint64_t index, const VerifyingKey& key) const
{
    auto it = leaf_signatures.find(index);
    if (it == leaf_signatures.end()) return std::nullopt;
    auto s = it->second.find(key);
    if (s == it->second.end()) return std::nullopt;
    return s->second;
}

std::optional<std::uint64_t> MixerState::index_of(const FieldElement& leaf_value) const
{
    const auto& ls = tree.leaves();
    auto it = std::find(ls.begin(), ls.end(), leaf_value);
    if (it == ls.end()) return std::nullopt;
    return static_cast<std::uint64_t>(it - ls.begin());
}

Chain::Chain(const ChainConfig& cfg, Network& net) : cfg_(cfg), net_(net)
{
    if (cfg.multiplexer) mixer_ = std::make_unique<MixerState>(cfg.merkle_depth);
}

const MixerState& Chain::mixer() const
{
    if (!mixer_) fail(Errc::PreconditionViolated, "no mixer on chain " + dec(cfg_.id.value()));
    return *mixer_;
}

MixerState& Chain::mixer_mut()
{
    if (!mixer_) fail(Errc::PreconditionViolated, "no mixer on chain " + dec(cfg_.id.value()));
    return *mixer_;
}

const DappContract* Chain::dapp(const Address& address) const
{
    auto it = dapps_.find(address);
    return it == dapps_.end() ? nullptr : &it->second;
}

DappContract& Chain::dapp_mut(const Address& address)
{
    auto it = dapps_.find(address);
    if (it == dapps_.end()) fail(Errc::UnknownDapp, "no dApp contract at " + address.to_hex());
    return it->second;
}

std::uint64_t Chain::balance(const Address& who) const
{
    auto it = balances_.find(who);
    return it == balances_.end() ? 0 : it->second;
}

void Chain::add_oracle(const Address& oracle) { router_.oracles.insert(oracle); }

void Chain::deploy_dapp(const Address& dapp, const Address& owner)
{
    if (dapps_.count(dapp)) fail(Errc::PreconditionViolated, "address already deployed");
    dapps_[dapp] = DappContract{dapp, owner, {}, {}, {}};
}

void Chain::fund(const Address& who, std::uint64_t amount) { balances_[who] += amount; }

template <class F>
auto Chain::call(const Address& sender, std::string op, std::vector<std::pair<std::string, std::string>> args,
                 F&& body)
{
    auto& t = net_.transcript();
    auto pos = t.add(Record{0, cfg_.id.value(), height_, net_.name_of(sender), std::move(op), std::move(args), ""});
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            t.set_result(pos, "ok");
        } else {
            auto out = body();
            t.set_result(pos, "ok");
            return out;
        }
    } catch (const ProtocolError& e) {
        t.set_result(pos, e.what());
        throw;
    }
}

void Chain::emit(EventKind kind, Bytes payload, const Address& origin)
{
    net_.transcript().add(Record{0, cfg_.id.value(), height_, "contract", "event:" + std::string(event_name(kind)),
                                 {{"origin", origin.to_hex()}, {"payload", to_hex(payload)}}, "ok"});
    events_.push_back(Event{kind, std::move(payload), cfg_.id, height_, origin});
}

Bytes Chain::registration_message(ChainId chain, const DappGlobalHash& g, const Address& dapp)
{
    Bytes m;
    append(m, as_bytes("dact.register"));
    append(m, chain.word());
    append(m, g.digest.bytes);
    append(m, dapp.bytes);
    return m;
}

DappGlobalHash Chain::register_dapp(const Address& sender, const Address& dapp, std::span<const Address> others,
                                    const VerifyingKey& key, const Signature& pop)
{
    std::string list;
    for (const auto& a : others) list += (list.empty() ? "" : ",") + a.to_hex();
    return call(sender, "router_register_dapp",
                {{"dapp", dapp.to_hex()}, {"others", list}, {"key", to_hex(key.bytes)}}, [&] {
        auto d = dapps_.find(dapp);
        if (d == dapps_.end()) fail(Errc::Unauthorized, "caller is not a dApp contract");
        if (d->second.owner != sender) fail(Errc::Unauthorized, "sender is not the dApp owner");
        auto g = dapp_global_hash(dapp, others);
        if (router_.dapp_registry.count(g)) fail(Errc::AlreadyRegistered, "global hash");
        if (router_.hash_of_dapp.count(dapp)) fail(Errc::AlreadyRegistered, "dApp address");
        if (router_.hash_of_key.count(key)) fail(Errc::AlreadyRegistered, "verifying key");
        if (!verify(key, registration_message(cfg_.id, g, dapp), pop))
            fail(Errc::Unauthorized, "no proof of key possession");

        router_.dapp_registry[g] = dapp;
        router_.hash_of_dapp[dapp] = g;
        router_.hash_of_key[key] = g;
        router_.key_of_hash[g] = key;
        Bytes payload;
        append(payload, g.digest.bytes);
        append(payload, dapp.bytes);
        append(payload, key.bytes);
        emit(EventKind::DappRegistered, std::move(payload), dapp);
        return g;
    });
}

Event Chain::deposit(const Address& sender, const Address& dapp, const FieldElement& commitment,
                     const ByteHash32& obfuscated_data, Version version, std::uint64_t value)
{
    // The dApp forwards the request to the Router in its wire form.
    auto wire = serialize_deposit(DepositRequest{commitment, obfuscated_data, version, dapp});
    return call(sender, "router_deposit", {{"request", to_hex(wire)}, {"value", dec(value)}}, [&] {
        auto req = parse_deposit(wire);
        auto& contract = dapp_mut(req.dapp_address);
        if (balance(sender) < value) fail(Errc::PreconditionViolated, "insufficient balance");
        auto g = router_.hash_of_dapp.find(req.dapp_address);
        if (g == router_.hash_of_dapp.end()) fail(Errc::UnknownDapp, "dApp not registered");
        if (router_.commitment_log.count(req.commitment) || contract.escrow.count(req.commitment))
            fail(Errc::DuplicateCommitment);

        auto tpc = trustless_public_commitment(g->second, req.version, req.obfuscated_data);
        balances_[sender] -= value;
        contract.escrow[req.commitment] = {sender, value};
        router_.commitment_log[req.commitment] = {tpc, req.dapp_address};
        emit(EventKind::Deposit, encode_deposit_event({req.commitment, tpc, cfg_.id}), req.dapp_address);
        return events_.back();
    });
}

void Chain::update_root(const Address& sender, const FieldElement& root)
{
    call(sender, "router_update_root", {{"root", root.to_hex()}}, [&] {
        if (!router_.oracles.count(sender)) fail(Errc::Unauthorized, "not an oracle");
        if (!router_.known_roots.empty() && router_.known_roots.back() == root) return;
        router_.known_roots.push_back(root);
        while (router_.known_roots.size() > kRouterRootWindow) router_.known_roots.pop_front();
        Bytes payload;
        append(payload, root.to_bytes());
        emit(EventKind::RootUpdated, std::move(payload), sender);
    });
}

SettlementOutcome Chain::withdraw(const Address& sender, const Proof& proof, const Payload& payload,
                                  const FieldElement& salt, ChainId dest_chain_claim, Version version)
{
    return call(sender, "router_withdraw",
                {{"proof", to_hex(proof.serialize())},
                 {"payload", to_hex(payload)},
                 {"salt", salt.to_hex()},
                 {"dest_chain_claim", dec(dest_chain_claim.value())},
                 {"version", dec(version.value())}},
                [&] {
        if (proof.circuit != CircuitId::Settlement) fail(Errc::InvalidProof, "not a settlement proof");
        auto pub = decode_settlement_public(proof.public_signals);
        if (router_.nullifier_spent.count(pub.nullifier_hash)) fail(Errc::DoubleSpend);
        if (!router_.is_known_root(pub.merkle_root)) fail(Errc::UnknownRoot);
        auto g = router_.hash_of_key.find(pub.dapp_key);
        if (g == router_.hash_of_key.end()) fail(Errc::UnknownDapp, "verifying key not registered");
        auto od = obfuscate(PayloadIntent{payload, dest_chain_claim}, salt);
        if (trustless_public_commitment(g->second, version, od) != pub.tpc) fail(Errc::TpcMismatch);
        if (dest_chain_claim != cfg_.id) fail(Errc::WrongChain);

        OpScope scope;
        bool ok = net_.proofs().verify(CircuitId::Settlement, proof);
        net_.costs().verify.push_back(scope.delta());
        if (!ok) fail(Errc::InvalidProof);

        auto addr = router_.dapp_registry.find(g->second);
        if (addr == router_.dapp_registry.end()) fail(Errc::UnknownDapp);
        auto& contract = dapp_mut(addr->second);

        router_.nullifier_spent.insert(pub.nullifier_hash);
        contract.delivered.push_back(payload);
        Bytes ev;
        append(ev, pub.nullifier_hash.to_bytes());
        emit(EventKind::Settled, std::move(ev), addr->second);
        return SettlementOutcome{pub.nullifier_hash, addr->second, payload};
    });
}

void Chain::revert_mark(const Address& sender, const Proof& proof, const Payload& payload, const FieldElement& salt,
                        Version version, const DappGlobalHash& g)
{
    call(sender, "router_revert_mark",
         {{"proof", to_hex(proof.serialize())},
          {"payload", to_hex(payload)},
          {"salt", salt.to_hex()},
          {"version", dec(version.value())},
          {"dapp_hash", g.to_hex()}},
         [&] {
        if (proof.circuit != CircuitId::Revert) fail(Errc::InvalidProof, "not a revert proof");
        auto pub = decode_revert_public(proof.public_signals);
        if (router_.nullifier_spent.count(pub.nullifier_hash)) fail(Errc::DoubleSpend);
        if (!router_.is_known_root(pub.merkle_root)) fail(Errc::UnknownRoot);
        auto addr = router_.dapp_registry.find(g);
        if (addr == router_.dapp_registry.end()) fail(Errc::UnknownDapp);
        auto od = obfuscate(PayloadIntent{payload, cfg_.id}, salt);
        if (trustless_public_commitment(g, version, od) != pub.tpc) fail(Errc::TpcMismatch);

        OpScope scope;
        bool ok = net_.proofs().verify(CircuitId::Revert, proof);
        net_.costs().verify.push_back(scope.delta());
        if (!ok) fail(Errc::InvalidProof);

        router_.nullifier_spent.insert(pub.nullifier_hash);
        router_.nullifier_reverted.insert(pub.nullifier_hash);
        Bytes ev;
        append(ev, pub.nullifier_hash.to_bytes());
        emit(EventKind::RevertMarked, std::move(ev), addr->second);
    });
}

std::uint64_t Chain::revert_initiate(const Address& sender, const Proof& proof)
{
    return call(sender, "router_revert_initiate", {{"proof", to_hex(proof.serialize())}}, [&] {
        if (proof.circuit != CircuitId::Revert) fail(Errc::InvalidProof, "not a revert proof");
        auto pub = decode_revert_public(proof.public_signals);
        if (pub.source_chain != cfg_.id) fail(Errc::WrongChain);
        if (!router_.is_known_root(pub.merkle_root)) fail(Errc::UnknownRoot);

        OpScope scope;
        bool ok = net_.proofs().verify(CircuitId::Revert, proof);
        net_.costs().verify.push_back(scope.delta());
        if (!ok) fail(Errc::InvalidProof);

        auto logged = router_.commitment_log.find(pub.commitment);
        if (logged == router_.commitment_log.end()) fail(Errc::UnknownCommitment);
        if (logged->second.tpc != pub.tpc) fail(Errc::TpcMismatch);
        auto last = router_.last_revert_attempt.find(pub.commitment);
        if (last != router_.last_revert_attempt.end() && height_ < last->second + cfg_.revert.cool_down)
            fail(Errc::CoolDownActive);
        auto pending = router_.pending_reverts.find(pub.nullifier_hash);
        if (pending != router_.pending_reverts.end() && !pending->second.halted) fail(Errc::AlreadyPending);

        auto window_end = height_ + cfg_.revert.window;
        router_.pending_reverts[pub.nullifier_hash] = {pub.commitment, logged->second.dapp, window_end, false};
        router_.last_revert_attempt[pub.commitment] = height_;
        router_.fees_collected += cfg_.revert.fee;
        router_.fees_paid[sender] += cfg_.revert.fee;
        emit(EventKind::RevertInitiated,
             encode_revert_event({pub.nullifier_hash, pub.commitment, window_end, logged->second.dapp}),
             logged->second.dapp);
        return window_end;
    });
}

void Chain::revert_halt(const Address& sender, const FieldElement& nullifier_hash)
{
    call(sender, "router_revert_halt", {{"nullifier_hash", nullifier_hash.to_hex()}}, [&] {
        auto it = router_.pending_reverts.find(nullifier_hash);
        if (it == router_.pending_reverts.end()) fail(Errc::NoPending);
        auto& p = it->second;
        const auto* contract = dapp(p.dapp);
        if (sender != p.dapp && !(contract && contract->owner == sender)) fail(Errc::Unauthorized);
        if (height_ >= p.window_end) fail(Errc::WindowExpired);
        if (p.halted) fail(Errc::Halted);
        p.halted = true;
        Bytes ev;
        append(ev, nullifier_hash.to_bytes());
        emit(EventKind::RevertHalted, std::move(ev), p.dapp);
    });
}

void Chain::revert_execute(const Address& sender, const FieldElement& nullifier_hash)
{
    call(sender, "router_revert_execute", {{"nullifier_hash", nullifier_hash.to_hex()}}, [&] {
        auto it = router_.pending_reverts.find(nullifier_hash);
        if (it == router_.pending_reverts.end()) fail(Errc::NoPending);
        auto p = it->second;
        if (p.halted) fail(Errc::Halted);
        if (height_ < p.window_end) fail(Errc::WindowActive);

        // The dApp's revert hook: hand the escrowed value back.
        auto& contract = dapp_mut(p.dapp);
        auto esc = contract.escrow.find(p.commitment);
        if (esc != contract.escrow.end()) {
            balances_[esc->second.depositor] += esc->second.amount;
            contract.escrow.erase(esc);
        }
        contract.refunded.push_back(p.commitment);
        router_.pending_reverts.erase(it);
        router_.commitment_log.erase(p.commitment);
        Bytes ev;
        append(ev, nullifier_hash.to_bytes());
        emit(EventKind::RevertExecuted, std::move(ev), p.dapp);
    });
}

std::uint64_t Chain::mixer_submit(const Address& sender, const Event& deposit_event)
{
    return call(sender, "mixer_submit",
                {{"event_chain", dec(deposit_event.emitting_chain.value())},
                 {"event", to_hex(deposit_event.payload)}},
                [&] {
        auto& m = mixer_mut();
        if (!router_.oracles.count(sender)) fail(Errc::Unauthorized, "not an oracle");
        if (deposit_event.kind != EventKind::Deposit) fail(Errc::PreconditionViolated, "not a Deposit event");
        auto d = decode_deposit_event(deposit_event.payload);
        if (m.commitments_seen.count(d.commitment)) fail(Errc::DuplicateCommitment);
        if (m.tree.size() == m.tree.capacity()) fail(Errc::TreeFull);

        auto leaf = make_leaf(d.commitment, d.tpc, d.source_chain);
        OpScope scope;
        auto index = m.tree.insert(leaf.value);
        net_.costs().insert_mimc.push_back(scope.delta().mimc);
        m.commitments_seen.insert(d.commitment);
        m.leaves.push_back(leaf);

        Bytes ev;
        append(ev, be_word(index));
        append(ev, leaf.value.to_bytes());
        emit(EventKind::LeafInserted, std::move(ev), mixer_address());
        return index;
    });
}

void Chain::mixer_store_signature(const Address& sender, std::uint64_t index, const VerifyingKey& key,
                                  const Signature& sig)
{
    call(sender, "mixer_store_signature",
         {{"index", dec(index)}, {"key", to_hex(key.bytes)}, {"signature", to_hex(sig.bytes)}}, [&] {
        auto& m = mixer_mut();
        if (index >= m.tree.size()) fail(Errc::IndexUnknown);
        if (m.signature(index, key)) fail(Errc::SignatureExists);
        if (!verify(key, m.leaves[index].canonical_bytes(), sig)) fail(Errc::Unauthorized, "bad leaf signature");
        m.leaf_signatures[index][key] = sig;
        Bytes ev;
        append(ev, be_word(index));
        append(ev, key.bytes);
        emit(EventKind::SignatureStored, std::move(ev), mixer_address());
    });
}

std::uint64_t Chain::advance_blocks(std::uint64_t n)
{
    if (n == 0) fail(Errc::PreconditionViolated, "advance by zero blocks");
    height_ += n;
    return height_;
}

Network::Network(const NetworkConfig& cfg)
    : multiplexer_(cfg.multiplexer), proofs_(SeededRng(cfg.seed).child("proofs"))
{
    if (cfg.chains.empty()) fail(Errc::ConfigInvalid, "no chains");
    if (cfg.merkle_depth < 1 || cfg.merkle_depth > kMaxTreeDepth)
        fail(Errc::ConfigInvalid, "merkle depth " + dec(static_cast<std::uint64_t>(cfg.merkle_depth)));
    if (cfg.revert.window == 0) fail(Errc::ConfigInvalid, "revert window must be positive");
    for (auto id : cfg.chains) {
        if (!is_valid_chain_id(id)) fail(Errc::ConfigInvalid, "chain id " + dec(id) + " out of tier");
        if (chains_.count(id)) fail(Errc::ConfigInvalid, "duplicate chain " + dec(id));
        ChainConfig cc{ChainId(id), id == cfg.multiplexer, cfg.merkle_depth, cfg.revert};
        chains_.emplace(id, std::make_unique<Chain>(cc, *this));
    }
    if (!chains_.count(cfg.multiplexer)) fail(Errc::ConfigInvalid, "multiplexer is not one of the chains");
    names_[mixer_address()] = "mixer";
}

Chain& Network::chain(ChainId id)
{
    auto it = chains_.find(id.value());
    if (it == chains_.end()) fail(Errc::PreconditionViolated, "unknown chain " + dec(id.value()));
    return *it->second;
}

const Chain& Network::chain(ChainId id) const
{
    auto it = chains_.find(id.value());
    if (it == chains_.end()) fail(Errc::PreconditionViolated, "unknown chain " + dec(id.value()));
    return *it->second;
}

std::vector<ChainId> Network::chain_ids() const
{
    std::vector<ChainId> out;
    for (const auto& [id, _] : chains_) out.emplace_back(id);
    return out;
}

std::string Network::name_of(const Address& a) const
{
    auto it = names_.find(a);
    return it == names_.end() ? a.to_hex() : it->second;
}

std::size_t Network::log(std::string actor, std::string op, std::vector<std::pair<std::string, std::string>> args,
                         std::string result)
{
    return transcript_.add(
        Record{0, 0, multiplexer().height(), std::move(actor), std::move(op), std::move(args), std::move(result)});
}

void Network::tick()
{
    for (auto& [_, c] : chains_) c->advance_blocks(1);
}

} // namespace dact

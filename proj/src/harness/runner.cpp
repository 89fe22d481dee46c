#include <dact/commitment.hpp>
#include <dact/error.hpp>
#include <dact/harness.hpp>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace dact {

namespace {

struct AssertFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t u64(const Json& a, const char* key)
{
    if (!a.contains(key)) fail(Errc::ConfigInvalid, std::string("action needs '") + key + "'");
    const auto& v = a.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        fail(Errc::ConfigInvalid, std::string("'") + key + "' must be unsigned");
    return a.at(key).get<std::uint64_t>();
}

std::uint64_t u64_or(const Json& a, const char* key, std::uint64_t fallback)
{
    return a.contains(key) ? u64(a, key) : fallback;
}

std::string str(const Json& a, const char* key)
{
    if (!a.contains(key) || !a.at(key).is_string())
        fail(Errc::ConfigInvalid, std::string("action needs string '") + key + "'");
    return a.at(key).get<std::string>();
}

bool flag(const Json& a, const char* key) { return a.contains(key) && a.at(key).is_boolean() && a.at(key).get<bool>(); }

class Runner {
public:
    explicit Runner(const ScenarioConfig& cfg)
        : cfg_(cfg),
          net_(NetworkConfig{cfg.chains, cfg.multiplexer, cfg.merkle_depth, cfg.windows, cfg.seed}),
          oracle_("oracle", {}),
          root_(cfg.seed)
    {
        genesis();
    }

    ScenarioResult run();

private:
    struct NoteRef {
        Wallet* wallet = nullptr;
        FieldElement commitment;
        std::optional<SettlementBundle> last;
    };

    void genesis();
    void tick();
    void perform(const Json& a);
    OraclePolicy policy_from(const Json& o, OraclePolicy base);

    Wallet& wallet(const std::string& name);
    DappNode& dapp(const std::string& name);
    NoteRef& note(const std::string& label);
    SettlementBundle attack_bundle(NoteRef& ref, const Json& a);
    void forge_settlement(const Json& a);
    void register_action(const Json& a);
    void check_assert(const Json& a);
    FieldElement covering_root(ChainId chain, std::uint64_t index, std::uint64_t& prefix) const;
    std::string outcome_of(const FieldElement& nh) const;
    void evaluate_checks();

    const ScenarioConfig& cfg_;
    Network net_;
    Oracle oracle_;
    SeededRng root_;
    std::vector<std::unique_ptr<DappNode>> dapps_;
    std::map<std::string, std::unique_ptr<Wallet>> wallets_;
    std::map<std::string, NoteRef> notes_;
    std::vector<std::string> note_order_;
    std::map<std::string, std::string> last_auto_error_;
    ScenarioResult result_;
};

void Runner::genesis()
{
    net_.set_name(oracle_.address(), "oracle");
    for (auto id : net_.chain_ids()) net_.chain(id).add_oracle(oracle_.address());

    for (const auto& dc : cfg_.dapps) {
        auto node = std::make_unique<DappNode>(dc.name, root_.child("dapp/" + dc.name), dc.signer, dc.resilience);
        std::vector<ChainId> chains;
        for (auto id : dc.chains) chains.emplace_back(id);
        node->deploy(net_, chains);
        dapps_.push_back(std::move(node));
    }
    for (std::size_t i = 0; i < dapps_.size(); ++i)
        if (cfg_.dapps[i].register_at_genesis) dapps_[i]->register_all(net_);

    for (const auto& wc : cfg_.wallets) {
        auto w = std::make_unique<Wallet>(wc.name, root_.child("wallet/" + wc.name));
        net_.set_name(w->address(), wc.name);
        for (const auto& [chain, amount] : wc.funds) net_.chain(ChainId(chain)).fund(w->address(), amount);
        wallets_.emplace(wc.name, std::move(w));
    }

    Json o = Json::object();
    o["mode"] = std::string(oracle_mode_name(cfg_.oracle.mode));
    if (!cfg_.oracle.censor_dapp.empty()) o["censor_dapp"] = cfg_.oracle.censor_dapp;
    if (cfg_.oracle.censor_chain) o["censor_chain"] = cfg_.oracle.censor_chain;
    if (!cfg_.oracle.forged_root.empty()) o["forged_root"] = cfg_.oracle.forged_root;
    OraclePolicy base;
    base.relay_period = cfg_.oracle.relay_period;
    base.root_push_period = cfg_.oracle.root_push_period;
    oracle_.set_policy(policy_from(o, base));
}

OraclePolicy Runner::policy_from(const Json& o, OraclePolicy p)
{
    auto mode = o.contains("mode") ? str(o, "mode") : "honest";
    bool found = false;
    using M = OraclePolicy::Mode;
    for (auto m : {M::Honest, M::ForgeRoot, M::CensorDapp, M::CensorChain, M::Replay})
        if (oracle_mode_name(m) == mode) {
            p.mode = m;
            found = true;
        }
    if (!found) fail(Errc::ConfigInvalid, "unknown oracle mode '" + mode + "'");
    if (o.contains("censor_dapp")) p.censored_dapp = dapp(str(o, "censor_dapp")).global_hash();
    if (o.contains("censor_chain")) p.censored_chain = u64(o, "censor_chain");
    if (o.contains("forged_root")) {
        auto f = FieldElement::from_canonical(from_hex(str(o, "forged_root")));
        if (!f) fail(Errc::ConfigInvalid, "forged_root is not a field element");
        p.forged_root = *f;
    } else if (p.mode == M::ForgeRoot) {
        auto rng = root_.child("oracle/forged-root");
        p.forged_root = random_field_31(rng);
    }
    return p;
}

Wallet& Runner::wallet(const std::string& name)
{
    auto it = wallets_.find(name);
    if (it == wallets_.end()) fail(Errc::ConfigInvalid, "unknown wallet '" + name + "'");
    return *it->second;
}

DappNode& Runner::dapp(const std::string& name)
{
    for (auto& d : dapps_)
        if (d->name() == name) return *d;
    fail(Errc::ConfigInvalid, "unknown dApp '" + name + "'");
}

Runner::NoteRef& Runner::note(const std::string& label)
{
    auto it = notes_.find(label);
    if (it == notes_.end()) fail(Errc::ConfigInvalid, "unknown note '" + label + "'");
    return it->second;
}

void Runner::tick()
{
    net_.tick();
    if (!cfg_.auto_step) return;
    if (oracle_.online()) oracle_.step(net_);
    for (auto& d : dapps_) {
        if (!d->online()) continue;
        std::string err;
        try {
            d->scan_and_sign(net_);
            d->watch_reverts(net_);
        } catch (const ProtocolError& e) {
            err = e.what();
        }
        // Persistent failures (e.g. too few share holders) are logged once.
        auto& last = last_auto_error_[d->name()];
        if (!err.empty() && err != last) net_.log(d->name(), "dapp_step", {}, err);
        last = err;
    }
}

FieldElement Runner::covering_root(ChainId chain, std::uint64_t index, std::uint64_t& prefix) const
{
    const auto& roots = net_.chain(chain).router().known_roots;
    const auto& tree = net_.multiplexer().mixer().tree;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
        auto size = tree.size_at_root(*it);
        if (size && *size > index) {
            prefix = *size;
            return *it;
        }
    }
    fail(Errc::UnknownRoot, "no synced root covers the leaf");
}

// A user trying to settle without the genuine dApp signature: either signing
// the leaf with a key of their own, or naming another dApp's key.
SettlementBundle Runner::attack_bundle(NoteRef& ref, const Json& a)
{
    const auto& h = ref.wallet->note(ref.commitment);
    const auto& mixer = net_.multiplexer().mixer();
    auto leaf = make_leaf(h.commitment, h.tpc, h.source);
    auto index = mixer.index_of(leaf.value);
    if (!index) fail(Errc::IndexUnknown, "leaf not inserted yet");
    std::uint64_t prefix = 0;
    auto root = covering_root(h.intent.dest_chain, *index, prefix);

    const auto& dest = net_.chain(h.intent.dest_chain).router();
    auto real = dest.key_of_hash.find(h.g);
    if (real == dest.key_of_hash.end()) fail(Errc::UnknownDapp, "dApp not registered on destination");

    VerifyingKey claimed = real->second;
    Signature sig{};
    if (flag(a, "self_sign")) {
        std::array<std::uint8_t, 32> seed{};
        root_.child("attacker/" + ref.wallet->name()).fill(seed);
        sig = KeyPair::from_seed(seed).sign(leaf.canonical_bytes());
    }
    if (a.contains("as_dapp")) {
        claimed = dapp(str(a, "as_dapp")).verifying_key();
        sig = flag(a, "colluding") ? dapp(str(a, "as_dapp")).sign(leaf.canonical_bytes())
                                   : mixer.signature(*index, real->second).value_or(Signature{});
    }
    SettlementWitness w{h.note.nullifier, h.note.secret, mixer.tree.path(*index, prefix), h.source, sig};
    SettlementPublic p{nullifier_hash(h.note.nullifier), root, h.tpc, claimed};
    auto proof = net_.proofs().prove(w, p);
    return SettlementBundle{proof, h.intent.payload, h.note.salt, h.intent.dest_chain, h.version};
}

// Oracle-assisted forgery: the attacker invents a leaf binding the victim
// dApp, the oracle pushes the root of a fabricated tree holding it, and the
// attacker tries to prove settlement.
void Runner::forge_settlement(const Json& a)
{
    auto attacker = str(a, "attacker");
    auto& victim = dapp(str(a, "victim"));
    auto dest = ChainId(u64(a, "dest"));
    auto source = ChainId(u64_or(a, "source", victim.chains().empty() ? cfg_.chains.front()
                                                                      : victim.chains().front().value()));
    auto rng = root_.child("forge/" + attacker);
    auto n = note_new(rng);
    PayloadIntent intent{{}, dest};
    rng.fill(intent.payload);
    Version version(1);
    auto g = victim.global_hash();
    auto tpc = trustless_public_commitment(g, version, obfuscate(intent, n.salt));
    auto c = commit(n.secret, n.nullifier);
    auto leaf = make_leaf(c, tpc, source);

    MerkleTree forged(cfg_.merkle_depth, 1);
    forged.insert(leaf.value);
    auto policy = oracle_.policy();
    policy.mode = OraclePolicy::Mode::ForgeRoot;
    policy.forged_root = forged.root();
    oracle_.set_policy(policy);
    oracle_.push_roots(net_);

    std::array<std::uint8_t, 32> seed{};
    rng.fill(seed);
    auto own = KeyPair::from_seed(seed);
    bool claim_self = a.contains("claim_key") && str(a, "claim_key") == "self";
    SettlementWitness w{n.nullifier, n.secret, forged.path(0), source, own.sign(leaf.canonical_bytes())};
    SettlementPublic p{nullifier_hash(n.nullifier), forged.root(), tpc,
                       claim_self ? own.verifying_key() : victim.verifying_key()};
    auto proof = net_.proofs().prove(w, p);
    auto sender = Address::from_label("forger/" + attacker);
    net_.set_name(sender, attacker);
    net_.chain(dest).withdraw(sender, proof, intent.payload, n.salt, dest, version);
}

void Runner::register_action(const Json& a)
{
    auto& actor = dapp(str(a, "dapp"));
    auto chain = ChainId(u64(a, "chain"));
    auto contract = a.contains("via") ? dapp(str(a, "via")).contract() : actor.contract();
    auto key = a.contains("key_of") ? dapp(str(a, "key_of")).verifying_key() : actor.verifying_key();
    auto g = dapp_global_hash(contract, actor.companions());
    auto pop = actor.sign(Chain::registration_message(chain, g, contract));
    net_.chain(chain).register_dapp(actor.owner(), contract, actor.companions(), key, pop);
}

std::string Runner::outcome_of(const FieldElement& nh) const
{
    bool settled = false, reverted = false;
    for (auto id : net_.chain_ids())
        for (const auto& ev : net_.chain(id).events()) {
            if (ev.kind != EventKind::Settled && ev.kind != EventKind::RevertExecuted) continue;
            if (FieldElement::from_canonical(ev.payload) != nh) continue;
            (ev.kind == EventKind::Settled ? settled : reverted) = true;
        }
    if (settled && reverted) return "both";
    if (settled) return "settled";
    if (reverted) return "reverted";
    return "pending";
}

void Runner::check_assert(const Json& a)
{
    auto what = str(a, "what");
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) throw AssertFailure(what + ": " + msg);
    };
    if (what == "delivered" || what == "not_delivered") {
        auto& ref = note(str(a, "note"));
        const auto& h = ref.wallet->note(ref.commitment);
        const auto& chain = net_.chain(ChainId(u64_or(a, "chain", h.intent.dest_chain.value())));
        const auto* contract = chain.dapp(a.contains("dapp") ? dapp(str(a, "dapp")).contract() : h.dapp);
        bool got = contract && std::count(contract->delivered.begin(), contract->delivered.end(), h.intent.payload);
        require(got == (what == "delivered"), "payload delivery does not match");
    } else if (what == "refunded" || what == "not_refunded") {
        auto& ref = note(str(a, "note"));
        const auto& h = ref.wallet->note(ref.commitment);
        const auto* contract = net_.chain(h.source).dapp(h.dapp);
        bool got = contract && std::count(contract->refunded.begin(), contract->refunded.end(), h.commitment);
        require(got == (what == "refunded"), "refund does not match");
    } else if (what == "balance") {
        auto& w = wallet(str(a, "wallet"));
        auto have = net_.chain(ChainId(u64(a, "chain"))).balance(w.address());
        auto want = u64(a, "equals");
        require(have == want, "have " + std::to_string(have) + ", want " + std::to_string(want));
    } else if (what == "outcome") {
        auto& ref = note(str(a, "note"));
        auto got = outcome_of(nullifier_hash(ref.wallet->note(ref.commitment).note.nullifier));
        require(got == str(a, "equals"), "note is " + got);
    } else if (what == "leaves") {
        auto have = net_.multiplexer().mixer().tree.size();
        require(have == u64(a, "equals"), "mixer holds " + std::to_string(have));
    } else {
        fail(Errc::ConfigInvalid, "unknown assertion '" + what + "'");
    }
}

void Runner::perform(const Json& a)
{
    auto op = a.at("do").get<std::string>();
    if (op == "deposit") {
        auto& w = wallet(str(a, "wallet"));
        auto label = str(a, "note");
        if (notes_.count(label)) fail(Errc::ConfigInvalid, "note '" + label + "' already used");
        auto& d = dapp(str(a, "dapp"));
        Payload payload{};
        if (a.contains("payload")) {
            auto bytes = from_hex(str(a, "payload"));
            if (bytes.size() != payload.size()) fail(Errc::ConfigInvalid, "payload must be 32 bytes");
            std::copy(bytes.begin(), bytes.end(), payload.begin());
        } else {
            root_.child("payload/" + label).fill(payload);
        }
        PayloadIntent intent{payload, ChainId(u64(a, "dest"))};
        Version version(u64_or(a, "version", 1));
        auto c = w.deposit(net_, ChainId(u64(a, "source")), d.contract(), intent, version, u64_or(a, "value", 10));
        notes_.emplace(label, NoteRef{&w, c, std::nullopt});
        note_order_.push_back(label);
    } else if (op == "withdraw") {
        auto& ref = note(str(a, "note"));
        const auto& h = ref.wallet->note(ref.commitment);
        SettlementBundle b = [&] {
            if (flag(a, "reuse")) {
                if (!ref.last) fail(Errc::PreconditionViolated, "no earlier proof to reuse");
                return *ref.last;
            }
            if (flag(a, "self_sign") || a.contains("as_dapp")) return attack_bundle(ref, a);
            return ref.wallet->build_settlement(net_, ref.commitment);
        }();
        ref.last = b;
        if (flag(a, "tamper_payload")) b.payload[u64_or(a, "tamper_byte", 0) % 32] ^= 1;
        if (a.contains("claim")) b.dest_chain_claim = ChainId(u64(a, "claim"));
        auto target = ChainId(u64_or(a, "chain", h.intent.dest_chain.value()));
        if (flag(a, "via_relayer"))
            oracle_.forward_withdraw(net_, b, target, ref.wallet->address());
        else
            ref.wallet->withdraw(net_, b, target);
    } else if (op == "revert_mark") {
        auto& ref = note(str(a, "note"));
        ref.wallet->revert_mark(net_, ref.commitment);
    } else if (op == "revert_init") {
        auto& ref = note(str(a, "note"));
        std::optional<ChainId> on;
        if (a.contains("chain")) on = ChainId(u64(a, "chain"));
        ref.wallet->revert_initiate(net_, ref.commitment, on);
    } else if (op == "execute") {
        auto& ref = note(str(a, "note"));
        std::optional<ChainId> on;
        if (a.contains("chain")) on = ChainId(u64(a, "chain"));
        ref.wallet->revert_execute(net_, ref.commitment, on);
    } else if (op == "revert") {
        auto& ref = note(str(a, "note"));
        ref.wallet->revert(net_, ref.commitment, [&] { tick(); });
    } else if (op == "relay") {
        oracle_.relay(net_);
    } else if (op == "push_root") {
        oracle_.push_roots(net_);
    } else if (op == "sign" || op == "halt") {
        for (auto& d : dapps_) {
            if (a.contains("dapp") && d->name() != str(a, "dapp")) continue;
            if (op == "sign")
                d->scan_and_sign(net_);
            else
                d->watch_reverts(net_);
        }
    } else if (op == "advance") {
        auto n = u64_or(a, "blocks", 1);
        if (n == 0) fail(Errc::PreconditionViolated, "advance by zero blocks");
        for (std::uint64_t i = 0; i < n; ++i) tick();
    } else if (op == "go_offline") {
        auto who = str(a, "actor");
        if (who == "oracle")
            oracle_.go_offline();
        else
            dapp(who).go_offline();
    } else if (op == "participating") {
        dapp(str(a, "dapp")).set_participating(static_cast<unsigned>(u64(a, "count")));
    } else if (op == "oracle_mode") {
        oracle_.set_policy(policy_from(a, oracle_.policy()));
    } else if (op == "forge_settlement") {
        forge_settlement(a);
    } else if (op == "register") {
        register_action(a);
    } else if (op == "assert") {
        check_assert(a);
    }
}

void Runner::evaluate_checks()
{
    const auto& records = result_.transcript.records();
    for (const auto& check : cfg_.checks) {
        Verdict v{"check " + check, true, ""};
        if (check == "settle_xor_revert") {
            std::map<std::string, int> seen;
            for (const auto& r : records)
                if (r.op == "event:Settled" || r.op == "event:RevertExecuted")
                    for (const auto& [k, val] : r.args)
                        if (k == "payload" && ++seen[val] > 1) {
                            v.pass = false;
                            v.detail = "nullifier hash " + val + " both settled and reverted";
                        }
        } else if (check == "deposit_minimality") {
            for (const auto& r : records) {
                if (r.op != "event:Deposit") continue;
                bool shape = r.args.size() == 2 && r.args[0].first == "origin" && r.args[1].first == "payload";
                try {
                    shape = shape && from_hex(r.args[1].second).size() == kDepositEventSize;
                    if (shape) decode_deposit_event(from_hex(r.args[1].second));
                } catch (const std::exception&) {
                    shape = false;
                }
                if (!shape) {
                    v.pass = false;
                    v.detail = "Deposit event at seq " + std::to_string(r.seq) + " carries extra data";
                }
            }
            for (const auto& f : result_.linkability.findings)
                if (f.kind == LinkFinding::Kind::Leak && (f.field == "payload" || f.field == "dest_chain")) {
                    v.pass = false;
                    v.detail = f.field + " of " + f.note + " visible in " + f.view + " view";
                }
        } else if (check == "oracle_blind" || check == "source_blind") {
            auto view = check == "oracle_blind" ? "oracle" : "source";
            for (const auto& f : result_.linkability.findings)
                if (f.kind == LinkFinding::Kind::Leak && f.view == view) {
                    v.pass = false;
                    v.detail = f.field + " of " + f.note + " at seq " + std::to_string(f.seq);
                }
        } else if (check == "all_resolved") {
            for (const auto& [label, out] : result_.outcomes)
                if (out != "settled" && out != "reverted") {
                    v.pass = false;
                    v.detail = label + " is " + out;
                }
        }
        result_.verdicts.push_back(std::move(v));
    }
}

ScenarioResult Runner::run()
{
    OpScope everything;
    for (std::size_t i = 0; i < cfg_.script.size(); ++i) {
        const auto& a = cfg_.script[i];
        auto op = a.at("do").get<std::string>();
        std::vector<std::pair<std::string, std::string>> args{{"step", std::to_string(i)}};
        for (const char* k : {"wallet", "note", "dapp", "actor", "attacker", "victim"})
            if (a.contains(k) && a.at(k).is_string()) args.emplace_back(k, a.at(k).get<std::string>());
        auto pos = net_.log("script", op, std::move(args), "");

        std::string got = "ok";
        std::string code = "ok";
        OpScope scope;
        try {
            perform(a);
        } catch (const ProtocolError& e) {
            if (e.code() == Errc::ConfigInvalid)
                fail(Errc::ConfigInvalid, "step " + std::to_string(i) + ": " + std::string(e.what()));
            got = e.what();
            code = errc_name(e.code());
        } catch (const AssertFailure& e) {
            got = code = std::string("AssertionFailed(") + e.what() + ")";
        } catch (const nlohmann::json::exception& e) {
            fail(Errc::ConfigInvalid, std::string("step ") + std::to_string(i) + ": " + e.what());
        }
        result_.metrics.phases[op] += scope.delta();
        net_.transcript().set_result(pos, got);

        auto expect = a.contains("expect") ? a.at("expect").get<std::string>() : std::string("ok");
        bool pass = expect == "*" || expect == got || expect == code;
        result_.verdicts.push_back({"step " + std::to_string(i) + " " + op, pass,
                                    pass ? got : "expected " + expect + ", got " + got});
    }
    result_.metrics.total = everything.delta();
    result_.metrics.insert_mimc = net_.costs().insert_mimc;
    result_.metrics.prove_constraints = net_.costs().prove_constraints;
    result_.metrics.verify = net_.costs().verify;

    for (const auto& label : note_order_) {
        const auto& ref = notes_.at(label);
        const auto& h = ref.wallet->note(ref.commitment);
        result_.secrets.push_back({label, h.source.value(), h.intent.dest_chain.value(), h.commitment.to_hex(),
                                   h.tpc.value.to_hex(), to_hex(h.intent.payload), to_hex(h.intent.dest_chain.word()),
                                   h.note.salt.to_hex(), h.note.secret.to_hex(), h.note.nullifier.to_hex()});
        result_.outcomes[label] = outcome_of(nullifier_hash(h.note.nullifier));
    }
    result_.transcript = net_.transcript();
    result_.linkability = analyze_linkability(result_.transcript, result_.secrets, {cfg_.multiplexer, {"oracle"}});
    evaluate_checks();
    return std::move(result_);
}

} // namespace

bool ScenarioResult::passed() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

ScenarioResult run_scenario(const ScenarioConfig& config)
{
    try {
        Runner r(config);
        return r.run();
    } catch (const ProtocolError& e) {
        if (e.code() == Errc::ConfigInvalid) throw;
        fail(Errc::ConfigInvalid, std::string("genesis failed: ") + e.what());
    }
}

} // namespace dact

#include <dact/actors.hpp>
#include <dact/error.hpp>

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace dact;

namespace {

Errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    FAIL("expected a ProtocolError");
    return Errc::PreconditionViolated;
}

constexpr std::uint64_t kSrc = 1001, kMux = 1002, kDst = 1003;

struct Scene {
    Network net;
    Oracle oracle;
    DappNode dapp;
    Wallet alice;
    SeededRng rng;

    explicit Scene(std::uint64_t seed = 1, SignerScheme scheme = {}, ResiliencePolicy res = {}, int depth = 8)
        : net(NetworkConfig{{kSrc, kMux, kDst}, kMux, depth, {}, seed}),
          oracle("oracle", {}),
          dapp("swap", SeededRng(seed).child("dapp/swap"), scheme, res),
          alice("alice", SeededRng(seed).child("wallet/alice")),
          rng(SeededRng(seed).child("test"))
    {
        net.set_name(oracle.address(), "oracle");
        net.set_name(alice.address(), "alice");
        for (auto id : net.chain_ids()) net.chain(id).add_oracle(oracle.address());
        std::vector<ChainId> chains{ChainId(kSrc), ChainId(kDst)};
        dapp.deploy(net, chains);
        dapp.register_all(net);
        net.chain(ChainId(kSrc)).fund(alice.address(), 1000);
    }

    FieldElement deposit(std::uint64_t value = 10, std::uint64_t dest = kDst)
    {
        PayloadIntent intent{{}, ChainId(dest)};
        rng.fill(intent.payload);
        return alice.deposit(net, ChainId(kSrc), dapp.contract(), intent, Version(1), value);
    }

    void tick()
    {
        net.tick();
        oracle.step(net);
        if (dapp.online()) {
            dapp.scan_and_sign(net);
            dapp.watch_reverts(net);
        }
    }

    Chain& src() { return net.chain(ChainId(kSrc)); }
    Chain& dst() { return net.chain(ChainId(kDst)); }
    Chain& mux() { return net.multiplexer(); }
};

} // namespace

TEST_CASE("wallet deposit")
{
    Scene s;
    auto c1 = s.deposit();
    auto c2 = s.deposit();
    CHECK(c1 != c2);
    const auto& h = s.alice.note(c1);
    CHECK(h.source == ChainId(kSrc));
    CHECK(h.g == s.dapp.global_hash());

    auto text = s.net.transcript().to_jsonl();
    CHECK(text.find(to_hex(ChainId(kDst).word())) == std::string::npos);
    CHECK(text.find(to_hex(h.intent.payload)) == std::string::npos);
    CHECK(text.find(h.note.salt.to_hex()) == std::string::npos);
    CHECK(text.find(h.note.secret.to_hex()) == std::string::npos);
    CHECK(text.find(h.note.nullifier.to_hex()) == std::string::npos);

    CHECK(code_of([&] { s.deposit(1, 10001); }) == Errc::ChainIdOutOfTier);
    CHECK(code_of([&] { s.alice.note(FieldElement::from_u64(1)); }) == Errc::NoteUnknown);
    CHECK(code_of([&] {
              s.alice.deposit(s.net, ChainId(kSrc), Address::from_label("nobody"), {{}, ChainId(kDst)}, Version(1), 1);
          }) == Errc::UnknownDapp);
}

TEST_CASE("settlement through the honest pipeline")
{
    Scene s;
    auto c = s.deposit();
    CHECK(code_of([&] { s.alice.build_settlement(s.net, c); }) == Errc::IndexUnknown);

    // Relay and root push happen on the tick; the dApp signs on the same tick.
    s.tick();
    CHECK(s.mux().mixer().tree.size() == 1);
    CHECK(s.dst().router().is_known_root(s.mux().mixer().tree.root()));
    auto b = s.alice.build_settlement(s.net, c);
    CHECK(s.net.proofs().verify(CircuitId::Settlement, b.proof));
    auto out = s.alice.withdraw(s.net, b, ChainId(kDst));
    CHECK(out.payload == s.alice.note(c).intent.payload);
    CHECK(s.dst().dapp(s.dapp.contract())->delivered.size() == 1);
    CHECK(s.net.costs().prove_constraints.back() == 8 + 4);
}

TEST_CASE("unsigned leaf cannot be proven")
{
    Scene s;
    s.dapp.go_offline();
    auto c = s.deposit();
    s.tick();
    CHECK(code_of([&] { s.alice.build_settlement(s.net, c); }) == Errc::SignatureMissing);
    CHECK(code_of([&] { s.dapp.scan_and_sign(s.net); }) == Errc::Offline);
}

TEST_CASE("stale root: withdraw fails, rebuild succeeds")
{
    Scene s;
    auto c = s.deposit();
    s.tick();
    auto b = s.alice.build_settlement(s.net, c);
    s.deposit();
    s.tick();
    s.deposit();
    s.tick();
    CHECK(code_of([&] { s.alice.withdraw(s.net, b, ChainId(kDst)); }) == Errc::UnknownRoot);
    auto fresh = s.alice.build_settlement(s.net, c);
    CHECK(s.alice.withdraw(s.net, fresh, ChainId(kDst)).payload == s.alice.note(c).intent.payload);
}

TEST_CASE("wallet_revert")
{
    Scene s;
    auto c = s.deposit(40);
    s.tick();
    CHECK(s.src().balance(s.alice.address()) == 960);

    SUBCASE("oracles and dApp offline after root sync")
    {
        s.oracle.go_offline();
        s.dapp.go_offline();
        s.alice.revert(s.net, c, [&] { s.tick(); });
        CHECK(s.src().balance(s.alice.address()) == 1000);
    }
    SUBCASE("honest revert with the watcher online is not halted")
    {
        s.alice.revert(s.net, c, [&] { s.tick(); });
        CHECK(s.src().balance(s.alice.address()) == 1000);
        CHECK(std::none_of(s.src().events().begin(), s.src().events().end(),
                           [](const Event& e) { return e.kind == EventKind::RevertHalted; }));
    }
    SUBCASE("after settlement")
    {
        s.alice.withdraw(s.net, s.alice.build_settlement(s.net, c), ChainId(kDst));
        CHECK(code_of([&] { s.alice.revert(s.net, c, [&] { s.tick(); }); }) == Errc::DoubleSpend);
    }
    SUBCASE("initiated on the wrong chain")
    {
        CHECK(code_of([&] { s.alice.revert_initiate(s.net, c, ChainId(kDst)); }) == Errc::WrongChain);
    }
}

TEST_CASE("oracle modes")
{
    SUBCASE("honest: leaf count +1 and roots synced")
    {
        Scene s;
        s.deposit();
        auto a = s.oracle.step(s.net);
        CHECK(a.relayed == 1);
        CHECK(a.roots_pushed == 3);
        for (auto id : s.net.chain_ids())
            CHECK(s.net.chain(id).router().known_roots.back() == s.mux().mixer().tree.root());
        CHECK(s.oracle.step(s.net).roots_pushed == 0);
    }
    SUBCASE("replay is rejected by the mixer")
    {
        Scene s;
        s.oracle.set_policy({OraclePolicy::Mode::Replay});
        s.deposit();
        s.oracle.relay(s.net);
        s.deposit();
        auto a = s.oracle.relay(s.net);
        CHECK(a.relayed == 1);
        CHECK(a.rejected == 1);
        CHECK(s.mux().mixer().tree.size() == 2);
        CHECK(s.net.transcript().records().rbegin()[0].result == "DuplicateCommitment");
    }
    SUBCASE("periods")
    {
        Scene s;
        OraclePolicy p;
        p.relay_period = 3;
        s.oracle.set_policy(p);
        s.deposit();
        s.net.tick();
        CHECK(s.oracle.step(s.net).relayed == 0);
        s.net.tick();
        s.net.tick();
        CHECK(s.oracle.step(s.net).relayed == 1);
    }
    SUBCASE("forged root is pushed but an honest leaf then has no usable root")
    {
        Scene s;
        auto c = s.deposit();
        OraclePolicy p{OraclePolicy::Mode::ForgeRoot, FieldElement::from_u64(77)};
        s.oracle.set_policy(p);
        s.tick();
        CHECK(s.dst().router().known_roots.back() == FieldElement::from_u64(77));
        CHECK(code_of([&] { s.alice.build_settlement(s.net, c); }) == Errc::UnknownRoot);
    }
    SUBCASE("censoring a dApp blocks relayed settlement; revert still recovers")
    {
        Scene s;
        OraclePolicy p{OraclePolicy::Mode::CensorDapp};
        p.censored_dapp = s.dapp.global_hash();
        s.oracle.set_policy(p);
        auto c = s.deposit(40);
        s.tick();
        auto b = s.alice.build_settlement(s.net, c);
        CHECK(code_of([&] { s.oracle.forward_withdraw(s.net, b, ChainId(kDst), s.alice.address()); }) ==
              Errc::Censored);
        CHECK(s.dst().dapp(s.dapp.contract())->delivered.empty());
        s.alice.revert(s.net, c, [&] { s.tick(); });
        CHECK(s.src().balance(s.alice.address()) == 1000);
    }
    SUBCASE("censoring a chain")
    {
        Scene s;
        OraclePolicy p{OraclePolicy::Mode::CensorChain};
        p.censored_chain = kDst;
        s.oracle.set_policy(p);
        auto c = s.deposit();
        s.tick();
        auto b = s.alice.build_settlement(s.net, c);
        CHECK(code_of([&] { s.oracle.forward_withdraw(s.net, b, ChainId(kDst), s.alice.address()); }) ==
              Errc::Censored);
        s.oracle.set_policy({});
        CHECK(s.oracle.forward_withdraw(s.net, b, ChainId(kDst), s.alice.address()).payload == b.payload);
    }
    SUBCASE("offline oracle does nothing")
    {
        Scene s;
        s.oracle.go_offline();
        s.deposit();
        CHECK(s.oracle.step(s.net).relayed == 0);
        CHECK(code_of([&] { s.oracle.relay(s.net); }) == Errc::Offline);
    }
}

TEST_CASE("dApp signs only leaves it can trace to a source deposit")
{
    Scene s;
    auto c = s.deposit();
    s.oracle.relay(s.net);

    // A compromised oracle injects a leaf that no source chain ever emitted.
    DepositEventData fake{FieldElement::from_u64(123456), {FieldElement::from_u64(9)}, ChainId(kSrc)};
    Event injected{EventKind::Deposit, encode_deposit_event(fake), ChainId(kSrc), 0, s.dapp.contract()};
    auto bad = s.mux().mixer_submit(s.oracle.address(), injected);

    CHECK(s.dapp.scan_and_sign(s.net) == 1);
    CHECK(s.mux().mixer().signature(0, s.dapp.verifying_key()));
    CHECK(!s.mux().mixer().signature(bad, s.dapp.verifying_key()));
    CHECK(s.dapp.scan_and_sign(s.net) == 0);
    (void)c;
}

TEST_CASE("threshold signer")
{
    SUBCASE("k-1 shares")
    {
        Scene s(3, {SignerScheme::Kind::Threshold, 5, 3, 5});
        s.dapp.set_participating(2);
        s.deposit();
        s.oracle.relay(s.net);
        CHECK(code_of([&] { s.dapp.scan_and_sign(s.net); }) == Errc::ThresholdUnmet);
        s.dapp.set_participating(3);
        CHECK(s.dapp.scan_and_sign(s.net) == 1);
    }
    SUBCASE("soundness, exhaustive over k <= n <= 5")
    {
        std::array<std::uint8_t, 4> msg{1, 2, 3, 4};
        for (unsigned n = 1; n <= 5; ++n)
            for (unsigned k = 1; k <= n; ++k) {
                DappNode d("t", SeededRng(n * 10 + k), {SignerScheme::Kind::Threshold, n, k, n});
                for (unsigned p = 0; p <= n; ++p) {
                    CAPTURE(n);
                    CAPTURE(k);
                    CAPTURE(p);
                    d.set_participating(p);
                    if (p >= k)
                        CHECK(verify(d.verifying_key(), msg, d.sign(msg)));
                    else
                        CHECK(code_of([&] { d.sign(msg); }) == Errc::ThresholdUnmet);
                }
            }
    }
    SUBCASE("any k-subset reconstructs, k-1 shares do not")
    {
        SeededRng rng(11);
        auto secret = random_field_31(rng);
        auto shares = shamir_split(secret, 5, 3, rng);
        for (unsigned mask = 0; mask < 32; ++mask) {
            std::vector<Share> pick;
            for (unsigned i = 0; i < 5; ++i)
                if (mask >> i & 1) pick.push_back(shares[i]);
            if (pick.size() >= 3) CHECK(shamir_combine(pick) == secret);
            if (pick.size() == 2) CHECK(shamir_combine(pick) != secret);
        }
        CHECK_THROWS_AS(shamir_split(secret, 2, 3, rng), ProtocolError);
    }
    SUBCASE("bad scheme config")
    {
        CHECK(code_of([] { DappNode("x", SeededRng(1), {SignerScheme::Kind::Threshold, 2, 0, 2}); }) ==
              Errc::ConfigInvalid);
    }
}

TEST_CASE("revert watcher")
{
    SUBCASE("initiate without destination mark is halted")
    {
        Scene s;
        auto c = s.deposit(40);
        s.tick();
        s.alice.revert_initiate(s.net, c);
        s.tick();
        auto nh = nullifier_hash(s.alice.note(c).note.nullifier);
        CHECK(s.src().router().pending_reverts.at(nh).halted);
        for (int i = 0; i < 100; ++i) s.tick();
        CHECK(code_of([&] { s.alice.revert_execute(s.net, c); }) == Errc::Halted);
        CHECK(s.src().balance(s.alice.address()) == 960);
    }
    SUBCASE("revert of a settled note is halted")
    {
        Scene s;
        auto c = s.deposit(40);
        s.tick();
        s.alice.withdraw(s.net, s.alice.build_settlement(s.net, c), ChainId(kDst));
        s.alice.revert_initiate(s.net, c);
        s.tick();
        auto nh = nullifier_hash(s.alice.note(c).note.nullifier);
        CHECK(s.src().router().pending_reverts.at(nh).halted);
    }
    SUBCASE("burst beyond max_reverts_per_period")
    {
        ResiliencePolicy res;
        res.max_reverts_per_period = 2;
        Scene s(1, {}, res);
        std::vector<FieldElement> cs;
        for (int i = 0; i < 3; ++i) cs.push_back(s.deposit(10));
        s.tick();
        for (auto& c : cs) {
            s.alice.revert_mark(s.net, c);
            s.alice.revert_initiate(s.net, c);
        }
        s.tick();
        int halted = 0;
        for (auto& c : cs)
            halted += s.src().router().pending_reverts.at(nullifier_hash(s.alice.note(c).note.nullifier)).halted;
        CHECK(halted == 1);
    }
    SUBCASE("value above threshold")
    {
        ResiliencePolicy res;
        res.max_value_per_revert = 30;
        Scene s(1, {}, res);
        auto c = s.deposit(40);
        s.tick();
        s.alice.revert_mark(s.net, c);
        s.alice.revert_initiate(s.net, c);
        s.tick();
        CHECK(s.src().router().pending_reverts.at(nullifier_hash(s.alice.note(c).note.nullifier)).halted);
    }
}

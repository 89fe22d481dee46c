#include <dact/error.hpp>
#include <dact/harness.hpp>

#include <algorithm>
#include <sstream>

namespace dact {

namespace {

Json counts_json(const OpCounts& c)
{
    return {{"mimc", c.mimc},
            {"keccak_blocks", c.keccak_blocks},
            {"sig_verify", c.sig_verify},
            {"sig_sign", c.sig_sign},
            {"constraints", c.constraints}};
}

// Byte-aligned substring search over hex text.
bool contains_hex(std::string_view haystack, std::string_view needle)
{
    if (needle.empty()) return false;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1))
        if (pos % 2 == 0) return true;
    return false;
}

bool in_oracle_view(const Record& r, const ViewSpec& v)
{
    if (std::find(v.oracle_actors.begin(), v.oracle_actors.end(), r.actor) != v.oracle_actors.end()) return true;
    if (r.op == "event:Deposit") return true;
    if (r.chain != v.multiplexer) return false;
    return r.op.rfind("mixer_", 0) == 0 || r.op == "event:LeafInserted" || r.op == "event:SignatureStored";
}

} // namespace

std::uint64_t cost_units(const OpCounts& c) noexcept { return c.mimc + c.keccak_blocks + c.sig_verify; }

std::string MetricsReport::to_jsonl() const
{
    std::string out;
    auto line = [&](Json j) { out += j.dump() + "\n"; };
    for (const auto& [phase, c] : phases) {
        Json j{{"kind", "phase"}, {"phase", phase}};
        j["counts"] = counts_json(c);
        line(std::move(j));
    }
    Json t{{"kind", "total"}};
    t["counts"] = counts_json(total);
    line(std::move(t));
    for (auto m : insert_mimc) line({{"kind", "insert"}, {"mimc", m}});
    for (auto n : prove_constraints) line({{"kind", "prove"}, {"constraints", n}});
    for (const auto& v : verify) {
        Json j{{"kind", "verify"}, {"units", cost_units(v)}};
        j["counts"] = counts_json(v);
        line(std::move(j));
    }
    return out;
}

std::string_view link_kind_name(LinkFinding::Kind k) noexcept
{
    switch (k) {
    case LinkFinding::Kind::Leak: return "leak";
    case LinkFinding::Kind::ExpectedLinkage: return "expected_linkage";
    case LinkFinding::Kind::Correlation: return "correlation";
    }
    return "?";
}

bool LinkabilityReport::leaks_in(std::string_view view) const
{
    return std::any_of(findings.begin(), findings.end(),
                       [&](const LinkFinding& f) { return f.kind == LinkFinding::Kind::Leak && f.view == view; });
}

std::size_t LinkabilityReport::count(LinkFinding::Kind k) const
{
    return std::count_if(findings.begin(), findings.end(), [&](const LinkFinding& f) { return f.kind == k; });
}

std::string LinkabilityReport::to_jsonl() const
{
    std::string out;
    for (const auto& f : findings) {
        Json j{{"kind", std::string(link_kind_name(f.kind))},
               {"view", f.view},
               {"field", f.field},
               {"note", f.note},
               {"seq", f.seq}};
        out += j.dump() + "\n";
    }
    return out;
}

LinkabilityReport analyze_linkability(const Transcript& t, const std::vector<NoteSecrets>& notes, const ViewSpec& views)
{
    LinkabilityReport rep;
    for (const auto& r : t.records()) {
        std::string text;
        for (const auto& [k, v] : r.args) text += v + "|";
        for (const auto& n : notes) {
            const std::pair<const char*, const std::string*> secret_fields[] = {
                {"payload", &n.payload}, {"dest_chain", &n.dest_word}, {"salt", &n.salt},
                {"secret", &n.secret},   {"nullifier", &n.nullifier},
            };
            auto scan = [&](const std::string& view) {
                for (const auto& [field, hex] : secret_fields)
                    if (contains_hex(text, *hex)) rep.findings.push_back({LinkFinding::Kind::Leak, view, field, n.label, r.seq});
            };
            if (in_oracle_view(r, views)) scan("oracle");
            if (r.chain == n.source) scan("source");

            if (r.chain == 0 || r.chain == n.source || r.chain == views.multiplexer) continue;
            auto view = "chain:" + std::to_string(r.chain);
            if (contains_hex(text, n.commitment))
                rep.findings.push_back({LinkFinding::Kind::ExpectedLinkage, view, "commitment", n.label, r.seq});
            if (contains_hex(text, n.tpc))
                rep.findings.push_back({LinkFinding::Kind::Correlation, view, "tpc", n.label, r.seq});
        }
    }
    return rep;
}

std::vector<DepthPoint> sweep_depths(const ScenarioConfig& base, const std::vector<int>& depths)
{
    std::vector<DepthPoint> series;
    for (int d : depths) {
        if (d < 1 || d > kMaxTreeDepth) fail(Errc::ConfigInvalid, "depth " + std::to_string(d) + " not in 1..32");
        auto cfg = base;
        cfg.merkle_depth = d;
        auto res = run_scenario(cfg);
        if (!res.passed()) {
            for (const auto& v : res.verdicts)
                if (!v.pass) fail(Errc::PreconditionViolated, "depth " + std::to_string(d) + ": " + v.name + ": " + v.detail);
        }
        DepthPoint p{d, std::uint64_t{1} << d, res.metrics.insert_mimc, res.metrics.prove_constraints, {}};
        for (const auto& v : res.metrics.verify) p.verify_units.push_back(cost_units(v));
        series.push_back(std::move(p));
    }
    return series;
}

std::string sweep_to_jsonl(const std::vector<DepthPoint>& series)
{
    std::string out;
    for (const auto& p : series) {
        Json j{{"depth", p.depth},
               {"capacity", p.capacity},
               {"insert_mimc", p.insert_mimc},
               {"prove_constraints", p.prove_constraints},
               {"verify_units", p.verify_units}};
        out += j.dump() + "\n";
    }
    return out;
}

std::string transcript_file(const ScenarioConfig& config, const Transcript& t)
{
    Json header{{"scenario", config.to_json()}};
    return header.dump() + "\n" + t.to_jsonl();
}

ReplayResult replay_transcript(std::string_view file_text)
{
    auto nl = file_text.find('\n');
    if (nl == std::string_view::npos) fail(Errc::ConfigInvalid, "transcript has no header line");
    Json header;
    try {
        header = Json::parse(file_text.substr(0, nl));
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::ConfigInvalid, std::string("bad header: ") + e.what());
    }
    if (!header.is_object() || !header.contains("scenario")) fail(Errc::ConfigInvalid, "header lacks 'scenario'");
    auto cfg = ScenarioConfig::from_json(header.at("scenario"));
    auto body = file_text.substr(nl + 1);
    auto stored = Transcript::from_jsonl(body);
    auto replayed = run_scenario(cfg).transcript;

    ReplayResult r;
    r.stored_digest = stored.digest().to_hex();
    r.replayed_digest = replayed.digest().to_hex();
    r.identical = r.stored_digest == r.replayed_digest;
    if (!r.identical) {
        const auto& a = stored.records();
        const auto& b = replayed.records();
        std::size_t i = 0;
        while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
        r.first_difference = i;
    }
    return r;
}

} // namespace dact

#include <dact/error.hpp>
#include <dact/transcript.hpp>

#include <json.hpp>

namespace dact {

using ojson = nlohmann::ordered_json;

std::string Record::to_json() const
{
    ojson j;
    j["seq"] = seq;
    j["chain"] = chain;
    j["block"] = block;
    j["actor"] = actor;
    j["op"] = op;
    ojson a = ojson::object();
    for (const auto& [k, v] : args) a[k] = v;
    j["args"] = std::move(a);
    j["result"] = result;
    return j.dump();
}

Record Record::from_json(std::string_view line)
{
    try {
        auto j = ojson::parse(line);
        Record r;
        r.seq = j.at("seq").get<std::uint64_t>();
        r.chain = j.at("chain").get<std::uint64_t>();
        r.block = j.at("block").get<std::uint64_t>();
        r.actor = j.at("actor").get<std::string>();
        r.op = j.at("op").get<std::string>();
        for (const auto& [k, v] : j.at("args").items()) r.args.emplace_back(k, v.get<std::string>());
        r.result = j.at("result").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::ConfigInvalid, std::string("bad transcript record: ") + e.what());
    }
}

std::size_t Transcript::add(Record r)
{
    r.seq = records_.size();
    records_.push_back(std::move(r));
    return records_.size() - 1;
}

std::string Transcript::to_jsonl() const
{
    std::string out;
    for (const auto& r : records_) {
        out += r.to_json();
        out += '\n';
    }
    return out;
}

ByteHash32 Transcript::digest() const
{
    return detail::keccak256_uncounted(as_bytes(to_jsonl()));
}

Transcript Transcript::from_jsonl(std::string_view text)
{
    Transcript t;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty()) t.records_.push_back(Record::from_json(line));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return t;
}

} // namespace dact

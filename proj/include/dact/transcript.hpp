#pragma once

#include <dact/keccak.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dact {

/// One line of a scenario transcript. `chain` is 0 for off-chain actor
/// actions. Argument values are hex or decimal strings, never raw secrets.
struct Record {
    std::uint64_t seq = 0;
    std::uint64_t chain = 0;
    std::uint64_t block = 0;
    std::string actor;
    std::string op;
    std::vector<std::pair<std::string, std::string>> args;
    std::string result;

    /// Single-line JSON with a fixed key order:
    /// seq, chain, block, actor, op, args, result.
    std::string to_json() const;
    static Record from_json(std::string_view line);

    friend bool operator==(const Record&, const Record&) = default;
};

class Transcript {
public:
    /// Appends and assigns the next sequence number; returns its position.
    std::size_t add(Record r);
    void set_result(std::size_t pos, std::string result) { records_.at(pos).result = std::move(result); }

    const std::vector<Record>& records() const noexcept { return records_; }
    bool empty() const noexcept { return records_.empty(); }

    std::string to_jsonl() const;
    /// Keccak over the JSONL text; not charged to the op counter.
    ByteHash32 digest() const;

    static Transcript from_jsonl(std::string_view text);

private:
    std::vector<Record> records_;
};

} // namespace dact

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dact::test {

/// Whitespace-split rows of a fixture file under tests/fixtures.
inline std::vector<std::vector<std::string>> load_fixture(const std::string& name)
{
    std::ifstream in(std::string(DACT_FIXTURE_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<std::string> row;
        for (std::string tok; ss >> tok;) row.push_back(tok);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace dact::test

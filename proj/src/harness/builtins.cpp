#include <dact/error.hpp>
#include <dact/harness.hpp>

#include <algorithm>

namespace dact {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_scenario_sources();
}

std::vector<std::string> builtin_names()
{
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::builtin_scenario_sources()) out.emplace_back(name);
    return out;
}

ScenarioConfig builtin_scenario(std::string_view name)
{
    for (const auto& [n, text] : detail::builtin_scenario_sources())
        if (n == name) return ScenarioConfig::parse(text);
    fail(Errc::ConfigInvalid, "no builtin scenario '" + std::string(name) + "'");
}

std::vector<std::string> attack_names()
{
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::builtin_scenario_sources()) {
        auto cfg = ScenarioConfig::parse(text);
        if (std::count(cfg.tags.begin(), cfg.tags.end(), "attack")) out.emplace_back(name);
    }
    return out;
}

} // namespace dact

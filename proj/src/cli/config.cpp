#include "thermistor/cli.hpp"

#include "thermistor/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <vector>

namespace thermistor::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        parts.push_back(trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += '\n';
        out += l;
    }
    return out;
}

Driver parse_driver(std::string_view v) {
    if (v == "sweep") return Driver::Sweep;
    if (v == "projected_gradient") return Driver::ProjectedGradient;
    if (v == "simulate_only") return Driver::SimulateOnly;
    if (v == "constant_beta") return Driver::ConstantBeta;
    throw ConfigError("driver must be one of sweep, projected_gradient, simulate_only, constant_beta");
}

ConstantSlice parse_slice(std::string_view v) {
    if (v == "final") return ConstantSlice::FinalLevel;
    if (v == "average") return ConstantSlice::TimeAverage;
    throw ConfigError("constant_slice must be final or average");
}

}  // namespace

const char* to_string(Driver driver) {
    switch (driver) {
        case Driver::Sweep: return "sweep";
        case Driver::ProjectedGradient: return "projected_gradient";
        case Driver::SimulateOnly: return "simulate_only";
        case Driver::ConstantBeta: return "constant_beta";
    }
    return "unknown";
}

SchemeMode parse_mode(std::string_view text) {
    if (text == "paper" || text == "paper_faithful") return SchemeMode::PaperFaithful;
    if (text == "consistent" || text == "consistent_galerkin") return SchemeMode::ConsistentGalerkin;
    throw ConfigError("scheme must be paper or consistent");
}

RunConfig parse_config(std::istream& in) {
    std::map<std::string, std::string, std::less<>> entries;
    std::vector<std::string> problems;

    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back("line " + std::to_string(number) + ": expected key = value");
            continue;
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (key.empty()) {
            problems.push_back("line " + std::to_string(number) + ": empty key");
        } else if (!entries.emplace(key, value).second) {
            problems.push_back("line " + std::to_string(number) + ": duplicate key '" + key + "'");
        }
    }

    RunConfig c;
    c.params = make_params(1.0, 1.0, 0.01, 10, builtin_conductivity(ConductivityKind::Constant), ControlBox{});
    std::optional<std::string> initial;

    auto number = [&](const std::string& key, const std::string& value, auto& target) {
        if (!parse_number(value, target)) problems.push_back(key + ": '" + value + "' is not a valid number");
    };
    auto guarded = [&](const std::string& key, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError& e) {
            problems.push_back(key + ": " + e.what());
        }
    };

    const std::map<std::string, std::function<void(const std::string&, const std::string&)>, std::less<>> handlers{
        {"lambda", [&](auto& k, auto& v) { number(k, v, c.params.lambda); }},
        {"horizon", [&](auto& k, auto& v) { number(k, v, c.params.horizon); }},
        {"time_step", [&](auto& k, auto& v) { number(k, v, c.params.time_step); }},
        {"n_elements", [&](auto& k, auto& v) { number(k, v, c.params.n_elements); }},
        {"conductivity",
         [&](auto& k, auto& v) { guarded(k, [&] { c.params.conductivity = builtin_conductivity(v); }); }},
        {"box_min", [&](auto& k, auto& v) { number(k, v, c.params.box.min); }},
        {"box_max", [&](auto& k, auto& v) { number(k, v, c.params.box.max); }},
        {"initial_temperature", [&](auto&, auto& v) { initial = v; }},
        {"scheme", [&](auto& k, auto& v) { guarded(k, [&] { c.mode = parse_mode(v); }); }},
        {"driver", [&](auto& k, auto& v) { guarded(k, [&] { c.driver = parse_driver(v); }); }},
        {"tol", [&](auto& k, auto& v) { number(k, v, c.tol); }},
        {"max_iter", [&](auto& k, auto& v) { number(k, v, c.max_iter); }},
        {"relaxation", [&](auto& k, auto& v) { number(k, v, c.relaxation); }},
        {"step", [&](auto& k, auto& v) { number(k, v, c.step); }},
        {"output_dir", [&](auto&, auto& v) { c.output_dir = v; }},
        {"seed", [&](auto& k, auto& v) { number(k, v, c.seed); }},
        {"beta",
         [&](auto& k, auto& v) {
             double b = 0.0;
             number(k, v, b);
             c.beta = b;
         }},
        {"constant_slice", [&](auto& k, auto& v) { guarded(k, [&] { c.constant_slice = parse_slice(v); }); }},
    };

    for (const auto& [key, value] : entries) {
        const auto it = handlers.find(key);
        if (it == handlers.end()) {
            problems.push_back("unknown key '" + key + "'");
            continue;
        }
        it->second(key, value);
    }

    const int nodes = c.params.n_elements + 1;
    if (initial) {
        const auto parts = split_commas(*initial);
        std::vector<double> values;
        bool ok = true;
        for (auto part : parts) {
            double v = 0.0;
            if (!parse_number(part, v)) {
                problems.push_back("initial_temperature: '" + std::string(part) + "' is not a valid number");
                ok = false;
                break;
            }
            values.push_back(v);
        }
        if (ok && values.size() == 1) {
            c.params.initial_temperature = Eigen::VectorXd::Constant(std::max(nodes, 0), values.front());
        } else if (ok && static_cast<int>(values.size()) != nodes) {
            problems.push_back("initial_temperature: expected 1 or " + std::to_string(nodes) + " values, got " +
                               std::to_string(values.size()));
        } else if (ok) {
            c.params.initial_temperature = Eigen::Map<const Eigen::VectorXd>(values.data(), nodes);
        }
    } else {
        c.params.initial_temperature = Eigen::VectorXd::Zero(std::max(nodes, 0));
    }

    if (!(c.tol > 0.0)) problems.push_back("tol must be positive");
    if (c.max_iter < 1) problems.push_back("max_iter must be at least 1");
    if (!(c.relaxation > 0.0 && c.relaxation <= 1.0)) problems.push_back("relaxation must lie in (0, 1]");
    if (!(c.step > 0.0)) problems.push_back("step must be positive");
    if (c.beta && !std::isfinite(*c.beta)) problems.push_back("beta must be finite");

    if (problems.empty()) {
        for (auto& v : validate_params(c.params)) problems.push_back(std::move(v));
    }
    if (!problems.empty()) throw ConfigError(join(problems));
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    return parse_config(in);
}

BoundaryControl simulation_control(const RunConfig& config) {
    return BoundaryControl::uniform(config.beta.value_or(config.params.box.min), config.params.num_levels());
}

BoundaryControl verification_control(const RunConfig& config) {
    const ControlBox& box = config.params.box;
    return BoundaryControl::uniform(config.beta.value_or(0.5 * (box.min + box.max)), config.params.num_levels());
}

BoundaryControl starting_control(const RunConfig& config) {
    const ModelParams& p = config.params;
    switch (config.driver) {
        case Driver::ConstantBeta:
            return BoundaryControl::constant(config.beta.value_or(p.box.min), p.num_levels());
        case Driver::ProjectedGradient:
            return BoundaryControl::uniform(config.beta.value_or(p.box.max), p.num_levels());
        case Driver::Sweep:
        case Driver::SimulateOnly:
            break;
    }
    return BoundaryControl::uniform(config.beta.value_or(p.box.min), p.num_levels());
}

}  // namespace thermistor::cli

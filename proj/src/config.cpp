#include "cope/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cope/io.hpp"

namespace cope {

namespace pt = boost::property_tree;

std::string cost_label(CostKind k) {
    switch (k) {
        case CostKind::Linear: return "linear";
        case CostKind::Quadratic: return "quadratic";
        case CostKind::General: return "general";
    }
    return "?";
}

CostKind parse_cost(const std::string& s) {
    if (s == "linear") return CostKind::Linear;
    if (s == "quadratic") return CostKind::Quadratic;
    throw ConfigError("unknown cost family '" + s + "' (expected linear or quadratic)");
}

std::string ExperimentConfig::resolved_manifest_path() const {
    return manifest_path.empty() ? output_path + ".manifest.json" : manifest_path;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts, out;
    boost::split(parts, s, boost::is_any_of(","));
    for (auto& p : parts) {
        boost::trim(p);
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const std::string t = boost::trim_copy(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("bad number for " + key + ": '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("bad boolean for " + key + ": '" + s + "'");
}

std::vector<int> parse_n_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_number<int>("n_agents", item));
            continue;
        }
        int step = 1;
        std::string hi = item.substr(dots + 2);
        if (const auto colon = hi.find(':'); colon != std::string::npos) {
            step = parse_number<int>("n_agents", hi.substr(colon + 1));
            hi = hi.substr(0, colon);
        }
        const int a = parse_number<int>("n_agents", item.substr(0, dots));
        const int b = parse_number<int>("n_agents", hi);
        if (step < 1 || b < a) throw ConfigError("bad n_agents range '" + item + "'");
        for (int n = a; n <= b; n += step) out.push_back(n);
    }
    if (out.empty()) throw ConfigError("n_agents is empty");
    for (int n : out)
        if (n < 1) throw ConfigError("n_agents entries must be >= 1");
    return out;
}

template <class E>
E parse_enum(const std::string& key, const std::string& s, const std::map<std::string, E>& table) {
    auto it = table.find(s);
    if (it == table.end()) {
        std::string opts;
        for (const auto& [k, v] : table) opts += (opts.empty() ? "" : ", ") + k;
        throw ConfigError("bad value for " + key + ": '" + s + "' (expected " + opts + ")");
    }
    return it->second;
}

template <class E>
std::string enum_name(E v, const std::map<std::string, E>& table) {
    for (const auto& [k, e] : table)
        if (e == v) return k;
    return "?";
}

const std::map<std::string, AgentMode> kModes{{"truthful", AgentMode::Truthful}, {"best_response", AgentMode::BestResponse}};
const std::map<std::string, TieBreak> kTies{{"lowest", TieBreak::LowestIndex}, {"random", TieBreak::SeededRandom}};
const std::map<std::string, LinearPiRule> kPi{{"runner_up", LinearPiRule::RunnerUp}, {"full_support", LinearPiRule::FullSupport}};
const std::map<std::string, ParticipantCount> kCount{{"participants", ParticipantCount::Participants},
                                                     {"all", ParticipantCount::All}};
const std::map<std::string, LinearAlpha> kAlpha{{"standard", LinearAlpha::Standard}, {"break_even", LinearAlpha::BreakEven}};

const std::map<std::string, std::set<std::string>> kKeys{
    {"prior", {"mu0", "var0"}},
    {"types", {"theta_lo", "theta_hi"}},
    {"experiment", {"costs", "n_agents", "mechanisms", "n_trials", "seed", "parallelism", "fixed_types", "agent_mode"}},
    {"cope", {"tie_break", "linear_pi"}},
    {"homogeneous", {"theta_dagger", "count", "linear_alpha"}},
    {"output", {"path", "format", "manifest"}},
};

void validate(const ExperimentConfig& c) {
    if (!(c.var0 > 0.0) || !std::isfinite(c.var0)) throw ConfigError("prior.var0 must be positive and finite");
    if (!std::isfinite(c.mu0)) throw ConfigError("prior.mu0 must be finite");
    if (!(c.theta_lo >= 0.0 && c.theta_hi > c.theta_lo && std::isfinite(c.theta_hi)))
        throw ConfigError("types: need 0 <= theta_lo < theta_hi < inf");
    if (c.costs.empty()) throw ConfigError("experiment.costs is empty");
    if (c.mechanisms.empty()) throw ConfigError("experiment.mechanisms is empty");
    for (const auto& m : c.mechanisms)
        if (m != "cope" && m != "centralized" && m != "homogeneous")
            throw ConfigError("unknown mechanism '" + m + "' (expected cope, centralized, homogeneous)");
    if (c.n_trials < 1) throw ConfigError("experiment.n_trials must be >= 1");
    if (c.parallelism < 0) throw ConfigError("experiment.parallelism must be >= 0");
    for (double t : c.theta_dagger)
        if (!(t > 0.0 && t <= c.theta_hi)) throw ConfigError("homogeneous.theta_dagger entries must lie in (0, theta_hi]");
    if (c.output_format != "csv" && c.output_format != "json") throw ConfigError("output.format must be csv or json");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        auto known = kKeys.find(section);
        if (known == kKeys.end()) throw ConfigError("unknown config section [" + section + "]");
        if (!body.data().empty() && body.empty()) throw ConfigError("key '" + section + "' outside a section");
        for (const auto& [key, node] : body) {
            if (!known->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
            const std::string v = boost::trim_copy(node.data());
            const std::string full = section + "." + key;
            if (section == "prior") {
                (key == "mu0" ? c.mu0 : c.var0) = parse_number<double>(full, v);
            } else if (section == "types") {
                (key == "theta_lo" ? c.theta_lo : c.theta_hi) = parse_number<double>(full, v);
            } else if (section == "experiment") {
                if (key == "costs") {
                    c.costs.clear();
                    for (const auto& s : split_list(v)) c.costs.push_back(parse_cost(s));
                } else if (key == "n_agents") {
                    c.n_agents = parse_n_list(v);
                } else if (key == "mechanisms") {
                    c.mechanisms = split_list(v);
                } else if (key == "n_trials") {
                    c.n_trials = parse_number<std::uint64_t>(full, v);
                } else if (key == "seed") {
                    c.seed = parse_number<std::uint64_t>(full, v);
                } else if (key == "parallelism") {
                    c.parallelism = parse_number<int>(full, v);
                } else if (key == "fixed_types") {
                    c.fixed_types = parse_bool(full, v);
                } else {
                    c.agent_mode = parse_enum(full, v, kModes);
                }
            } else if (section == "cope") {
                if (key == "tie_break") c.tie_break = parse_enum(full, v, kTies);
                else c.linear_pi = parse_enum(full, v, kPi);
            } else if (section == "homogeneous") {
                if (key == "theta_dagger") {
                    c.theta_dagger.clear();
                    for (const auto& s : split_list(v)) c.theta_dagger.push_back(parse_number<double>(full, s));
                } else if (key == "count") {
                    c.count = parse_enum(full, v, kCount);
                } else {
                    c.linear_alpha = parse_enum(full, v, kAlpha);
                }
            } else {
                if (key == "path") c.output_path = v;
                else if (key == "format") c.output_format = v;
                else c.manifest_path = v;
            }
        }
    }
    validate(c);
    return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
    auto join = [](const auto& items, auto fmt) {
        std::string s;
        for (const auto& x : items) s += (s.empty() ? "" : ", ") + fmt(x);
        return s;
    };
    std::ostringstream os;
    os << "[prior]\n"
       << "mu0 = " << format_double(c.mu0) << "\n"
       << "var0 = " << format_double(c.var0) << "\n\n"
       << "[types]\n"
       << "theta_lo = " << format_double(c.theta_lo) << "\n"
       << "theta_hi = " << format_double(c.theta_hi) << "\n\n"
       << "[experiment]\n"
       << "costs = " << join(c.costs, cost_label) << "\n"
       << "n_agents = " << join(c.n_agents, [](int n) { return std::to_string(n); }) << "\n"
       << "mechanisms = " << join(c.mechanisms, [](const std::string& s) { return s; }) << "\n"
       << "n_trials = " << c.n_trials << "\n"
       << "seed = " << c.seed << "\n"
       << "parallelism = " << c.parallelism << "\n"
       << "fixed_types = " << (c.fixed_types ? "true" : "false") << "\n"
       << "agent_mode = " << enum_name(c.agent_mode, kModes) << "\n\n"
       << "[cope]\n"
       << "tie_break = " << enum_name(c.tie_break, kTies) << "\n"
       << "linear_pi = " << enum_name(c.linear_pi, kPi) << "\n\n"
       << "[homogeneous]\n"
       << "theta_dagger = " << join(c.theta_dagger, [](double t) { return format_double(t); }) << "\n"
       << "count = " << enum_name(c.count, kCount) << "\n"
       << "linear_alpha = " << enum_name(c.linear_alpha, kAlpha) << "\n\n"
       << "[output]\n"
       << "path = " << c.output_path << "\n"
       << "format = " << c.output_format << "\n";
    if (!c.manifest_path.empty()) os << "manifest = " << c.manifest_path << "\n";
    return os.str();
}

ExperimentSpec to_experiment_spec(const ExperimentConfig& c) {
    ExperimentSpec spec;
    spec.base.prior = GaussianPrior(c.mu0, c.var0);
    spec.base.type_dist = CostTypeDistribution::uniform(c.theta_lo, c.theta_hi);
    spec.costs = c.costs;
    spec.n_values = c.n_agents;
    for (const auto& m : c.mechanisms) {
        if (m == "cope") spec.mechanisms.push_back(MechanismSpec::cope_for(CostKind::Linear));
        else if (m == "centralized") spec.mechanisms.push_back(MechanismSpec::centralized());
        else
            for (double t : c.theta_dagger) spec.mechanisms.push_back(MechanismSpec::homogeneous(t));
    }
    spec.n_trials = c.n_trials;
    spec.seed = c.seed;
    spec.parallelism = c.parallelism > 0 ? c.parallelism : default_parallelism();
    spec.mode = c.agent_mode;
    spec.fixed_types = c.fixed_types;
    spec.options.mech.tie = c.tie_break;
    spec.options.mech.linear_pi = c.linear_pi;
    spec.options.mech.homogeneous.count = c.count;
    spec.options.mech.homogeneous.linear_alpha = c.linear_alpha;
    return spec;
}

}  // namespace cope

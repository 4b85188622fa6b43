#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cope/benchmarks.hpp"
#include "cope/mechanism.hpp"
#include "cope/model.hpp"

namespace cope {

enum class MechanismKind { CopeLinear, CopeQuadratic, CopeGeneral, Centralized, Homogeneous };

struct MechanismSpec {
    MechanismKind kind = MechanismKind::CopeLinear;
    double theta_dagger = 0.0;  // Homogeneous only

    static MechanismSpec cope_for(CostKind kind);
    static MechanismSpec centralized() { return {MechanismKind::Centralized, 0.0}; }
    static MechanismSpec homogeneous(double td) { return {MechanismKind::Homogeneous, td}; }

    std::string family() const;  // "cope", "centralized", "homogeneous"
    bool operator==(const MechanismSpec&) const = default;
};

struct MechanismOptions {
    LinearPiRule linear_pi = LinearPiRule::RunnerUp;
    TieBreak tie = TieBreak::LowestIndex;
    HomogeneousOptions homogeneous;
    GeneralSolverConfig general;
    double quad_tol = 1e-10;
};

// What one agent is offered once all reports are in.
struct AgentContract {
    Payment pay;
    double requested = 0.0;
};

const CostModel& scenario_cost(const Scenario& s);

// Contracts for every agent under a report profile. Homogeneous contracts
// ignore the reports. Centralized has no contracts and is rejected.
std::vector<AgentContract> offer_contracts(const MechanismSpec& mech, const Scenario& s, std::span<const double> reports,
                                           const MechanismOptions& opts = {}, std::uint64_t tie_seed = 0);

// Contract for agent n only; cheaper than offer_contracts for quadratic COPE.
AgentContract offer_contract(const MechanismSpec& mech, const Scenario& s, std::span<const double> reports, std::size_t n,
                             const MechanismOptions& opts = {}, std::uint64_t tie_seed = 0);

// Requested efforts under COPE for a report profile.
std::vector<double> cope_efforts(const MechanismSpec& mech, const Scenario& s, std::span<const double> reports,
                                 const MechanismOptions& opts = {}, std::uint64_t tie_seed = 0);

}  // namespace cope

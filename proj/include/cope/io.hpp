#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cope/sim.hpp"

namespace cope {

struct ExperimentConfig;

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 17 significant digits: doubles survive a text round trip.
std::string format_double(double v);

inline constexpr const char* kCsvHeader = "mechanism,cost,N,theta_dagger,metric,mean,se,n_trials";

struct CsvRow {
    std::string mechanism;
    std::string cost;
    int n_agents = 0;
    std::string theta_dagger;  // empty unless homogeneous
    std::string metric;
    double mean = 0.0;
    double se = 0.0;
    std::uint64_t n_trials = 0;

    // "cope", "centralized", "homogeneous(0.2)"
    std::string series() const;
};

std::vector<CsvRow> to_rows(const std::vector<ExperimentResult>& results);
void write_results_csv(std::ostream& out, const std::vector<ExperimentResult>& results);
void write_results_json(std::ostream& out, const std::vector<ExperimentResult>& results);
std::vector<CsvRow> read_results_csv(std::istream& in);

void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const std::string& started_at, double elapsed_s);

struct FigureOutput {
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

// payoff_{linear,quadratic}: principal payoff vs N; profit_{linear,quadratic}: network
// profit vs N including the centralized benchmark. Columns: N,series,mean,se.
FigureOutput write_figures(const std::vector<CsvRow>& rows, const std::string& out_dir);

}  // namespace cope

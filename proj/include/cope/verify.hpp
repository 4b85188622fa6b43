#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cope/model.hpp"

namespace cope {

struct CheckRow {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::uint64_t seed = 0;
    std::string detail;
    bool gating = true;  // informational rows never fail a suite
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckRow> rows;

    bool all_pass() const;
    std::size_t failures() const;
    void print(std::ostream& os) const;
};

struct VerifyOptions {
    std::uint64_t seed = 20190501;
    int instances = 20;
    std::uint64_t n_mc = 20000;
    std::vector<CostKind> costs{CostKind::Linear, CostKind::Quadratic};
    int cubic_instances = 10000;
    int closed_form_vectors = 50;
    int bic_grid = 101;
};

// Positive root of W^3 - a W^2 - s by safeguarded Newton on
// [max(a, s^(1/3)), a + s^(1/3)]; shares no code with solve_cubic.
double cubic_root_bracketed(double a, double s);

SuiteReport verify_cubic(const VerifyOptions& opts = {});
SuiteReport verify_closed_forms(const VerifyOptions& opts = {});
SuiteReport verify_monotonicity(const VerifyOptions& opts = {});
SuiteReport verify_bic(const VerifyOptions& opts = {});
SuiteReport verify_bir(const VerifyOptions& opts = {});

const std::vector<std::string>& suite_names();
// Throws DomainError for an unknown name.
SuiteReport run_suite(const std::string& name, const VerifyOptions& opts = {});

}  // namespace cope

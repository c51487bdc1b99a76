#pragma once

#include <string>
#include <vector>

namespace seagle {

struct ValidationRow {
    std::string check;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::string suite;
    std::vector<ValidationRow> rows;

    bool all_passed() const;
    std::string to_table() const;
};

/// Bundled oracle comparisons at desk scale. Suites: green-ops, gradient,
/// forward-analytic, prox, end-to-end. Unknown names throw ConfigError.
ValidationReport run_validation_suite(const std::string& suite);

std::vector<std::string> validation_suite_names();

}  // namespace seagle

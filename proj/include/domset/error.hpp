#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace domset {

// Invalid argument values (bad probabilities, non-bijective permutations, ...).
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Vertex or element index outside the valid range.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Tensor shape incompatibility; the message always carries both shapes.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition of an operation was violated (non-scalar loss, empty graph, ...).
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Malformed or inconsistent persisted data.
struct DataError : std::runtime_error {
    DataError(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_number(line) {}

    long line_number;
};

// A search exhausted its node budget; carries the best-known upper bound.
struct BudgetError : std::runtime_error {
    BudgetError(const std::string& msg, int gamma_upper, std::vector<int> witness_so_far)
        : std::runtime_error(msg), best_gamma(gamma_upper), witness(std::move(witness_so_far)) {}

    int best_gamma;
    std::vector<int> witness;
};

}  // namespace domset

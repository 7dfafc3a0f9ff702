#pragma once

// Property and oracle checks behind `lfdd check`. Each check reports the
// measured quantity next to the tolerance it is held to.

#include <functional>
#include <string>
#include <vector>

#include "lfdd/tensor.hpp"

namespace lfdd {

enum class CheckLevel { Fast, Full };

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    bool lower_bound = false;  // pass means measured >= tolerance
};

using BBuilder = std::function<Tensor4(const Tensor2& alpha, const Tensor4& c)>;

struct CheckOptions {
    CheckLevel level = CheckLevel::Fast;
    // The B construction under test; the tensor-level checks call this
    // instead of build_B so that a faulty construction can be injected.
    BBuilder build_b = build_B;
};

// build_B with a 1% error on every entry (minor symmetry preserved).
BBuilder corrupted_b_builder();

std::vector<CheckResult> run_checks(const CheckOptions& options);

}  // namespace lfdd

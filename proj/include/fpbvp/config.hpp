#pragma once

#include <string>
#include <vector>

#include "fpbvp/problem.hpp"

namespace fpbvp::config {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class RhsKind { Monomial, CosineTwoPi, Zero, Expression };

struct RhsSpec {
    RhsKind kind = RhsKind::Zero;
    double k = 0.0;                       // Monomial exponent
    std::vector<std::string> components;  // Expression strings, one per component
};

struct ProblemConfig {
    ProblemSpec problem;
    SolverConfig solver;
    RhsSpec rhs;
    bool m_from_user = false;
    bool K_from_user = false;
};

/// Parses the declarative JSON problem file (key set documented in the
/// README). Registry forcings ("monomial", "cosine-2pi", "zero") come with
/// default certified m and K; expression forcings take them from the config.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

/// Rebuilds problem.f (registry closure or compiled expressions). Needed
/// after mutating alpha/beta/T/d on a copy.
void rebind_rhs(ProblemConfig& pc);

/// Recomputes the registry-default m and K after a parameter change, keeping
/// user-certified values untouched.
void refresh_registry_defaults(ProblemConfig& pc);
void refresh_registry_defaults(const RhsSpec& rhs, bool m_from_user, bool K_from_user,
                               ProblemSpec& pr);

}  // namespace fpbvp::config

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vintage/model.hpp"

namespace vintage::cli {

struct AuditResult {
    std::string name;
    double margin = 0.0;  // >= 0 means pass
    bool pass = false;
    std::string detail;
};

struct AuditContext {
    const VintageModel& model;
    std::uint64_t seed = 42;
    double tol = 1e-6;      // value-sweep tolerance
    double horizon = 0.0;   // closed-loop window; 0 selects 10 / lambda
};

struct Audit {
    std::string name;
    std::function<AuditResult(const AuditContext&)> run;
};

/// Number of audits the verify subcommand must expose.
inline constexpr std::size_t kExpectedAuditCount = 11;

const std::vector<Audit>& audit_registry();
std::vector<AuditResult> run_audits(const AuditContext& ctx);

/// Builtin initial states "ones", "zero", "bump", or a path to an age,value CSV.
CapitalState resolve_state(const std::string& spec, const AgeGrid& grid);

/// Entry point; returns 0 on success, 1 on audit or runtime failure, 2 on usage/config errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vintage::cli

#include "selval/policy.hpp"

#include <cstdio>
#include <string>

#include "selval/error.hpp"
#include "overloaded.hpp"

namespace selval {

using detail::overloaded;

void validate_policy(const ThresholdPolicy& policy, int num_classes)
{
    auto check = [](double t) {
        if (!(t >= 0.0 && t <= kMaxThreshold)) {
            throw ValidationError("threshold " + std::to_string(t) + " outside [0, 1.000001]");
        }
    };
    std::visit(overloaded{[&](const GlobalThreshold& g) { check(g.tau); },
                          [&](const PerClassThreshold& p) {
                              if (p.taus.size() != num_classes) {
                                  throw ValidationError(
                                      "per-class policy needs one threshold per class");
                              }
                              for (Eigen::Index j = 0; j < p.taus.size(); ++j) {
                                  check(p.taus(j));
                              }
                          }},
               policy);
}

std::string describe(const ThresholdPolicy& policy)
{
    char buf[32];
    if (const auto* g = std::get_if<GlobalThreshold>(&policy)) {
        std::snprintf(buf, sizeof buf, "%.6f", g->tau);
        return buf;
    }
    const auto& taus = std::get<PerClassThreshold>(policy).taus;
    std::string out;
    for (Eigen::Index j = 0; j < taus.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.6f", taus(j));
        out += (j ? ";" : "");
        out += buf;
    }
    return out;
}

} // namespace selval

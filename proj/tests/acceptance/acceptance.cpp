// One line per acceptance criterion. Each criterion runs its bundled scenarios; every check inside
// compares against an oracle computed independently of the code path under test.
#include <cstdio>
#include <string>

#include <fmt/format.h>

#include "spraykit/scenario.hpp"

using namespace spraykit;

namespace {

std::string describe(const CheckResult& c) {
    if (c.relation == "in") return fmt::format("{}={:.4g} in [{:.4g},{:.4g}]", c.name, c.measured, c.threshold, c.upper);
    return fmt::format("{}={:.3g} {} {:.3g}", c.name, c.measured, c.relation, c.threshold);
}

} // namespace

int main() {
    int failed = 0;
    for (const auto& crit : acceptance_criteria()) {
        bool ok = true;
        double seconds = 0.0;
        std::string detail, failures;
        std::size_t checks = 0;
        for (const auto& name : crit.scenarios) {
            try {
                const RunReport r = execute(bundled_config(name));
                seconds += r.seconds;
                checks += r.checks.size();
                ok = ok && r.pass();
                for (const auto& c : r.checks)
                    if (!c.pass) failures += "\n    failed " + name + ": " + describe(c);
                // Headline: the check with the least margin.
                const CheckResult* tight = nullptr;
                double margin = 1e300;
                for (const auto& c : r.checks) {
                    double m = 0.0;
                    if (c.relation == "<" || c.relation == "<=")
                        m = c.threshold > 0 ? c.measured / c.threshold : (c.measured <= c.threshold ? 0.0 : 1e300);
                    else if (c.relation == ">")
                        m = c.measured > 0 ? c.threshold / c.measured : 1e300;
                    else
                        continue;
                    if (!tight || m > margin) {
                        tight = &c;
                        margin = m;
                    }
                }
                if (tight) detail += (detail.empty() ? "" : "; ") + describe(*tight);
            } catch (const std::exception& e) {
                ok = false;
                failures += fmt::format("\n    {}: {}", name, e.what());
            }
        }
        const bool timed = crit.max_seconds <= 0 || seconds < crit.max_seconds;
        if (!timed) failures += fmt::format("\n    runtime {:.2f} s exceeds {:.0f} s", seconds, crit.max_seconds);
        const bool pass = ok && timed && checks > 0;
        failed += pass ? 0 : 1;
        std::printf("%s [%d] %s: %zu checks, %.2f s%s; tightest %s%s\n", pass ? "PASS" : "FAIL", crit.id,
                    crit.title.c_str(), checks, seconds,
                    crit.max_seconds > 0 ? fmt::format(" (limit {:.0f} s)", crit.max_seconds).c_str() : "",
                    detail.c_str(), failures.c_str());
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(acceptance_criteria().size()) - failed,
                acceptance_criteria().size());
    return failed == 0 ? 0 : 1;
}

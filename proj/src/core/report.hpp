#ifndef RIEMOC_CORE_REPORT_HPP
#define RIEMOC_CORE_REPORT_HPP

#include <string>
#include <vector>

namespace riemoc {

/// One named check. `upper_bound` checks pass when value <= tolerance;
/// lower-bound checks (used to document expected mismatches) pass when
/// value >= tolerance.
struct CheckRecord {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool upper_bound = true;
    bool pass = false;
};

struct Report {
    std::vector<CheckRecord> checks;

    void add(std::string name, double value, double tolerance, bool upper_bound = true) {
        bool pass = upper_bound ? (value <= tolerance) : (value >= tolerance);
        checks.push_back({std::move(name), value, tolerance, upper_bound, pass});
    }

    bool overall_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    const CheckRecord* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

} // namespace riemoc

#endif

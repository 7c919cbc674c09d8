#pragma once

#include "core.hpp"

#include <json.hpp>

namespace schiffer {

struct Check {
    std::string name;
    std::string anchor; // identity or property the check exercises
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::string title;
    std::vector<Check> checks;
    nlohmann::json data = nlohmann::json::object();

    Check& add(std::string name, std::string anchor, double residual, double tol)
    {
        // NaN residuals fail.
        checks.push_back({std::move(name), std::move(anchor), residual, tol, residual <= tol});
        return checks.back();
    }

    bool pass() const
    {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    double worst() const
    {
        double w = 0.0;
        for (auto& c : checks) w = std::max(w, c.residual);
        return w;
    }

    void merge(const Report& r)
    {
        for (auto& c : r.checks) checks.push_back(c);
        for (auto& [k, v] : r.data.items()) data[k] = v;
    }

    nlohmann::json json() const
    {
        auto arr = nlohmann::json::array();
        for (auto& c : checks)
            arr.push_back({{"name", c.name}, {"anchor", c.anchor}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        return {{"title", title}, {"pass", pass()}, {"checks", arr}, {"data", data}};
    }
};

} // namespace schiffer

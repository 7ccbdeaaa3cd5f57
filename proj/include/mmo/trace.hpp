#ifndef MMO_TRACE_HPP
#define MMO_TRACE_HPP

#include "mmo/core_model.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace mmo {

struct TracePoint {
    std::uint64_t measurements = 0; // distinct measurements consumed so far
    double best_target = 0.0;       // best oriented f_t seen so far
};

// Best-so-far trajectory of one run, one point per distinct measurement.
struct RunTrace {
    std::vector<TracePoint> points;
    Configuration best_config;
    RawObjectives best_raw;

    [[nodiscard]] auto empty() const noexcept -> bool { return points.empty(); }
    [[nodiscard]] auto measurements() const noexcept -> std::uint64_t
    {
        return points.empty() ? 0 : points.back().measurements;
    }
    [[nodiscard]] auto best_target() const -> double
    {
        return points.empty() ? std::numeric_limits<double>::infinity() : points.back().best_target;
    }

    // Best target after `count` measurements; a run that stopped earlier keeps
    // its final value. Infinity before the first measurement.
    [[nodiscard]] auto best_at(std::uint64_t count) const -> double
    {
        if (points.empty() || count < points.front().measurements) {
            return std::numeric_limits<double>::infinity();
        }
        auto lo = std::size_t{0};
        auto hi = points.size();
        while (hi - lo > 1) {
            auto const mid = (lo + hi) / 2;
            if (points[mid].measurements <= count) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return points[lo].best_target;
    }

    void record(std::uint64_t count, Configuration const& config, RawObjectives const& raw)
    {
        if (points.empty() || raw.target < points.back().best_target) {
            best_config = config;
            best_raw = raw;
        }
        double const best = points.empty() ? raw.target : std::min(points.back().best_target, raw.target);
        points.push_back({count, best});
    }
};

} // namespace mmo

#endif

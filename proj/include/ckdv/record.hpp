#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ckdv/gevrey.hpp"

namespace ckdv {

/// One recorded snapshot of a simulation.
struct RecordRow {
    double t = 0.0;
    std::size_t step = 0;
    double l2_u = 0.0;
    double l2_v = 0.0;
    /// max(l2_u, l2_v)
    double pair_l2 = 0.0;
    /// Component Gevrey norms (s = 0) at RunRecord::gevrey_sigmas.
    std::vector<double> gevrey_u;
    std::vector<double> gevrey_v;
    std::optional<RadiusEstimate> radius_u;
    std::optional<RadiusEstimate> radius_v;
    /// ∫(u² + eta v²) when the record carries an eta.
    std::optional<double> invariant;
    /// Spatial means û_0, v̂_0.
    double mean_u = 0.0;
    double mean_v = 0.0;
    double max_abs_u = 0.0;
    double max_abs_v = 0.0;
};

enum class RunStatus { Completed, BlowUp, Failed };

std::string to_string(RunStatus s);

struct RunRecord {
    /// Fully resolved configuration text the run was produced from (may be empty).
    std::string config_snapshot;
    std::vector<double> gevrey_sigmas;
    std::optional<double> eta;
    double dt = 0.0;
    std::vector<RecordRow> rows;
    RunStatus status = RunStatus::Completed;
    std::string message;
    double wall_time_s = 0.0;
};

}  // namespace ckdv

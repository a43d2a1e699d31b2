#pragma once

#include <string>
#include <vector>

#include "blowup/bvp.hpp"
#include "blowup/profile.hpp"

namespace blowup {

enum class Direction { increasing, decreasing };
std::string to_string(Direction d);

struct BranchRecord {
    double p = 0.0;
    double sup_norm = 0.0;
    double residual_norm = 0.0;
    bool converged = false;
    int newton_iters = 0;
    int halvings = 0;        // step halvings used to reach this p
    double change_rate = 0.0;  // ||F - F_prev||_inf / |dp|
    std::string profile_ref;  // filled by the writer
};

enum class BranchEnd { completed, newton_failure, turning_suspected };
std::string to_string(BranchEnd e);

struct Branch {
    std::string label;
    double n = 0.0;
    Direction direction = Direction::increasing;
    std::vector<double> schedule;
    std::vector<BranchRecord> records;
    std::vector<Profile> profiles;  // converged profiles, parallel to converged records
    std::string stop_reason;
    bool schedule_completed = false;
};

struct BranchOptions {
    NewtonOptions newton{1e-8, 200, 30, 1e-4, 10};
    int max_halvings = 4;
    double max_step = 5e-2;
    double jump_factor = 10.0;  // warm-start contract violation threshold
    bool keep_profiles = true;
};

/// Uniform schedule from p_start to p_end (inclusive) with |dp| steps.
std::vector<double> make_schedule(double p_start, double p_end, double dp);

/// Natural-parameter continuation in p from a converged profile. Each step
/// copies the previous scaled profile as the Newton guess; failures and
/// warm-start jumps halve the step up to max_halvings times.
Branch trace_p_branch(const Profile& start, const std::vector<double>& schedule, const BranchOptions& opts = {},
                      const std::string& label = "");

struct CurvePoint {
    double p;
    double sup_norm;
    double residual;
    bool converged;
    double ratio_fstar;  // physical sup over f_*(p), equal to the scaled sup
};

struct BranchCurve {
    std::vector<CurvePoint> points;
    std::string stop_reason;
};

BranchCurve branch_summary(const Branch& branch);

struct TurningHeuristic {
    double rate_growth = 2.0;  // last change rate over the one two records back
};

/// turning_suspected when the change rates of the last three converged
/// records increase strictly, grow by rate_growth overall, and the last
/// accepted step needed halving.
BranchEnd detect_branch_end(const Branch& branch, const TurningHeuristic& h = {});

}  // namespace blowup

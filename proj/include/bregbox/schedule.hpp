#pragma once

#include <vector>

namespace bregbox {

enum class ScheduleKind { constant, polynomial, explicit_list };

/// Regularization parameter sequence alpha_k, k >= 1. All entries must be
/// positive and the sequence bounded; the polynomial kind is
/// alpha_k = c_alpha * k^{-s} with s >= 0.
class Schedule {
public:
    static Schedule constant(double alpha);
    static Schedule polynomial(double c_alpha, double s);
    static Schedule explicit_list(std::vector<double> values);

    ScheduleKind kind() const { return kind_; }
    double c_alpha() const { return c_alpha_; }
    double s() const { return s_; }
    const std::vector<double>& values() const { return values_; }

    /// alpha_k for 1-based k; throws std::out_of_range past an explicit list.
    double alpha(int k) const;

private:
    Schedule() = default;
    ScheduleKind kind_ = ScheduleKind::constant;
    double c_alpha_ = 1.0;
    double s_ = 0.0;
    std::vector<double> values_;
};

}  // namespace bregbox

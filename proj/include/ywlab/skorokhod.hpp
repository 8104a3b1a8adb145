#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ywlab {

/// Piecewise-linear, strictly increasing bijection of [0, T] with
/// knots (s_i, lambda(s_i)), lambda(0) = 0 and lambda(T) = T.
class TimeChange {
public:
    static TimeChange identity(double horizon);
    /// Knots must include both endpoints. Throws ValidationError for
    /// non-increasing knots or wrong endpoints.
    TimeChange(std::vector<double> knots, std::vector<double> images);

    double horizon() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& images() const { return images_; }

    double operator()(double t) const;
    TimeChange inverse() const;

private:
    std::vector<double> knots_;
    std::vector<double> images_;
};

/// outer o inner.
TimeChange compose(const TimeChange& outer, const TimeChange& inner);

/// sup |log((lambda(t) - lambda(s)) / (t - s))|, which for a piecewise-linear
/// lambda is the largest |log slope| over its segments.
double log_norm(const TimeChange& lambda);

/// Right-continuous vector-valued step path on [0, T] with finitely many
/// jumps; evaluates to the post-jump value at a jump time.
struct JumpPath {
    double horizon = 1.0;
    std::vector<double> initial;
    std::vector<double> jump_times;   ///< strictly increasing, in (0, T]
    std::vector<double> jump_values;  ///< row-major post-jump values

    std::size_t dimension() const { return initial.size(); }
    std::size_t jumps() const { return jump_times.size(); }
    /// Value after the k-th jump; k = 0 is the initial value.
    std::span<const double> level(std::size_t k) const;
    std::span<const double> value(double t) const;
    void validate() const;

    void add_jump(double t, std::span<const double> post_value);

    /// Step path through grid samples; a jump is recorded wherever the
    /// sampled value changes.
    static JumpPath from_samples(std::span<const double> times, std::span<const double> values,
                                 std::size_t dimension);
};

/// max(log_norm(lambda), sup_t |x(t) - y(lambda(t))|).
double skorokhod_objective(const JumpPath& x, const JumpPath& y, const TimeChange& lambda);

/// Uniform distance sup_t |x(t) - y(t)|.
double sup_distance(const JumpPath& x, const JumpPath& y);

struct D0Result {
    double distance = 0.0;
    TimeChange time_change = TimeChange::identity(1.0);
    /// Matched (x jump, y jump) index pairs.
    std::vector<std::pair<std::size_t, std::size_t>> matching;
};

/// Skorokhod distance inf_lambda max(log_norm(lambda), sup |x - y o lambda|)
/// by dynamic programming over monotone matchings of the jump times,
/// followed by a knot-insertion refinement.
D0Result d0_detail(const JumpPath& x, const JumpPath& y, int refinement_rounds = 3);

inline double d0(const JumpPath& x, const JumpPath& y) { return d0_detail(x, y).distance; }

}  // namespace ywlab

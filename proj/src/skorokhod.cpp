#include "ywlab/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ywlab/errors.hpp"

namespace ywlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------

TimeChange TimeChange::identity(double horizon) { return TimeChange({0.0, horizon}, {0.0, horizon}); }

TimeChange::TimeChange(std::vector<double> knots, std::vector<double> images)
    : knots_(std::move(knots)), images_(std::move(images)) {
    if (knots_.size() < 2 || knots_.size() != images_.size())
        throw ValidationError("time change needs matching knot and image lists with both endpoints");
    if (knots_.front() != 0.0 || images_.front() != 0.0 || !(knots_.back() > 0.0) || images_.back() != knots_.back())
        throw ValidationError("time change must fix 0 and T");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i] > knots_[i - 1])) throw ValidationError("time change knots must increase strictly");
        if (!(images_[i] > images_[i - 1]))
            throw ValidationError("time change must be strictly increasing (nonpositive slope)");
    }
}

double TimeChange::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= knots_.back()) return images_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double slope = (images_[k + 1] - images_[k]) / (knots_[k + 1] - knots_[k]);
    return images_[k] + (t - knots_[k]) * slope;
}

TimeChange TimeChange::inverse() const { return TimeChange(images_, knots_); }

TimeChange compose(const TimeChange& outer, const TimeChange& inner) {
    if (outer.horizon() != inner.horizon()) throw ValidationError("compose: time changes on different horizons");
    // knots of outer o inner: knots of inner plus preimages of outer's knots
    const TimeChange inner_inv = inner.inverse();
    std::vector<double> knots = inner.knots();
    for (double k : outer.knots()) knots.push_back(inner_inv(k));
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<double> images(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) images[i] = outer(inner(knots[i]));
    images.front() = 0.0;
    images.back() = outer.horizon();
    knots.front() = 0.0;
    knots.back() = outer.horizon();
    return TimeChange(std::move(knots), std::move(images));
}

double log_norm(const TimeChange& lambda) {
    const auto& k = lambda.knots();
    const auto& im = lambda.images();
    double worst = 0.0;
    for (std::size_t i = 1; i < k.size(); ++i) {
        const double slope = (im[i] - im[i - 1]) / (k[i] - k[i - 1]);
        if (!(slope > 0.0)) throw ValidationError("log_norm: nonpositive slope");
        worst = std::max(worst, std::abs(std::log(slope)));
    }
    return worst;
}

// ---------------------------------------------------------------------------

std::span<const double> JumpPath::level(std::size_t k) const {
    if (k == 0) return initial;
    return {jump_values.data() + (k - 1) * dimension(), dimension()};
}

std::span<const double> JumpPath::value(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return level(static_cast<std::size_t>(it - jump_times.begin()));
}

void JumpPath::validate() const {
    if (!(horizon > 0.0)) throw ValidationError("jump path horizon must be positive");
    if (jump_values.size() != jump_times.size() * dimension())
        throw ValidationError("jump path values do not match its jump times");
    for (std::size_t i = 0; i < jump_times.size(); ++i) {
        if (!(jump_times[i] > 0.0) || jump_times[i] > horizon)
            throw ValidationError("jump times must lie in (0, T]");
        if (i > 0 && !(jump_times[i] > jump_times[i - 1]))
            throw ValidationError("jump times must increase strictly");
    }
}

void JumpPath::add_jump(double t, std::span<const double> post_value) {
    if (post_value.size() != dimension()) throw ValidationError("jump value has the wrong dimension");
    jump_times.push_back(t);
    jump_values.insert(jump_values.end(), post_value.begin(), post_value.end());
}

JumpPath JumpPath::from_samples(std::span<const double> times, std::span<const double> values,
                                std::size_t dimension) {
    if (times.empty() || values.size() != times.size() * dimension)
        throw ValidationError("from_samples: values do not match the sample times");
    JumpPath p;
    p.horizon = times.back();
    p.initial.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(dimension));
    for (std::size_t i = 1; i < times.size(); ++i) {
        const auto cur = values.subspan(i * dimension, dimension);
        const auto prev = p.jumps() == 0 ? std::span<const double>(p.initial) : p.level(p.jumps());
        if (!std::equal(cur.begin(), cur.end(), prev.begin())) p.add_jump(times[i], cur);
    }
    return p;
}

// ---------------------------------------------------------------------------

namespace {

void check_pair(const JumpPath& x, const JumpPath& y) {
    x.validate();
    y.validate();
    if (x.horizon != y.horizon) throw ValidationError("paths live on different horizons");
    if (x.dimension() != y.dimension()) throw ValidationError("paths have different dimensions");
}

struct Event {
    double time;
    bool from_x;
    std::size_t level;
};

// sup over the events of |x - y|, starting from the given levels; events must
// be sorted by time. Stops early once `bound` is exceeded.
double sweep(const JumpPath& x, const JumpPath& y, std::size_t xl, std::size_t yl, const std::vector<Event>& events,
             double bound) {
    double worst = distance(x.level(xl), y.level(yl));
    std::size_t i = 0;
    while (i < events.size() && worst <= bound) {
        const double t = events[i].time;
        while (i < events.size() && events[i].time == t) {
            (events[i].from_x ? xl : yl) = events[i].level;
            ++i;
        }
        worst = std::max(worst, distance(x.level(xl), y.level(yl)));
    }
    return worst;
}

}  // namespace

double skorokhod_objective(const JumpPath& x, const JumpPath& y, const TimeChange& lambda) {
    check_pair(x, y);
    const double ln = log_norm(lambda);
    const TimeChange inv = lambda.inverse();
    std::vector<Event> events;
    events.reserve(x.jumps() + y.jumps());
    for (std::size_t k = 0; k < x.jumps(); ++k) events.push_back({x.jump_times[k], true, k + 1});
    for (std::size_t k = 0; k < y.jumps(); ++k) events.push_back({inv(y.jump_times[k]), false, k + 1});
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    return std::max(ln, sweep(x, y, 0, 0, events, kInf));
}

double sup_distance(const JumpPath& x, const JumpPath& y) {
    return skorokhod_objective(x, y, TimeChange::identity(x.horizon));
}

namespace {

class MatchingSolver {
public:
    MatchingSolver(const JumpPath& x, const JumpPath& y) : x_(x), y_(y), T_(x.horizon) {
        // jumps at T are aligned by every time change and are not matchable
        mx_ = static_cast<std::size_t>(std::lower_bound(x.jump_times.begin(), x.jump_times.end(), T_) -
                                       x.jump_times.begin());
        my_ = static_cast<std::size_t>(std::lower_bound(y.jump_times.begin(), y.jump_times.end(), T_) -
                                       y.jump_times.begin());
    }

    D0Result solve() {
        const std::size_t rows = mx_ + 1, cols = my_ + 1;
        std::vector<double> dp(rows * cols, kInf);
        std::vector<std::size_t> parent(rows * cols, kNone);
        dp[0] = 0.0;
        double best_end = kInf;
        std::size_t best_end_from = kNone;

        for (std::size_t ip = 0; ip <= mx_; ++ip) {
            for (std::size_t jp = 0; jp <= my_; ++jp) {
                const double base = dp[ip * cols + jp];
                if (!(base < best_end)) continue;
                const double a = sx(ip), c = sy(jp);

                const double end_cost = std::max({base, slope_cost(T_ - a, T_ - c), segment(ip, jp, kEnd, kEnd, best_end)});
                if (end_cost < best_end) {
                    best_end = end_cost;
                    best_end_from = ip * cols + jp;
                }

                for (std::size_t i = ip + 1; i <= mx_; ++i) {
                    const double ds = sx(i) - a;
                    const double bound = best_end;
                    const double lo_t = c + ds * std::exp(-bound);
                    const double hi_t = c + ds * std::exp(bound);
                    auto first = std::lower_bound(y_.jump_times.begin() + static_cast<std::ptrdiff_t>(jp),
                                                  y_.jump_times.begin() + static_cast<std::ptrdiff_t>(my_), lo_t);
                    for (auto it = first; it != y_.jump_times.begin() + static_cast<std::ptrdiff_t>(my_) && *it <= hi_t;
                         ++it) {
                        const std::size_t j = static_cast<std::size_t>(it - y_.jump_times.begin()) + 1;
                        if (j <= jp) continue;
                        double& target = dp[i * cols + j];
                        const double cost = std::max(base, slope_cost(ds, sy(j) - c));
                        const double limit = std::min(target, best_end);
                        if (!(cost < limit)) continue;
                        const double seg = segment(ip, jp, i, j, limit);
                        const double total = std::max(cost, seg);
                        if (total < target) {
                            target = total;
                            parent[i * cols + j] = ip * cols + jp;
                        }
                    }
                }
            }
        }

        D0Result out;
        std::vector<std::pair<std::size_t, std::size_t>> matched;
        for (std::size_t node = best_end_from; node != 0 && node != kNone; node = parent[node])
            matched.emplace_back(node / cols, node % cols);
        std::reverse(matched.begin(), matched.end());
        std::vector<double> knots{0.0}, images{0.0};
        for (auto [i, j] : matched) {
            knots.push_back(sx(i));
            images.push_back(sy(j));
            out.matching.emplace_back(i - 1, j - 1);
        }
        knots.push_back(T_);
        images.push_back(T_);
        out.time_change = TimeChange(std::move(knots), std::move(images));
        out.distance = best_end;
        return out;
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    static constexpr std::size_t kEnd = static_cast<std::size_t>(-2);

    double sx(std::size_t i) const { return i == 0 ? 0.0 : (i == kEnd ? T_ : x_.jump_times[i - 1]); }
    double sy(std::size_t j) const { return j == 0 ? 0.0 : (j == kEnd ? T_ : y_.jump_times[j - 1]); }

    static double slope_cost(double ds, double dt) { return std::abs(std::log(dt / ds)); }

    // sup |x(t) - y(lambda(t))| over [s_ip, s_i) for the linear piece of lambda
    // from (s_ip, t_jp) to (s_i, t_j); the final piece also covers t = T.
    double segment(std::size_t ip, std::size_t jp, std::size_t i, std::size_t j, double bound) const {
        const bool last = i == kEnd;
        const double a = sx(ip), b = sx(i), c = sy(jp), d = sy(j);
        const std::size_t x_end = last ? x_.jumps() : i - 1;  // unmatched x jumps ip+1..x_end
        const std::size_t y_end = last ? y_.jumps() : j - 1;
        events_.clear();
        for (std::size_t k = ip + 1; k <= x_end; ++k) events_.push_back({x_.jump_times[k - 1], true, k});
        const double scale = (b - a) / (d - c);
        for (std::size_t k = jp + 1; k <= y_end; ++k) {
            const double tau = y_.jump_times[k - 1];
            events_.push_back({tau == T_ && last ? T_ : a + (tau - c) * scale, false, k});
        }
        std::stable_sort(events_.begin(), events_.end(), [](const Event& p, const Event& q) { return p.time < q.time; });
        return sweep(x_, y_, ip, jp, events_, bound);
    }

    const JumpPath& x_;
    const JumpPath& y_;
    double T_;
    std::size_t mx_ = 0, my_ = 0;
    mutable std::vector<Event> events_;
};

}  // namespace

D0Result d0_detail(const JumpPath& x, const JumpPath& y, int refinement_rounds) {
    check_pair(x, y);
    MatchingSolver solver(x, y);
    D0Result result = solver.solve();

    // Knot insertion: try bending lambda at unmatched x jumps.
    static constexpr double kShifts[] = {-0.25, -0.125, 0.125, 0.25};
    for (int round = 0; round < refinement_rounds && result.distance > 0.0; ++round) {
        const auto& knots = result.time_change.knots();
        const auto& images = result.time_change.images();
        double best = result.distance;
        std::optional<TimeChange> best_lambda;
        for (double s : x.jump_times) {
            if (s >= x.horizon || std::binary_search(knots.begin(), knots.end(), s)) continue;
            const auto it = std::upper_bound(knots.begin(), knots.end(), s);
            const std::size_t k = static_cast<std::size_t>(it - knots.begin());
            const double lo = images[k - 1], hi = images[k];
            const double here = result.time_change(s);
            for (double theta : kShifts) {
                const double target = here + theta * (hi - lo);
                if (!(target > lo && target < hi)) continue;
                std::vector<double> nk = knots, ni = images;
                nk.insert(nk.begin() + static_cast<std::ptrdiff_t>(k), s);
                ni.insert(ni.begin() + static_cast<std::ptrdiff_t>(k), target);
                TimeChange cand(std::move(nk), std::move(ni));
                const double obj = skorokhod_objective(x, y, cand);
                if (obj < best) {
                    best = obj;
                    best_lambda = std::move(cand);
                }
            }
        }
        if (!best_lambda) break;
        result.distance = best;
        result.time_change = std::move(*best_lambda);
    }
    return result;
}

}  // namespace ywlab

#include "ywlab/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "ywlab/errors.hpp"

namespace ywlab {

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || steps == 0) throw ValidationError("TimeGrid::uniform: need T > 0 and at least one step");
    TimeGrid g;
    g.times.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        g.times[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    g.times.back() = horizon;
    return g;
}

void TimeGrid::validate() const {
    if (times.size() < 2) throw ValidationError("time grid needs at least two points");
    if (times.front() != 0.0) throw ValidationError("time grid must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ValidationError("time grid must be strictly increasing");
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
    if (times.empty()) return std::nullopt;
    const double tol = 1e-12 * std::max(1.0, horizon());
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it == times.end() || std::abs(*it - t) > tol) return std::nullopt;
    return static_cast<std::size_t>(it - times.begin());
}

std::size_t TimeGrid::require_index(double t) const {
    const auto idx = index_of(t);
    if (!idx) throw ValidationError("time " + std::to_string(t) + " is not on the grid");
    return *idx;
}

double WienerPath::value(std::size_t k, std::size_t i) const {
    double v = 0.0;
    for (std::size_t j = 1; j <= i; ++j) v += increment(j, k);
    return v;
}

WienerPath simulate_wiener(std::size_t modes, const TimeGrid& grid, const StreamKey& key) {
    if (modes == 0) throw ValidationError("simulate_wiener: need at least one mode");
    grid.validate();
    WienerPath w;
    w.grid = grid.times;
    w.modes = modes;
    const std::size_t m = grid.steps();
    w.increments.assign(m * modes, 0.0);
    for (std::size_t k = 0; k < modes; ++k) {
        Stream stream(key.with_tag(StreamTag::wiener).with_lane(k));
        for (std::size_t i = 1; i <= m; ++i) {
            const double dt = grid.times[i] - grid.times[i - 1];
            w.increments[(i - 1) * modes + k] = std::sqrt(dt) * stream.normal();
        }
    }
    return w;
}

PrmRealization simulate_prm(const IntensityMeasure& nu, std::size_t n_max, double horizon, const StreamKey& key) {
    if (!(horizon > 0.0)) throw ValidationError("simulate_prm: horizon must be positive");
    if (n_max > nu.layers.size()) throw RangeError("simulate_prm: layer cutoff beyond the ladder");
    PrmRealization eta;
    eta.horizon = horizon;
    eta.intensity_id = nu.id;
    eta.dimension = nu.dimension;
    eta.layers_simulated = n_max;

    struct Draw {
        PrmAtom atom;
        std::size_t offset;
    };
    std::vector<Draw> draws;
    std::vector<double> raw_marks;
    std::uint64_t seq = 0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto& layer = nu.layers[n - 1];
        Stream stream(key.with_tag(StreamTag::prm).with_lane(n));
        const std::uint64_t count = stream.poisson(layer.mass * horizon);
        for (std::uint64_t c = 0; c < count; ++c) {
            Draw d{{horizon * stream.uniform_open_closed(), n, seq++}, raw_marks.size()};
            raw_marks.resize(raw_marks.size() + nu.dimension);
            layer.law.sample(stream, std::span<double>(raw_marks.data() + d.offset, nu.dimension));
            draws.push_back(d);
        }
    }
    std::sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
        if (a.atom.time != b.atom.time) return a.atom.time < b.atom.time;
        if (a.atom.layer != b.atom.layer) return a.atom.layer < b.atom.layer;
        return a.atom.seq < b.atom.seq;
    });
    eta.atoms.reserve(draws.size());
    eta.marks.reserve(raw_marks.size());
    for (const auto& d : draws) {
        eta.atoms.push_back(d.atom);
        eta.marks.insert(eta.marks.end(), raw_marks.begin() + static_cast<std::ptrdiff_t>(d.offset),
                         raw_marks.begin() + static_cast<std::ptrdiff_t>(d.offset + nu.dimension));
    }

    if (n_max < nu.layers.size()) {
        IntensityMeasure tail = nu;
        tail.layers.assign(nu.layers.begin() + static_cast<std::ptrdiff_t>(n_max), nu.layers.end());
        eta.discarded_tail_bound = horizon * levy_integrability(tail, 2.0).value;
    }
    return eta;
}

std::uint64_t count_process(const PrmRealization& eta, const std::function<bool(Mark)>& in_set, double t) {
    return count_in_box(eta, in_set, 0.0, t);
}

std::uint64_t count_in_box(const PrmRealization& eta, const std::function<bool(Mark)>& in_set, double t0,
                           double t1) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double s = eta.atoms[i].time;
        if (s <= t0) continue;
        if (s > t1) break;
        if (in_set(eta.mark(i))) ++n;
    }
    return n;
}

CountingMeasure marks_as_counting_measure(const PrmRealization& eta, const IntensityMeasure& nu) {
    CountingMeasure mu;
    mu.ladder_id = nu.id;
    mu.ladder_size = nu.layers.size();
    mu.dimension = nu.dimension;
    for (std::size_t i = 0; i < eta.size(); ++i) mu.add(eta.mark(i), eta.atoms[i].layer);
    return mu;
}

NoiseBundle simulate_bundle(const NoiseConfig& config, std::uint64_t master_seed, std::uint64_t path_index) {
    config.grid.validate();
    const StreamKey base{master_seed, config.family, StreamTag::wiener, path_index, 0};
    NoiseBundle b;
    b.master_seed = master_seed;
    b.streams = {config.family, path_index};
    b.config_digest = config.config_digest;
    b.wiener = simulate_wiener(config.wiener_modes, config.grid, base);
    const std::size_t n_max = config.n_max == 0 ? config.intensity.layers.size() : config.n_max;
    b.prm = simulate_prm(config.intensity, n_max, config.grid.horizon(), base);
    const auto& law = config.initial;
    b.initial.resize(law.mean.size());
    Stream stream(base.with_tag(StreamTag::initial));
    for (std::size_t k = 0; k < law.mean.size(); ++k) {
        const double sd = k < law.sd.size() ? law.sd[k] : 0.0;
        const double z = stream.normal();
        b.initial[k] = sd == 0.0 ? law.mean[k] : law.mean[k] + sd * z;
    }
    return b;
}

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

bool bit_equal(const NoiseBundle& a, const NoiseBundle& b) {
    if (a.master_seed != b.master_seed || a.streams.family != b.streams.family || a.streams.path != b.streams.path ||
        a.config_digest != b.config_digest)
        return false;
    if (!same_bits(a.wiener.grid, b.wiener.grid) || a.wiener.modes != b.wiener.modes ||
        !same_bits(a.wiener.increments, b.wiener.increments))
        return false;
    const auto& pa = a.prm;
    const auto& pb = b.prm;
    if (!same_bits(pa.horizon, pb.horizon) || pa.intensity_id != pb.intensity_id || pa.dimension != pb.dimension ||
        pa.layers_simulated != pb.layers_simulated || !same_bits(pa.discarded_tail_bound, pb.discarded_tail_bound) ||
        pa.atoms.size() != pb.atoms.size() || !same_bits(pa.marks, pb.marks))
        return false;
    for (std::size_t i = 0; i < pa.atoms.size(); ++i) {
        if (!same_bits(pa.atoms[i].time, pb.atoms[i].time) || pa.atoms[i].layer != pb.atoms[i].layer ||
            pa.atoms[i].seq != pb.atoms[i].seq)
            return false;
    }
    return same_bits(a.initial, b.initial);
}

std::pair<NoiseView, NoiseView> split_at(const NoiseBundle& bundle, double t) {
    TimeGrid grid{bundle.wiener.grid};
    const std::size_t idx = grid.require_index(t);
    const double cut = grid.times[idx];
    const std::size_t modes = bundle.wiener.modes;

    auto make_view = [&](double start, double end) {
        NoiseView v;
        v.start = start;
        v.end = end;
        v.master_seed = bundle.master_seed;
        v.streams = bundle.streams;
        v.config_digest = bundle.config_digest;
        v.wiener.modes = modes;
        v.prm.horizon = bundle.prm.horizon;
        v.prm.intensity_id = bundle.prm.intensity_id;
        v.prm.dimension = bundle.prm.dimension;
        v.prm.layers_simulated = bundle.prm.layers_simulated;
        v.prm.discarded_tail_bound = bundle.prm.discarded_tail_bound;
        return v;
    };
    NoiseView past = make_view(0.0, cut);
    NoiseView future = make_view(cut, grid.horizon());

    past.wiener.grid.assign(grid.times.begin(), grid.times.begin() + static_cast<std::ptrdiff_t>(idx + 1));
    future.wiener.grid.assign(grid.times.begin() + static_cast<std::ptrdiff_t>(idx), grid.times.end());
    const auto split_inc = bundle.wiener.increments.begin() + static_cast<std::ptrdiff_t>(idx * modes);
    past.wiener.increments.assign(bundle.wiener.increments.begin(), split_inc);
    future.wiener.increments.assign(split_inc, bundle.wiener.increments.end());

    for (std::size_t i = 0; i < bundle.prm.size(); ++i) {
        NoiseView& target = bundle.prm.atoms[i].time <= cut ? past : future;
        target.prm.atoms.push_back(bundle.prm.atoms[i]);
        const auto m = bundle.prm.mark(i);
        target.prm.marks.insert(target.prm.marks.end(), m.begin(), m.end());
    }
    past.initial = bundle.initial;
    return {std::move(past), std::move(future)};
}

NoiseBundle merge(const NoiseView& past, const NoiseView& future) {
    if (past.end != future.start || past.wiener.modes != future.wiener.modes ||
        past.prm.intensity_id != future.prm.intensity_id || past.master_seed != future.master_seed)
        throw IncompatibleError("merge: views do not belong to one bundle");
    NoiseBundle b;
    b.master_seed = past.master_seed;
    b.streams = past.streams;
    b.config_digest = past.config_digest;
    b.wiener.modes = past.wiener.modes;
    b.wiener.grid = past.wiener.grid;
    if (!future.wiener.grid.empty())
        b.wiener.grid.insert(b.wiener.grid.end(), future.wiener.grid.begin() + 1, future.wiener.grid.end());
    b.wiener.increments = past.wiener.increments;
    b.wiener.increments.insert(b.wiener.increments.end(), future.wiener.increments.begin(),
                               future.wiener.increments.end());
    b.prm = past.prm;
    b.prm.atoms.insert(b.prm.atoms.end(), future.prm.atoms.begin(), future.prm.atoms.end());
    b.prm.marks.insert(b.prm.marks.end(), future.prm.marks.begin(), future.prm.marks.end());
    b.initial = past.initial;
    return b;
}

}  // namespace ywlab

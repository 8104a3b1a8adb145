#include "ywlab/stoch_integral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ywlab/errors.hpp"
#include "ywlab/numeric.hpp"

namespace ywlab {

std::size_t StepProcess::piece_index(double s) const {
    const auto it = std::lower_bound(partition.begin() + 1, partition.end(), s);
    const auto j = static_cast<std::size_t>(it - partition.begin());
    return std::min(j == 0 ? 0 : j - 1, pieces.size() - 1);
}

void StepProcess::validate() const {
    if (partition.size() < 2 || partition.front() != 0.0)
        throw ValidationError("step process partition must start at 0 and have at least one piece");
    for (std::size_t i = 1; i < partition.size(); ++i)
        if (!(partition[i] > partition[i - 1])) throw ValidationError("step process partition must increase");
    if (pieces.size() + 1 != partition.size()) throw ValidationError("one piece per partition interval is required");
    if (value_dim == 0) throw ValidationError("step process values need a positive dimension");
    for (const auto& piece : pieces) {
        if (!piece.value) throw ValidationError("step process piece without a value map");
        if (piece.amplitude_polynomial && value_dim != 1)
            throw ValidationError("amplitude polynomials are scalar");
    }
    if (!(p >= 1.0 && p <= 2.0)) throw ValidationError("integrability exponent must lie in [1, 2]");
}

StepProcess StepProcess::amplitude_polynomial(double horizon, double c0, double c1, double c2) {
    StepProcess xi;
    xi.partition = {0.0, horizon};
    StepPiece piece;
    piece.value = [c0, c1, c2](Mark z, std::span<double> out) { out[0] = c0 + z[0] * (c1 + c2 * z[0]); };
    piece.amplitude_polynomial = std::array<double, 3>{c0, c1, c2};
    piece.mark_independent = c1 == 0.0 && c2 == 0.0;
    xi.pieces.push_back(std::move(piece));
    return xi;
}

StepProcess StepProcess::single(double horizon, std::size_t value_dim,
                                std::function<void(Mark, std::span<double>)> f) {
    StepProcess xi;
    xi.partition = {0.0, horizon};
    xi.value_dim = value_dim;
    xi.pieces.push_back({std::move(f), std::nullopt, false});
    return xi;
}

// ---------------------------------------------------------------------------

namespace {

double norm_pow(std::span<const double> v, double p) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::pow(std::sqrt(s), p);
}

/// \int |xi_j|^p dnu over layers 1..layers.
double piece_p_moment(const StepPiece& piece, std::size_t dim, const IntensityMeasure& nu, std::size_t layers,
                      double p) {
    std::vector<double> buf(dim);
    double total = 0.0;
    for (std::size_t n = 0; n < layers; ++n) {
        const LayerSpec& layer = nu.layers[n];
        const double v = layer.integrate([&](Mark z) {
            piece.value(z, buf);
            return norm_pow(buf, p);
        });
        if (!std::isfinite(v))
            throw IntegrabilityError("integrand is not p-integrable on layer " + std::to_string(layer.index));
        total += v;
    }
    return total;
}

}  // namespace

Compensator compensator(const StepProcess& xi, const IntensityMeasure& nu, std::size_t layers) {
    xi.validate();
    if (layers > nu.layers.size()) throw RangeError("compensator: layer cutoff beyond the ladder");
    const std::size_t dim = xi.value_dim;
    Compensator out;
    out.value_dim = dim;
    out.rates.assign(xi.size() * dim, 0.0);
    out.standard_errors.assign(xi.size() * dim, 0.0);
    std::vector<double> buf(dim);
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const StepPiece& piece = xi.pieces[j];
        piece_p_moment(piece, dim, nu, layers, xi.p);
        for (std::size_t n = 0; n < layers; ++n) {
            const LayerSpec& layer = nu.layers[n];
            if (layer.mass == 0.0) continue;
            if (piece.amplitude_polynomial && layer.law.exact_moments()) {
                const auto& c = *piece.amplitude_polynomial;
                out.rates[j] += layer.mass * (c[0] + c[1] * layer.law.mean_amplitude() + c[2] * layer.law.abs_moment(2.0));
                continue;
            }
            const MarkQuadrature& q = layer.law.quadrature();
            std::vector<double> first(dim, 0.0), second(dim, 0.0);
            for (std::size_t i = 0; i < q.size(); ++i) {
                piece.value(q.mark(i), buf);
                for (std::size_t c = 0; c < dim; ++c) {
                    first[c] += q.weights[i] * buf[c];
                    second[c] += q.weights[i] * buf[c] * buf[c];
                }
            }
            for (std::size_t c = 0; c < dim; ++c) {
                if (!std::isfinite(first[c])) throw IntegrabilityError("compensator quadrature diverged");
                out.rates[j * dim + c] += layer.mass * first[c];
                if (!layer.law.exact_moments()) {
                    const double var = std::max(0.0, second[c] - first[c] * first[c]);
                    const double se = layer.mass * std::sqrt(var / static_cast<double>(q.size()));
                    double& acc = out.standard_errors[j * dim + c];
                    acc = std::sqrt(acc * acc + se * se);
                }
            }
        }
    }
    return out;
}

namespace {

void check_realization(const StepProcess& xi, const PrmRealization& eta, const IntensityMeasure& nu) {
    if (eta.intensity_id != nu.id) throw IncompatibleError("realization was drawn from a different intensity");
    if (eta.horizon > xi.horizon() * (1.0 + 1e-12))
        throw ValidationError("step process does not cover the realization horizon");
}

void accumulate_compensator(const StepProcess& xi, const Compensator& comp, double t, std::span<double> out) {
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double a = std::min(xi.partition[j], t), b = std::min(xi.partition[j + 1], t);
        if (b <= a) break;
        for (std::size_t c = 0; c < comp.value_dim; ++c) out[c] -= (b - a) * comp.rates[j * comp.value_dim + c];
    }
}

}  // namespace

std::vector<std::vector<double>> integrate_prm_step_on(const StepProcess& xi, const Compensator& comp,
                                                       const PrmRealization& eta, std::span<const double> times) {
    if (comp.value_dim != xi.value_dim || comp.rates.size() != xi.size() * xi.value_dim)
        throw ValidationError("compensator table does not match the integrand");
    if (eta.horizon > xi.horizon() * (1.0 + 1e-12))
        throw ValidationError("step process does not cover the realization horizon");
    const std::size_t dim = xi.value_dim;
    std::vector<std::vector<double>> result;
    result.reserve(times.size());
    std::vector<double> atoms_sum(dim, 0.0), buf(dim);
    std::size_t next = 0;
    double last = -1.0;
    for (double t : times) {
        if (t < 0.0 || t > xi.horizon()) throw ValidationError("integration time outside [0, T]");
        if (t < last) throw ValidationError("evaluation times must be nondecreasing");
        last = t;
        while (next < eta.size() && eta.atoms[next].time <= t) {
            const double s = eta.atoms[next].time;
            xi.pieces[xi.piece_index(s)].value(eta.mark(next), buf);
            for (std::size_t c = 0; c < dim; ++c) atoms_sum[c] += buf[c];
            ++next;
        }
        std::vector<double> value = atoms_sum;
        accumulate_compensator(xi, comp, t, value);
        result.push_back(std::move(value));
    }
    return result;
}

std::vector<std::vector<double>> integrate_prm_step_on(const StepProcess& xi, const PrmRealization& eta,
                                                       const IntensityMeasure& nu, std::span<const double> times) {
    check_realization(xi, eta, nu);
    return integrate_prm_step_on(xi, compensator(xi, nu, eta.layers_simulated), eta, times);
}

std::vector<double> integrate_prm_step(const StepProcess& xi, const PrmRealization& eta, const IntensityMeasure& nu,
                                       double t) {
    const double ts[] = {t};
    return std::move(integrate_prm_step_on(xi, eta, nu, ts).front());
}

std::vector<std::pair<double, std::vector<double>>> integral_jumps(const StepProcess& xi, const PrmRealization& eta) {
    xi.validate();
    const std::size_t dim = xi.value_dim;
    std::vector<std::pair<double, std::vector<double>>> out;
    std::vector<double> buf(dim);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double s = eta.atoms[i].time;
        xi.pieces[xi.piece_index(s)].value(eta.mark(i), buf);
        if (out.empty() || out.back().first != s) out.emplace_back(s, std::vector<double>(dim, 0.0));
        for (std::size_t c = 0; c < dim; ++c) out.back().second[c] += buf[c];
    }
    std::erase_if(out, [](const auto& jump) {
        return std::all_of(jump.second.begin(), jump.second.end(), [](double v) { return v == 0.0; });
    });
    return out;
}

double integrate_wiener(std::span<const double> sig, const WienerPath& w, double t) {
    TimeGrid grid{w.grid};
    const std::size_t idx = grid.require_index(t);
    if (sig.size() != w.steps() * w.modes) throw ValidationError("integrand needs one coefficient per cell and mode");
    double total = 0.0;
    for (std::size_t k = 0; k < w.modes; ++k)
        for (std::size_t i = 1; i <= idx; ++i) total += sig[(i - 1) * w.modes + k] * w.increment(i, k);
    return total;
}

double levy_from_prm(const PrmRealization& eta, const IntensityMeasure& nu, double t) {
    if (eta.intensity_id != nu.id) throw IncompatibleError("realization was drawn from a different intensity");
    if (t < 0.0 || t > eta.horizon) throw ValidationError("levy_from_prm: time outside [0, T]");
    double drift = 0.0;
    for (std::size_t n = 0; n < eta.layers_simulated; ++n) {
        const LayerSpec& layer = nu.layers[n];
        const double m1 = layer.law.mean_amplitude();
        if (!std::isfinite(m1)) throw IntegrabilityError("layer amplitude has no mean");
        drift += layer.mass * m1;
    }
    double jumps = 0.0;
    for (std::size_t i = 0; i < eta.size() && eta.atoms[i].time <= t; ++i) jumps += eta.mark(i)[0];
    return jumps - t * drift;
}

ContinuityReport continuity_bound_report(const StepProcess& xi, const IntensityMeasure& nu, double p,
                                         std::size_t samples, const MonteCarloSettings& mc) {
    xi.validate();
    if (!(p >= 1.0 && p <= 2.0)) throw ValidationError("continuity bound exponent must lie in [1, 2]");
    if (samples == 0) throw ValidationError("continuity bound needs at least one sample");
    const std::size_t layers = nu.layers.size();
    double rhs = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j)
        rhs += (xi.partition[j + 1] - xi.partition[j]) * piece_p_moment(xi.pieces[j], xi.value_dim, nu, layers, p);
    if (!std::isfinite(rhs)) throw IntegrabilityError("continuity bound: right-hand side diverges");

    const double T = xi.horizon();
    const Compensator comp = compensator(xi, nu, layers);
    const double at[] = {T};
    std::vector<double> draws(samples);
    parallel_for(samples, mc.threads, [&](std::size_t i) {
        const StreamKey key{mc.seed, mc.family, StreamTag::monte_carlo, i, 0};
        const PrmRealization eta = simulate_prm(nu, layers, T, key);
        draws[i] = norm_pow(integrate_prm_step_on(xi, comp, eta, at).front(), p);
    });
    const SampleMoments m = moments(draws);
    ContinuityReport r;
    r.samples = samples;
    r.lhs = m.mean;
    r.lhs_se = m.se();
    r.rhs = rhs;
    if (rhs == 0.0) {
        r.ratio = r.lhs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
        r.ratio = r.lhs / rhs;
        r.ratio_se = r.lhs_se / rhs;
    }
    return r;
}

// ---------------------------------------------------------------------------

void LevyTriplet::validate() const {
    const std::size_t d = dimension();
    if (Q.size() != d * d) throw ValidationError("Q must be a square matrix matching m");
    Eigen::MatrixXd q(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Q[i * d + j];
            if (std::abs(Q[i * d + j] - Q[j * d + i]) > 1e-12) throw ValidationError("Q is not symmetric");
        }
    if (d > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-12) throw ValidationError("Q is not positive semidefinite");
    }
    if (nu && nu->dimension != d) throw ValidationError("intensity dimension does not match the triplet");
}

std::complex<double> characteristic_function(const LevyTriplet& tr, std::span<const double> x, double t) {
    tr.validate();
    const std::size_t d = tr.dimension();
    if (x.size() != d) throw ValidationError("argument dimension does not match the triplet");
    double mx = 0.0, qxx = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        mx += tr.m[i] * x[i];
        for (std::size_t j = 0; j < d; ++j) qxx += tr.Q[i * d + j] * x[i] * x[j];
    }
    std::complex<double> jump(0.0, 0.0);
    if (tr.nu) {
        for (const LayerSpec& layer : tr.nu->layers) {
            if (layer.mass == 0.0) continue;
            const MarkQuadrature& q = layer.law.quadrature();
            std::complex<double> acc(0.0, 0.0);
            for (std::size_t i = 0; i < q.size(); ++i) {
                const Mark y = q.mark(i);
                double yx = 0.0, yy = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    yx += y[c] * x[c];
                    yy += y[c] * y[c];
                }
                const double small = std::sqrt(yy) < 1.0 ? yx : 0.0;
                acc += q.weights[i] * std::complex<double>(1.0 - std::cos(yx), -std::sin(yx) + small);
            }
            jump += layer.mass * acc;
        }
        if (!std::isfinite(jump.real()) || !std::isfinite(jump.imag()))
            throw IntegrabilityError("Levy exponent quadrature diverged");
    }
    const std::complex<double> exponent = std::complex<double>(-0.5 * qxx * t, mx * t) - t * jump;
    return std::exp(exponent);
}

// ---------------------------------------------------------------------------

StepProcess haar_projection(const JumpPath& path, unsigned k) {
    path.validate();
    const std::size_t pieces = std::size_t{1} << k;
    const double T = path.horizon;
    StepProcess out;
    out.value_dim = path.dimension();
    out.partition.resize(pieces + 1);
    for (std::size_t j = 0; j <= pieces; ++j) out.partition[j] = T * static_cast<double>(j) / static_cast<double>(pieces);
    out.partition.back() = T;
    for (std::size_t j = 0; j < pieces; ++j) {
        const auto v = path.value(out.partition[j]);
        std::vector<double> held(v.begin(), v.end());
        StepPiece piece;
        piece.value = [held](Mark, std::span<double> dst) { std::copy(held.begin(), held.end(), dst.begin()); };
        piece.mark_independent = true;
        out.pieces.push_back(std::move(piece));
    }
    return out;
}

double l2_distance(const JumpPath& path, const StepProcess& projection) {
    path.validate();
    projection.validate();
    if (projection.value_dim != path.dimension()) throw ValidationError("dimensions differ");
    if (projection.horizon() != path.horizon) throw ValidationError("horizons differ");
    for (const auto& piece : projection.pieces)
        if (!piece.mark_independent) throw ValidationError("l2_distance needs mark-independent pieces");

    std::vector<double> breaks = projection.partition;
    breaks.insert(breaks.end(), path.jump_times.begin(), path.jump_times.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double zero = 0.0;
    const Mark dummy(&zero, 1);
    std::vector<double> buf(path.dimension());
    double total = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double a = breaks[i - 1], b = breaks[i];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b);
        projection.pieces[projection.piece_index(mid)].value(dummy, buf);
        const auto v = path.value(a);
        double sq = 0.0;
        for (std::size_t c = 0; c < buf.size(); ++c) sq += (buf[c] - v[c]) * (buf[c] - v[c]);
        total += sq * (b - a);
    }
    return std::sqrt(total);
}

}  // namespace ywlab

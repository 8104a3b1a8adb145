#include "ywlab/measure_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "ywlab/errors.hpp"
#include "ywlab/numeric.hpp"

namespace ywlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper incomplete gamma Gamma(a, x), with Gamma(a, inf) = 0.
double upper_gamma(double a, double x) {
    if (std::isinf(x)) return 0.0;
    if (x <= 0.0) return boost::math::tgamma(a);
    return boost::math::tgamma(a, x);
}

std::uint64_t name_seed(const std::string& name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void symmetrize(std::vector<double>& nodes, std::vector<double>& weights) {
    const std::size_t n = nodes.size();
    nodes.reserve(2 * n);
    weights.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] *= 0.5;
        nodes.push_back(-nodes[i]);
        weights.push_back(weights[i]);
    }
}

void normalize(std::vector<double>& weights) {
    const double total = pairwise_sum(weights);
    if (total > 0.0)
        for (auto& w : weights) w /= total;
}

std::size_t panel_count(double width, const QuadratureResolution& res) {
    const auto by_width = static_cast<std::size_t>(std::ceil(width / res.amplitude_panel_width));
    return std::max(res.min_amplitude_panels, by_width);
}

MarkQuadrature build_amplitude_nodes(const AmplitudeLaw& law, const QuadratureResolution& res) {
    MarkQuadrature q;
    q.dimension = 1;
    std::visit(overloaded{
                   [&](const DiscreteAmplitude& d) {
                       q.marks = d.values;
                       q.weights = d.probabilities;
                   },
                   [&](const UniformMagnitude& u) {
                       auto rule = composite_gauss_legendre(u.lo, u.hi, panel_count(u.hi - u.lo, res));
                       q.marks = std::move(rule.nodes);
                       q.weights = std::move(rule.weights);
                       if (u.symmetric) symmetrize(q.marks, q.weights);
                   },
                   [&](const PowerExpMagnitude& p) {
                       const double hi = std::min(p.hi, p.lo + res.tail_cutoff);
                       auto rule = composite_gauss_legendre(p.lo, hi, panel_count(hi - p.lo, res));
                       for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                           const double r = rule.nodes[i];
                           rule.weights[i] *= std::pow(r, -p.alpha) * std::exp(-r);
                       }
                       q.marks = std::move(rule.nodes);
                       q.weights = std::move(rule.weights);
                       if (p.symmetric) symmetrize(q.marks, q.weights);
                   },
                   [&](const SampledAmplitude& s) {
                       if (!s.draw) return;
                       Stream stream(StreamKey{name_seed(s.name), 0, StreamTag::quadrature, 0, 0});
                       q.marks.resize(res.monte_carlo_samples);
                       for (auto& m : q.marks) m = s.draw(stream);
                       q.weights.assign(q.marks.size(), 1.0);
                   },
               },
               law);
    normalize(q.weights);
    return q;
}

MarkQuadrature build_location_nodes(std::size_t dims, double extent, const QuadratureResolution& res) {
    MarkQuadrature q;
    q.dimension = dims;
    if (dims == 0) {
        q.weights = {1.0};
        return q;
    }
    const auto rule = composite_gauss_legendre(0.0, extent, res.location_panels);
    const std::size_t per_dim = rule.nodes.size();
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= per_dim;
    q.marks.resize(total * dims);
    q.weights.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        double w = 1.0;
        for (std::size_t d = 0; d < dims; ++d) {
            const std::size_t j = rem % per_dim;
            rem /= per_dim;
            q.marks[idx * dims + d] = rule.nodes[j];
            w *= rule.weights[j];
        }
        q.weights[idx] = w;
    }
    normalize(q.weights);
    return q;
}

MarkQuadrature tensor(const MarkQuadrature& amp, const MarkQuadrature& loc) {
    MarkQuadrature q;
    q.dimension = 1 + loc.dimension;
    q.marks.reserve(amp.size() * loc.size() * q.dimension);
    q.weights.reserve(amp.size() * loc.size());
    for (std::size_t i = 0; i < amp.size(); ++i) {
        for (std::size_t j = 0; j < loc.size(); ++j) {
            q.marks.push_back(amp.marks[i]);
            const auto l = loc.mark(j);
            q.marks.insert(q.marks.end(), l.begin(), l.end());
            q.weights.push_back(amp.weights[i] * loc.weights[j]);
        }
    }
    return q;
}

}  // namespace

MarkLaw::MarkLaw(AmplitudeLaw amplitude, std::size_t location_dims, double location_extent,
                 QuadratureResolution resolution)
    : amplitude_(std::move(amplitude)), location_dims_(location_dims), location_extent_(location_extent) {
    if (location_dims_ > 2) throw ConfigError("MarkLaw: at most two location coordinates are supported");
    if (!(location_extent_ > 0.0)) throw ConfigError("MarkLaw: location extent must be positive");
    std::visit(overloaded{
                   [](const DiscreteAmplitude& d) {
                       if (d.values.empty() || d.values.size() != d.probabilities.size())
                           throw ConfigError("discrete amplitude: values and probabilities must match");
                       for (double p : d.probabilities)
                           if (!(p >= 0.0)) throw ConfigError("discrete amplitude: negative probability");
                   },
                   [](const UniformMagnitude& u) {
                       if (!(u.lo >= 0.0 && u.hi > u.lo && std::isfinite(u.hi)))
                           throw ConfigError("uniform magnitude: need 0 <= lo < hi < inf");
                   },
                   [](const PowerExpMagnitude& p) {
                       if (!(p.alpha < 1.0) || !(p.lo > 0.0) || !(p.hi > p.lo))
                           throw ConfigError("power-exp magnitude: need alpha < 1 and 0 < lo < hi");
                   },
                   [](const SampledAmplitude&) {},
               },
               amplitude_);
    auto amp = std::make_shared<MarkQuadrature>(build_amplitude_nodes(amplitude_, resolution));
    auto loc = std::make_shared<MarkQuadrature>(build_location_nodes(location_dims_, location_extent_, resolution));
    nodes_ = std::make_shared<MarkQuadrature>(tensor(*amp, *loc));
    amplitude_nodes_ = amp;
    location_nodes_ = loc;
}

double MarkLaw::sample_amplitude(Stream& stream) const {
    return std::visit(
        overloaded{
            [&](const DiscreteAmplitude& d) {
                double u = stream.uniform();
                double total = std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
                u *= total;
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    if (u < d.probabilities[i]) return d.values[i];
                    u -= d.probabilities[i];
                }
                return d.values.back();
            },
            [&](const UniformMagnitude& m) {
                const double r = m.lo + (m.hi - m.lo) * stream.uniform_open_closed();
                return m.symmetric ? stream.sign() * r : r;
            },
            [&](const PowerExpMagnitude& m) {
                const double s = 1.0 - m.alpha;
                const double u = stream.uniform_open_closed();
                double r;
                const double q_lo = boost::math::gamma_q(s, m.lo);
                const double q_hi = std::isinf(m.hi) ? 0.0 : boost::math::gamma_q(s, m.hi);
                const double q = q_lo - u * (q_lo - q_hi);
                if (q < 0.5) {
                    r = boost::math::gamma_q_inv(s, q);
                } else {
                    r = boost::math::gamma_p_inv(s, 1.0 - q);
                }
                r = std::clamp(r, std::nextafter(m.lo, kInf), m.hi);
                return m.symmetric ? stream.sign() * r : r;
            },
            [&](const SampledAmplitude& m) {
                if (!m.draw) throw ConfigError("sampled amplitude '" + m.name + "' has no sampler");
                return m.draw(stream);
            },
        },
        amplitude_);
}

void MarkLaw::sample(Stream& stream, std::span<double> out) const {
    out[0] = sample_amplitude(stream);
    for (std::size_t d = 0; d < location_dims_; ++d) out[1 + d] = location_extent_ * stream.uniform_open_closed();
}

double MarkLaw::abs_moment(double p) const {
    return std::visit(overloaded{
                          [&](const DiscreteAmplitude& d) {
                              double total = 0.0, acc = 0.0;
                              for (std::size_t i = 0; i < d.values.size(); ++i) {
                                  acc += d.probabilities[i] * std::pow(std::abs(d.values[i]), p);
                                  total += d.probabilities[i];
                              }
                              return acc / total;
                          },
                          [&](const UniformMagnitude& m) {
                              return (std::pow(m.hi, p + 1.0) - std::pow(m.lo, p + 1.0)) /
                                     ((p + 1.0) * (m.hi - m.lo));
                          },
                          [&](const PowerExpMagnitude& m) {
                              const double s = 1.0 - m.alpha;
                              const double num = upper_gamma(s + p, m.lo) - upper_gamma(s + p, m.hi);
                              const double den = upper_gamma(s, m.lo) - upper_gamma(s, m.hi);
                              return num / den;
                          },
                          [&](const SampledAmplitude& m) {
                              if (!m.draw) throw ConfigError("sampled amplitude '" + m.name + "' has no sampler");
                              const auto& q = *amplitude_nodes_;
                              double acc = 0.0;
                              for (std::size_t i = 0; i < q.size(); ++i)
                                  acc += q.weights[i] * std::pow(std::abs(q.marks[i]), p);
                              return acc;
                          },
                      },
                      amplitude_);
}

double MarkLaw::mean_amplitude() const {
    return std::visit(overloaded{
                          [&](const DiscreteAmplitude& d) {
                              double total = 0.0, acc = 0.0;
                              for (std::size_t i = 0; i < d.values.size(); ++i) {
                                  acc += d.probabilities[i] * d.values[i];
                                  total += d.probabilities[i];
                              }
                              return acc / total;
                          },
                          [&](const UniformMagnitude& m) { return m.symmetric ? 0.0 : 0.5 * (m.lo + m.hi); },
                          [&](const PowerExpMagnitude& m) { return m.symmetric ? 0.0 : abs_moment(1.0); },
                          [&](const SampledAmplitude& m) {
                              if (m.symmetric) return 0.0;
                              const auto& q = *amplitude_nodes_;
                              double acc = 0.0;
                              for (std::size_t i = 0; i < q.size(); ++i) acc += q.weights[i] * q.marks[i];
                              return acc;
                          },
                      },
                      amplitude_);
}

bool MarkLaw::symmetric() const {
    return std::visit(overloaded{
                          [](const DiscreteAmplitude& d) {
                              // symmetric iff the law of -a matches the law of a
                              for (std::size_t i = 0; i < d.values.size(); ++i) {
                                  double mirrored = 0.0;
                                  for (std::size_t j = 0; j < d.values.size(); ++j)
                                      if (d.values[j] == -d.values[i]) mirrored += d.probabilities[j];
                                  double same = 0.0;
                                  for (std::size_t j = 0; j < d.values.size(); ++j)
                                      if (d.values[j] == d.values[i]) same += d.probabilities[j];
                                  if (std::abs(mirrored - same) > 1e-15) return false;
                              }
                              return true;
                          },
                          [](const UniformMagnitude& m) { return m.symmetric; },
                          [](const PowerExpMagnitude& m) { return m.symmetric; },
                          [](const SampledAmplitude& m) { return m.symmetric; },
                      },
                      amplitude_);
}

bool MarkLaw::exact_moments() const { return !std::holds_alternative<SampledAmplitude>(amplitude_); }

double MarkLaw::size_lo() const {
    return std::visit(overloaded{
                          [](const DiscreteAmplitude& d) {
                              double lo = kInf;
                              for (double v : d.values) lo = std::min(lo, std::abs(v));
                              // sizes live in (lo, hi]; step just below the smallest atom
                              return std::nextafter(lo, -kInf);
                          },
                          [](const UniformMagnitude& m) { return m.lo; },
                          [](const PowerExpMagnitude& m) { return m.lo; },
                          [](const SampledAmplitude& m) { return m.lo; },
                      },
                      amplitude_);
}

double MarkLaw::size_hi() const {
    return std::visit(overloaded{
                          [](const DiscreteAmplitude& d) {
                              double hi = 0.0;
                              for (double v : d.values) hi = std::max(hi, std::abs(v));
                              return hi;
                          },
                          [](const UniformMagnitude& m) { return m.hi; },
                          [](const PowerExpMagnitude& m) { return m.hi; },
                          [](const SampledAmplitude& m) { return m.hi; },
                      },
                      amplitude_);
}

bool LayerSpec::contains(Mark z) const {
    if (z.size() != law.dimension()) return false;
    const double size = std::abs(z[0]);
    if (!(size > law.size_lo() && size <= law.size_hi())) return false;
    for (std::size_t d = 1; d < z.size(); ++d)
        if (!(z[d] > 0.0 && z[d] <= law.location_extent())) return false;
    return true;
}

double LayerSpec::integrate(const std::function<double(Mark)>& f) const {
    const auto& q = law.quadrature();
    std::vector<double> terms(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) terms[i] = q.weights[i] * f(q.mark(i));
    return mass * pairwise_sum(terms);
}

void IntensityMeasure::validate() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& layer = layers[i];
        if (layer.index != i + 1) throw ConfigError("intensity '" + id + "': layer indices must run 1..n");
        if (!(layer.mass >= 0.0) || !std::isfinite(layer.mass))
            throw ConfigError("intensity '" + id + "': layer masses must be finite and nonnegative");
        if (layer.law.dimension() != dimension)
            throw ConfigError("intensity '" + id + "': layer mark dimension differs from the measure's");
        if (symmetric && !layer.law.symmetric())
            throw ConfigError("intensity '" + id + "': declared symmetric but a layer law is not");
    }
}

double cumulative_mass(const IntensityMeasure& nu, std::size_t n) {
    if (n < 1 || n > nu.layers.size())
        throw RangeError("cumulative_mass: layer index " + std::to_string(n) + " outside 1.." +
                         std::to_string(nu.layers.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += nu.layers[i].mass;
    return total;
}

LevyIntegrability levy_integrability(const IntensityMeasure& nu, double p, double tail_tolerance) {
    if (!(p >= 1.0 && p <= 2.0)) throw RangeError("levy_integrability: p must lie in [1, 2]");
    LevyIntegrability out;
    for (const auto& layer : nu.layers) {
        const auto& law = layer.law;
        if (const auto* s = std::get_if<SampledAmplitude>(&law.amplitude()); s && !s->draw)
            throw ConfigError("levy_integrability: layer " + std::to_string(layer.index) +
                              " has neither moment data nor a sampler");
        double c;
        if (law.size_lo() >= 1.0) {
            c = layer.mass;
        } else if (law.size_hi() <= 1.0) {
            c = layer.moment(p);
        } else {
            const auto& q = law.amplitude_quadrature();
            double acc = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i)
                acc += q.weights[i] * std::min(1.0, std::pow(std::abs(q.marks[i]), p));
            c = layer.mass * acc;
        }
        out.layer_contributions.push_back(c);
        out.value += c;
    }
    if (!std::isfinite(out.value)) {
        out.cauchy_tail = false;
    } else if (!out.layer_contributions.empty() && out.value > 0.0) {
        out.cauchy_tail = out.layer_contributions.back() <= tail_tolerance * out.value;
    }
    return out;
}

SymmetryCheck check_symmetry(const IntensityMeasure& nu, std::size_t draws, std::uint64_t seed) {
    SymmetryCheck out;
    std::vector<double> buf(nu.dimension);
    for (const auto& layer : nu.layers) {
        Stream stream(StreamKey{seed, 0, StreamTag::monte_carlo, 0, layer.index});
        std::vector<double> amps(draws);
        for (auto& a : amps) {
            layer.law.sample(stream, buf);
            a = buf[0];
        }
        const auto m = moments(amps);
        const double bound = 4.0 * m.sd() / std::sqrt(static_cast<double>(draws));
        out.layer_means.push_back(m.mean);
        out.layer_bounds.push_back(bound);
        if (std::abs(m.mean) > bound) out.pass = false;
    }
    return out;
}

// ---------------------------------------------------------------------------

void CountingMeasure::add(Mark z, std::size_t layer) {
    if (z.size() != dimension) throw ValidationError("CountingMeasure::add: mark dimension mismatch");
    if (layer < 1 || layer > ladder_size) throw RangeError("CountingMeasure::add: layer outside the ladder");
    marks.insert(marks.end(), z.begin(), z.end());
    layers.push_back(layer);
}

bool atoms_in_layers(const CountingMeasure& mu, const IntensityMeasure& nu) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const std::size_t l = mu.layers[i];
        if (l < 1 || l > nu.layers.size()) return false;
        if (!nu.layers[l - 1].contains(mu.mark(i))) return false;
    }
    return true;
}

bool SeparatingFamily::summable(double tolerance) const {
    if (weights.size() != functions.size()) return false;
    double partial = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) return false;
        partial += w;
    }
    if (weights.empty()) return true;
    // geometric extrapolation of the tail from the last two weights
    if (weights.size() < 2) return weights.back() <= tolerance || std::isfinite(partial);
    const double ratio = weights.back() / weights[weights.size() - 2];
    if (ratio >= 1.0) return false;
    const double tail = weights.back() * ratio / (1.0 - ratio);
    return tail <= tolerance;
}

bool SeparatingFamily::bounded_on(const CountingMeasure& points) const {
    for (std::size_t i = 0; i < points.size(); ++i)
        for (const auto& f : functions)
            if (!(std::abs(f(points.mark(i))) <= 1.0)) return false;
    return true;
}

SeparatingFamily default_separating_family(std::size_t dimension, std::size_t terms) {
    static constexpr double kScales[] = {0.25, 0.5, 1.0, 2.0};
    SeparatingFamily fam;
    Stream stream(StreamKey{0x5e9a7a7eULL, 0, StreamTag::family, dimension, 0});
    for (std::size_t n = 0; n < terms; ++n) {
        std::vector<double> dir(dimension);
        double norm = 0.0;
        for (auto& c : dir) {
            c = stream.normal();
            norm += c * c;
        }
        norm = std::sqrt(norm);
        const double scale = kScales[n % 4];
        for (auto& c : dir) c *= scale / norm;
        fam.functions.emplace_back([dir](Mark x) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dir.size() && i < x.size(); ++i) dot += dir[i] * x[i];
            return std::tanh(dot);
        });
        fam.weights.push_back(std::ldexp(1.0, -static_cast<int>(n + 1)));
    }
    return fam;
}

CountingMeasure restrict(const CountingMeasure& mu, std::size_t n) {
    if (n < 1 || n > mu.ladder_size) throw RangeError("restrict: layer index outside the ladder");
    CountingMeasure out;
    out.ladder_id = mu.ladder_id;
    out.ladder_size = mu.ladder_size;
    out.dimension = mu.dimension;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.layers[i] <= n) out.add(mu.mark(i), mu.layers[i]);
    return out;
}

namespace {

double bounded(double x) { return x / (1.0 + x); }

// pairings[n][k] = <mu|_{S_{n+1}}, f_k>
std::vector<std::vector<double>> layered_pairings(const CountingMeasure& mu, const SeparatingFamily& fam,
                                                  std::size_t inner) {
    std::vector<std::vector<double>> by_layer(mu.ladder_size, std::vector<double>(inner, 0.0));
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k) by_layer[mu.layers[i] - 1][k] += fam.functions[k](mu.mark(i));
    for (std::size_t n = 1; n < by_layer.size(); ++n)
        for (std::size_t k = 0; k < inner; ++k) by_layer[n][k] += by_layer[n - 1][k];
    return by_layer;
}

}  // namespace

double d_S(const CountingMeasure& mu1, const CountingMeasure& mu2, const SeparatingFamily& family,
           std::size_t terms) {
    if (mu1.ladder_id != mu2.ladder_id || mu1.ladder_size != mu2.ladder_size || mu1.dimension != mu2.dimension)
        throw IncompatibleError("d_S: counting measures live on different ladders");
    if (family.weights.size() != family.functions.size())
        throw ConfigError("d_S: separating family needs one weight per function");
    const std::size_t inner = std::min(terms, family.size());
    const std::size_t outer = std::min({terms, family.size(), mu1.ladder_size});
    const auto p1 = layered_pairings(mu1, family, inner);
    const auto p2 = layered_pairings(mu2, family, inner);
    double total = 0.0;
    for (std::size_t n = 0; n < outer; ++n) {
        double layer_distance = 0.0;
        for (std::size_t k = 0; k < inner; ++k)
            layer_distance += family.weights[k] * bounded(std::abs(p1[n][k] - p2[n][k]));
        total += family.weights[n] * bounded(layer_distance);
    }
    return total;
}

}  // namespace ywlab

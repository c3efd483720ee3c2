#include "mhawkes/simulate.hpp"

#include "mhawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mhawkes {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const MarkSampler& sampler) {
    std::visit(overloaded{
                   [](const ConstantOneMarks&) {},
                   [](const EmpiricalMarks& m) {
                       if (m.pmf.empty()) throw InvalidParameter("empirical pmf is empty");
                       double total = 0.0;
                       for (double q : m.pmf) {
                           if (!(q >= 0.0)) throw InvalidParameter("pmf entries must be nonnegative");
                           total += q;
                       }
                       if (std::abs(total - 1.0) > 1e-12)
                           throw InvalidParameter("pmf must sum to one");
                   },
                   [](const ConditionalGeometricMarks& m) {
                       if (!(m.d >= 1.0)) throw InvalidParameter("geometric intercept d must be >= 1");
                       if (!(m.c >= 0.0)) throw InvalidParameter("geometric slope c must be >= 0");
                       if (!(m.U >= m.d)) throw InvalidParameter("geometric cap U must be >= d");
                   },
               },
               sampler);
}

double conservative_mark_bound(const MarkSampler& sampler) {
    return std::visit(overloaded{
                          [](const ConstantOneMarks&) { return 1.0; },
                          [](const EmpiricalMarks& m) {
                              double mean = 0.0;
                              for (std::size_t i = 0; i < m.pmf.size(); ++i)
                                  mean += static_cast<double>(i + 1) * m.pmf[i];
                              return mean;
                          },
                          [](const ConditionalGeometricMarks& m) { return m.U; },
                      },
                      sampler);
}

int sample_mark(const MarkSampler& sampler, double lambda, Rng& rng) {
    return std::visit(
        overloaded{
            [](const ConstantOneMarks&) { return 1; },
            [&rng](const EmpiricalMarks& m) {
                const double u = rng.uniform();
                double cum = 0.0;
                for (std::size_t i = 0; i < m.pmf.size(); ++i) {
                    cum += m.pmf[i];
                    if (u <= cum) return static_cast<int>(i + 1);
                }
                // u beyond the rounded cumulative mass: last positive entry
                for (std::size_t i = m.pmf.size(); i-- > 0;)
                    if (m.pmf[i] > 0.0) return static_cast<int>(i + 1);
                return 1;
            },
            [&rng, lambda](const ConditionalGeometricMarks& m) {
                const double mean = std::min(m.d + m.c * std::max(lambda, 0.0), m.U);
                const double p = 1.0 / mean;
                const double u = rng.uniform();
                if (p >= 1.0) return 1;
                const double k = std::ceil(std::log1p(-u) / std::log1p(-p));
                return std::max(1, static_cast<int>(k));
            },
        },
        sampler);
}

double Scenario::total_duration() const {
    return std::accumulate(segments.begin(), segments.end(), 0.0,
                           [](double acc, const Segment& s) { return acc + s.duration; });
}

namespace {

void check_scenario(const Scenario& scenario, double horizon) {
    if (scenario.segments.empty()) throw InvalidParameter("scenario has no segments");
    for (const auto& s : scenario.segments) {
        if (!(s.duration > 0.0)) throw InvalidParameter("segment durations must be positive");
        s.params.validate();
        validate(s.sampler);
    }
    const double total = scenario.total_duration();
    if (std::abs(total - horizon) > 1e-9 * std::max(1.0, horizon))
        throw InvalidParameter("scenario duration does not match the horizon");
}

[[noreturn]] void explode(double t, double rate, double guard) {
    std::ostringstream os;
    os << "intensity " << rate << " exceeded blow-up guard " << guard << " at t = " << t;
    throw ExplosionError(os.str(), t);
}

} // namespace

std::vector<std::string> stationarity_warnings(const Scenario& scenario) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scenario.segments.size(); ++i) {
        const auto& seg = scenario.segments[i];
        const double K = conservative_mark_bound(seg.sampler);
        const auto st = stationarity_check(seg.params, K);
        if (st.stationary) continue;
        std::ostringstream os;
        os << "segment " << i << " may be nonstationary: spectral value " << st.spectral
           << " >= 1 under the conservative mark bound K = " << K;
        out.push_back(os.str());
    }
    return out;
}

std::vector<std::string> stationarity_warnings(const FullParams& p, const MarkSampler& sampler) {
    const double K = conservative_mark_bound(sampler);
    const double w = 1.0 + (K - 1.0) * p.eta;
    const double a = w * p.alpha11 / p.beta11, b = w * p.alpha12 / p.beta12;
    const double c = w * p.alpha21 / p.beta21, d = w * p.alpha22 / p.beta22;
    // Perron root of the nonnegative 2x2 branching matrix.
    const double radius = 0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4.0 * b * c));
    if (radius < 1.0) return {};
    std::ostringstream os;
    os << "model may be nonstationary: branching spectral radius " << radius
       << " >= 1 under the conservative mark bound K = " << K;
    return {os.str()};
}

SimulationResult simulate_path(const Scenario& scenario, double horizon, Rng& rng,
                               const SimulationOptions& options) {
    check_scenario(scenario, horizon);
    SimulationResult result;
    result.stream.horizon = horizon;
    result.warnings = stationarity_warnings(scenario);

    // Segment list on the internal clock; an optional burn-in segment ends at 0.
    struct Phase {
        double end;
        const Segment* seg;
        bool record;
    };
    std::vector<Phase> phases;
    if (options.burn_in > 0.0) phases.push_back({0.0, &scenario.segments.front(), false});
    double end = 0.0;
    for (const auto& s : scenario.segments) {
        end += s.duration;
        phases.push_back({end, &s, true});
    }
    phases.back().end = horizon;

    const SymmetricParams* p = &phases.front().seg->params;
    // Excess of each intensity over the current baseline.
    double e1 = 0.0;
    double e2 = 0.0;
    if (options.burn_in <= 0.0 && options.initial) {
        e1 = options.initial->up - p->mu;
        e2 = options.initial->down - p->mu;
    }
    // Without burn-in the stream records lambda(0) only when it departs from the default.
    if (options.burn_in <= 0.0 && options.initial) result.stream.initial_intensity = *options.initial;

    std::vector<IntensityState> left;
    double t = options.burn_in > 0.0 ? -options.burn_in : 0.0;
    double last_event = -1.0;
    for (std::size_t ph = 0; ph < phases.size(); ++ph) {
        const Phase& phase = phases[ph];
        if (ph > 0) {
            const SymmetricParams* next = &phase.seg->params;
            e1 += p->mu - next->mu;
            e2 += p->mu - next->mu;
            p = next;
            if (!phases[ph - 1].record && phase.record)
                result.stream.initial_intensity = IntensityState{p->mu + e1, p->mu + e2};
        }
        const MarkSampler& sampler = phase.seg->sampler;
        while (true) {
            const double bound = 2.0 * p->mu + std::max(e1, 0.0) + std::max(e2, 0.0);
            if (!(bound <= options.blowup_guard)) explode(t, bound, options.blowup_guard);
            const double dt = rng.exponential(bound);
            if (t + dt >= phase.end) {
                const double decay = std::exp(-p->beta * (phase.end - t));
                e1 *= decay;
                e2 *= decay;
                t = phase.end;
                break;
            }
            const double decay = std::exp(-p->beta * dt);
            e1 *= decay;
            e2 *= decay;
            t += dt;
            const double l1 = p->mu + e1;
            const double l2 = p->mu + e2;
            if (l1 + l2 > bound * (1.0 + 1e-12))
                throw std::logic_error("thinning bound violated");
            const double u = rng.uniform() * bound;
            if (u >= l1 + l2) continue;
            const Side side = u < l1 ? Side::Up : Side::Down;
            const int k = sample_mark(sampler, side == Side::Up ? l1 : l2, rng);
            const double self = excitation_jump(p->alpha_s, k, p->eta);
            const double cross = excitation_jump(p->alpha_c, k, p->eta);
            if (phase.record) {
                double when = t;
                if (!(when > last_event)) when = std::nextafter(last_event, horizon);
                last_event = when;
                result.stream.events.push_back({when, side, k});
                left.push_back({l1, l2});
            }
            if (side == Side::Up) {
                e1 += self;
                e2 += cross;
            } else {
                e1 += cross;
                e2 += self;
            }
        }
    }
    result.intensity = IntensityPath(std::move(left));
    return result;
}

SimulationResult simulate_path(const Scenario& scenario, double horizon, std::uint64_t seed,
                               const SimulationOptions& options) {
    Rng rng(seed);
    return simulate_path(scenario, horizon, rng, options);
}

SimulationResult simulate_full(const FullParams& params, const MarkSampler& sampler, double horizon,
                               Rng& rng, const SimulationOptions& options) {
    params.validate();
    validate(sampler);
    if (!(horizon > 0.0)) throw InvalidParameter("horizon must be positive");
    SimulationResult result;
    result.stream.horizon = horizon;
    result.warnings = stationarity_warnings(params, sampler);

    const FullParams& p = params;
    double s11 = 0.0, s12 = 0.0, s21 = 0.0, s22 = 0.0;
    // Initial excess of each component, decaying at beta_ii.
    double e1 = 0.0, e2 = 0.0;
    if (options.burn_in <= 0.0 && options.initial) {
        e1 = options.initial->up - p.mu1;
        e2 = options.initial->down - p.mu2;
    }
    auto decay = [&](double dt) {
        s11 *= std::exp(-p.beta11 * dt);
        s12 *= std::exp(-p.beta12 * dt);
        s21 *= std::exp(-p.beta21 * dt);
        s22 *= std::exp(-p.beta22 * dt);
        e1 *= std::exp(-p.beta11 * dt);
        e2 *= std::exp(-p.beta22 * dt);
    };

    std::vector<IntensityState> left;
    double t = options.burn_in > 0.0 ? -options.burn_in : 0.0;
    double last_event = -1.0;
    bool started = false;
    auto start_session = [&] {
        // Channel states continue across time zero; the recorded initial
        // intensity is only a summary of them.
        if (options.burn_in > 0.0 || options.initial)
            result.stream.initial_intensity =
                IntensityState{p.mu1 + e1 + s11 + s12, p.mu2 + e2 + s21 + s22};
        started = true;
    };
    if (t >= 0.0) start_session();
    while (true) {
        const double bound = p.mu1 + p.mu2 + std::max(e1, 0.0) + std::max(e2, 0.0) + s11 + s12 +
                             s21 + s22;
        if (!(bound <= options.blowup_guard)) explode(t, bound, options.blowup_guard);
        const double dt = rng.exponential(bound);
        if (!started && t + dt >= 0.0) {
            decay(-t);
            t = 0.0;
            start_session();
            continue;
        }
        if (t + dt >= horizon) break;
        decay(dt);
        t += dt;
        const double l1 = p.mu1 + e1 + s11 + s12;
        const double l2 = p.mu2 + e2 + s21 + s22;
        if (l1 + l2 > bound * (1.0 + 1e-12)) throw std::logic_error("thinning bound violated");
        const double u = rng.uniform() * bound;
        if (u >= l1 + l2) continue;
        const Side side = u < l1 ? Side::Up : Side::Down;
        const int k = sample_mark(sampler, side == Side::Up ? l1 : l2, rng);
        const double w = excitation_jump(1.0, k, p.eta);
        if (started) {
            double when = t;
            if (!(when > last_event)) when = std::nextafter(last_event, horizon);
            last_event = when;
            result.stream.events.push_back({when, side, k});
            left.push_back({l1, l2});
        }
        if (side == Side::Up) {
            s11 += p.alpha11 * w;
            s21 += p.alpha21 * w;
        } else {
            s12 += p.alpha12 * w;
            s22 += p.alpha22 * w;
        }
    }
    result.intensity = IntensityPath(std::move(left));
    return result;
}

SimulationResult simulate_full(const FullParams& params, const MarkSampler& sampler, double horizon,
                               std::uint64_t seed, const SimulationOptions& options) {
    Rng rng(seed);
    return simulate_full(params, sampler, horizon, rng, options);
}

} // namespace mhawkes

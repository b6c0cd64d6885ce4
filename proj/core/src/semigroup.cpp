#include "rspde/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "rspde/errors.hpp"
#include "rspde/heat.hpp"
#include "rspde/parallel.hpp"

namespace rspde {

// Functional ---------------------------------------------------------------

std::string to_string(FunctionalKind kind) {
    switch (kind) {
        case FunctionalKind::exp_neg_pair: return "exp_neg_pair";
        case FunctionalKind::clipped_affine: return "clipped_affine";
        case FunctionalKind::bounded_cylinder: return "bounded_cylinder";
    }
    return "unknown";
}

FunctionalKind functional_kind_from_string(const std::string& name) {
    if (name == "exp_neg_pair") return FunctionalKind::exp_neg_pair;
    if (name == "clipped_affine") return FunctionalKind::clipped_affine;
    if (name == "bounded_cylinder") return FunctionalKind::bounded_cylinder;
    throw InvalidArgument("unknown functional kind '" + name + "'");
}

Functional::Functional(FunctionalKind kind, Field direction)
    : kind_(kind), direction_(std::move(direction)), dx_(1.0 / static_cast<double>(direction_.size() + 1)),
      direction_norm_(l2_norm(direction_, dx_)) {
    if (direction_.empty()) throw InvalidArgument("functional direction must be nonempty");
}

Functional Functional::exp_neg_pair(Field direction, double a, double offset) {
    if (!(a > 0.0)) throw InvalidArgument("exp_neg_pair: a must be positive");
    if (!(offset >= 0.0)) throw InvalidArgument("exp_neg_pair: offset must be nonnegative");
    Functional f(FunctionalKind::exp_neg_pair, std::move(direction));
    f.a_ = a;
    f.offset_ = offset;
    f.lo_ = offset;
    f.hi_ = offset + 1.0;
    return f;
}

Functional Functional::clipped_affine(Field direction, double offset, double lo, double hi) {
    if (!(lo <= hi)) throw InvalidArgument("clipped_affine: need lo <= hi");
    Functional f(FunctionalKind::clipped_affine, std::move(direction));
    f.offset_ = offset;
    f.lo_ = lo;
    f.hi_ = hi;
    return f;
}

Functional Functional::bounded_cylinder(Field direction, double threshold, double lo, double hi) {
    if (!(lo <= hi)) throw InvalidArgument("bounded_cylinder: need lo <= hi");
    Functional f(FunctionalKind::bounded_cylinder, std::move(direction));
    f.threshold_ = threshold;
    f.lo_ = lo;
    f.hi_ = hi;
    return f;
}

Functional Functional::constant(std::size_t n_space, double c) {
    return clipped_affine(Field(n_space, 0.0), c, c, c);
}

double Functional::operator()(std::span<const double> h) const {
    const double p = pairing(h);
    switch (kind_) {
        case FunctionalKind::exp_neg_pair: return offset_ + std::exp(-a_ * p * p);
        case FunctionalKind::clipped_affine: return std::clamp(offset_ + p, lo_, hi_);
        case FunctionalKind::bounded_cylinder: return p >= threshold_ ? hi_ : lo_;
    }
    return 0.0;
}

double Functional::grad_norm(std::span<const double> h) const {
    const double p = pairing(h);
    switch (kind_) {
        case FunctionalKind::exp_neg_pair: return 2.0 * a_ * std::abs(p) * std::exp(-a_ * p * p) * direction_norm_;
        case FunctionalKind::clipped_affine: {
            // The limsup at a kink is the slope of the active side.
            const double y = offset_ + p;
            return (lo_ < hi_ && y >= lo_ && y <= hi_) ? direction_norm_ : 0.0;
        }
        case FunctionalKind::bounded_cylinder:
            if (hi_ == lo_ || direction_norm_ == 0.0) return 0.0;
            return p == threshold_ ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return 0.0;
}

double Functional::lower_bound() const noexcept { return lo_; }
double Functional::upper_bound() const noexcept { return hi_; }

std::string Functional::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "(";
    switch (kind_) {
        case FunctionalKind::exp_neg_pair: os << "a=" << a_ << ",offset=" << offset_; break;
        case FunctionalKind::clipped_affine: os << "offset=" << offset_ << ",lo=" << lo_ << ",hi=" << hi_; break;
        case FunctionalKind::bounded_cylinder: os << "threshold=" << threshold_ << ",lo=" << lo_ << ",hi=" << hi_; break;
    }
    os << ",|phi|=" << direction_norm_ << ")";
    return os.str();
}

// Estimators ---------------------------------------------------------------

MCEstimate summarize(std::span<const double> samples, std::uint64_t seed) {
    MCEstimate est;
    est.n_paths = samples.size();
    est.seed = seed;
    if (samples.empty()) return est;
    const double n = static_cast<double>(samples.size());
    est.mean = pairwise_sum(samples) / n;
    if (samples.size() < 2) return est;
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = samples[i] - est.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    est.std_error = std::sqrt(var / n);
    return est;
}

MCEstimate variance_of(std::span<const double> samples, std::uint64_t seed) {
    MCEstimate est;
    est.n_paths = samples.size();
    est.seed = seed;
    if (samples.size() < 2) return est;
    const double n = static_cast<double>(samples.size());
    const double mean = pairwise_sum(samples) / n;
    std::vector<double> d2(samples.size()), d4(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = samples[i] - mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    const double m2 = pairwise_sum(d2) / n;
    const double m4 = pairwise_sum(d4) / n;
    est.mean = m2 * n / (n - 1.0);
    est.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return est;
}

namespace {

void check_setup(const Field& h, const EstimatorSetup& setup) {
    if (setup.n_paths < 2) throw InvalidArgument("estimators need n_paths >= 2");
    if (h.size() != setup.grid.n_space) throw InvalidArgument("initial field size does not match grid");
}

}  // namespace

std::vector<Field> simulate_ensemble(const Field& h, double t, const EstimatorSetup& setup) {
    check_setup(h, setup);
    if (!is_nonnegative(h)) throw InvalidArgument("initial field must be nonnegative (in K0)");
    const std::size_t steps = step_index(setup.grid, t);
    std::vector<Field> states(setup.n_paths);
    if (steps == 0) {
        std::fill(states.begin(), states.end(), h);
        return states;
    }
    SpaceTimeGrid grid = setup.grid;
    grid.n_steps = std::max(grid.n_steps, steps);
    parallel_for(
        setup.n_paths,
        [&](std::size_t j) {
            PathIntegrator integ(h, setup.mode, setup.model, grid, NoisePlan{setup.seed, j});
            integ.advance_to(steps);
            states[j] = integ.state();
        },
        setup.workers);
    return states;
}

std::vector<double> evaluate(const Functional& phi, const std::vector<Field>& states) {
    std::vector<double> values(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) values[j] = phi(states[j]);
    return values;
}

MCEstimate estimate_Pt(const Functional& phi, const Field& h, double t, const EstimatorSetup& setup) {
    const auto values = evaluate(phi, simulate_ensemble(h, t, setup));
    return summarize(values, setup.seed);
}

MCEstimate estimate_Pt_log(const Functional& phi, const Field& h, double t, const EstimatorSetup& setup) {
    if (!phi.strictly_positive())
        throw FunctionalContractError("log estimator needs a strictly positive functional, got " + phi.describe());
    auto values = evaluate(phi, simulate_ensemble(h, t, setup));
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!(values[j] >= phi.lower_bound()))
            throw FunctionalContractError("functional sample below declared lower bound on stream " +
                                          std::to_string(j));
        values[j] = std::log(values[j]);
    }
    return summarize(values, setup.seed);
}

MCEstimate estimate_variance(const Functional& phi, const Field& h, double t, const EstimatorSetup& setup) {
    const auto values = evaluate(phi, simulate_ensemble(h, t, setup));
    return variance_of(values, setup.seed);
}

std::vector<Field> direction_dictionary(std::size_t n_space, std::size_t n_modes, bool include_parts) {
    const double dx = 1.0 / static_cast<double>(n_space + 1);
    std::vector<Field> dirs;
    auto push_unit = [&](Field f) {
        const double norm = l2_norm(f, dx);
        if (norm > 0.0) dirs.push_back((1.0 / norm) * std::move(f));
    };
    for (std::size_t n = 1; n <= std::min(n_modes, n_space); ++n) {
        Field e = eigenfunction(n, n_space);
        push_unit(e);
        if (include_parts && n > 1) {
            push_unit(positive_part(e));
            push_unit(negative_part(e));
        }
    }
    return dirs;
}

double default_delta(const Field& h, double dx) { return 1e-3 * std::max(l2_norm(h, dx), 1.0); }

namespace {

// Projects onto K0 in place and returns the L2 distance moved.
double project_to_cone(Field& f, double dx) {
    double moved = 0.0;
    for (auto& v : f) {
        if (v < 0.0) {
            moved += v * v;
            v = 0.0;
        }
    }
    return std::sqrt(dx * moved);
}

}  // namespace

GradientEstimate estimate_grad_Pt(const Functional& phi, const Field& h, double t, const std::vector<Field>& directions,
                                  double delta, const EstimatorSetup& setup, bool coupled) {
    check_setup(h, setup);
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    const double dx = setup.grid.dx;

    GradientEstimate out;
    out.n_paths = setup.n_paths;
    out.seed = setup.seed;
    EstimatorSetup minus_setup = setup;
    if (!coupled) minus_setup.seed = mix64(setup.seed ^ 0x6a09e667f3bcc909ULL);

    bool any = false;
    for (std::size_t d = 0; d < directions.size(); ++d) {
        const Field& k = directions[d];
        if (k.size() != h.size()) throw InvalidArgument("direction size does not match grid");
        const double knorm = l2_norm(k, dx);
        if (std::abs(knorm - 1.0) > 1e-9) throw InvalidArgument("directions must have unit L2 norm");

        Field plus = h + delta * k;
        Field minus = h - delta * k;
        DirectionResult r;
        r.projection_distance = std::max(project_to_cone(plus, dx), project_to_cone(minus, dx));
        if (r.projection_distance > delta / 10.0) {
            r.rejected = true;
            out.notices.push_back("direction " + std::to_string(d) + " rejected: projection onto K0 moved " +
                                  std::to_string(r.projection_distance));
            out.directions.push_back(r);
            continue;
        }
        const double sep = l2_norm(plus - minus, dx);
        const auto up = evaluate(phi, simulate_ensemble(plus, t, setup));
        const auto down = evaluate(phi, simulate_ensemble(minus, t, minus_setup));
        std::vector<double> quotient(up.size());
        for (std::size_t j = 0; j < up.size(); ++j) quotient[j] = (up[j] - down[j]) / sep;
        const auto est = summarize(quotient, setup.seed);
        r.value = std::abs(est.mean);
        r.std_error = est.std_error;
        out.directions.push_back(r);
        if (!any || r.value > out.value) {
            out.value = r.value;
            out.std_error = r.std_error;
            out.best_direction = d;
            any = true;
        }
    }
    if (!any) out.notices.push_back("no admissible direction");
    return out;
}

std::string estimate_record_json(const MCEstimate& est, const std::string& functional, const std::string& h_id,
                                 double t) {
    nlohmann::ordered_json j;
    j["functional"] = functional;
    j["h_id"] = h_id;
    j["t"] = t;
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    j["n_paths"] = est.n_paths;
    j["seed"] = est.seed;
    return j.dump();
}

}  // namespace rspde

#include "thermistor/model.hpp"

#include "thermistor/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace thermistor {

double ConductivityFunction::eval(double xi) const {
    switch (kind) {
        case ConductivityKind::Constant:
            return parameter;
        case ConductivityKind::ShiftedSine:
            return 2.0 + std::sin(xi);
        case ConductivityKind::RationalBump:
            return 1.0 + 1.0 / (1.0 + xi * xi);
    }
    return parameter;
}

double ConductivityFunction::deriv(double xi) const {
    switch (kind) {
        case ConductivityKind::Constant:
            return 0.0;
        case ConductivityKind::ShiftedSine:
            return std::cos(xi);
        case ConductivityKind::RationalBump: {
            const double q = 1.0 + xi * xi;
            return -2.0 * xi / (q * q);
        }
    }
    return 0.0;
}

std::string ConductivityFunction::name() const {
    switch (kind) {
        case ConductivityKind::Constant: {
            std::ostringstream os;
            os.precision(17);
            os << "constant(" << parameter << ")";
            return os.str();
        }
        case ConductivityKind::ShiftedSine:
            return "shifted_sine";
        case ConductivityKind::RationalBump:
            return "rational_bump";
    }
    return "unknown";
}

ConductivityFunction builtin_conductivity(ConductivityKind kind, double constant_value) {
    ConductivityFunction f;
    f.kind = kind;
    switch (kind) {
        case ConductivityKind::Constant:
            if (!(constant_value > 0.0) || !std::isfinite(constant_value)) {
                throw ConfigError("constant conductivity must be positive and finite");
            }
            f.parameter = constant_value;
            f.lower_bound = constant_value;
            f.upper_const = constant_value;
            f.growth_exponent = 0.0;
            f.lipschitz_const = 1.0;
            break;
        case ConductivityKind::ShiftedSine:
            // 1 <= 2 + sin ξ <= 3
            f.lower_bound = 1.0;
            f.upper_const = 3.0;
            f.growth_exponent = 0.0;
            f.lipschitz_const = 1.0;
            break;
        case ConductivityKind::RationalBump:
            // 1 < f <= 2, sup|f'| = 3√3/8 at ξ = 1/√3
            f.lower_bound = 1.0;
            f.upper_const = 2.0;
            f.growth_exponent = 0.0;
            f.lipschitz_const = 0.65;
            break;
    }
    return f;
}

ConductivityFunction builtin_conductivity(std::string_view id) {
    if (id == "shifted_sine") return builtin_conductivity(ConductivityKind::ShiftedSine);
    if (id == "rational_bump") return builtin_conductivity(ConductivityKind::RationalBump);
    if (id == "constant") return builtin_conductivity(ConductivityKind::Constant, 1.0);

    constexpr std::string_view prefix = "constant(";
    if (id.size() > prefix.size() + 1 && id.substr(0, prefix.size()) == prefix && id.back() == ')') {
        const std::string arg(id.substr(prefix.size(), id.size() - prefix.size() - 1));
        char* end = nullptr;
        const double c = std::strtod(arg.c_str(), &end);
        if (end == arg.c_str() || *end != '\0') {
            throw ConfigError("malformed constant conductivity: " + std::string(id));
        }
        return builtin_conductivity(ConductivityKind::Constant, c);
    }
    throw ConfigError("unknown conductivity: " + std::string(id));
}

std::vector<std::string> check_conductivity(const ConductivityFunction& f, double lo, double hi, int samples) {
    std::vector<std::string> out;
    if (!(f.lower_bound > 0.0)) out.push_back("conductivity lower bound must be positive");
    if (!(f.growth_exponent >= 0.0)) out.push_back("conductivity growth exponent must be nonnegative");
    if (!(f.lipschitz_const > 0.0)) out.push_back("conductivity Lipschitz constant must be positive");
    if (!out.empty() || samples < 2) return out;

    constexpr double delta = 1e-5;
    bool lower_ok = true;
    bool growth_ok = true;
    bool lipschitz_ok = true;
    bool deriv_ok = true;

    const double dx = (hi - lo) / (samples - 1);
    double prev_x = lo;
    double prev_f = f.eval(lo);
    for (int i = 0; i < samples; ++i) {
        const double x = lo + i * dx;
        const double fx = f.eval(x);
        if (fx < f.lower_bound) lower_ok = false;
        if (fx > f.upper_const * (std::pow(std::abs(x), f.growth_exponent + 1.0) + 1.0)) growth_ok = false;
        if (i > 0 && std::abs(fx - prev_f) > f.lipschitz_const * std::abs(x - prev_x) * (1.0 + 1e-12)) {
            lipschitz_ok = false;
        }
        // centered difference error is O(δ²)·sup|f'''|; 1e-7 leaves room for round-off
        const double fd = (f.eval(x + delta) - f.eval(x - delta)) / (2.0 * delta);
        if (std::abs(fd - f.deriv(x)) > 1e-7) deriv_ok = false;
        prev_x = x;
        prev_f = fx;
    }
    if (!lower_ok) out.push_back("conductivity falls below its declared lower bound");
    if (!growth_ok) out.push_back("conductivity exceeds its declared growth bound");
    if (!lipschitz_ok) out.push_back("conductivity violates its declared Lipschitz constant");
    if (!deriv_ok) out.push_back("conductivity derivative disagrees with finite differences");
    return out;
}

int ModelParams::num_steps() const {
    if (!(time_step > 0.0) || !(horizon > 0.0)) return 0;
    return static_cast<int>(std::llround(horizon / time_step));
}

ModelParams make_params(double lambda,
                        double horizon,
                        double time_step,
                        int n_elements,
                        ConductivityFunction conductivity,
                        ControlBox box,
                        double initial_value) {
    ModelParams p;
    p.lambda = lambda;
    p.horizon = horizon;
    p.time_step = time_step;
    p.n_elements = n_elements;
    p.conductivity = conductivity;
    p.box = box;
    p.initial_temperature = Eigen::VectorXd::Constant(std::max(n_elements, 0) + 1, initial_value);
    return p;
}

std::vector<std::string> validate_params(const ModelParams& p) {
    std::vector<std::string> out;
    if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) out.push_back("lambda must be nonnegative and finite");
    if (!(p.horizon > 0.0) || !std::isfinite(p.horizon)) out.push_back("horizon must be positive");
    if (!(p.time_step > 0.0) || !std::isfinite(p.time_step)) out.push_back("time step must be positive");
    if (p.horizon > 0.0 && p.time_step > 0.0) {
        if (!(p.time_step < p.horizon)) out.push_back("time step must be smaller than the horizon");
        const double ratio = p.horizon / p.time_step;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
            out.push_back("horizon not an integer multiple of time step");
        }
    }
    if (p.n_elements < 2) out.push_back("mesh needs at least 2 elements");
    if (!(p.box.min > 0.0)) out.push_back("control lower bound must be positive");
    if (!(p.box.max >= p.box.min)) out.push_back("control upper bound must not be below the lower bound");
    if (p.initial_temperature.size() != p.n_elements + 1) {
        out.push_back("initial temperature must have one value per mesh node");
    } else if (!p.initial_temperature.allFinite()) {
        out.push_back("initial temperature must be finite at every node");
    }
    for (auto& v : check_conductivity(p.conductivity)) out.push_back(std::move(v));
    return out;
}

}  // namespace thermistor

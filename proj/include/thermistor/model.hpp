#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace thermistor {

enum class ConductivityKind { Constant, ShiftedSine, RationalBump };

/// Temperature-dependent electrical conductivity f(ξ) together with the
/// constants it declares for the growth/Lipschitz hypotheses.
///
/// The declared constants are not inferred from the function; they are
/// checked by sampling in check_conductivity().
struct ConductivityFunction {
    ConductivityKind kind = ConductivityKind::Constant;
    double parameter = 1.0;  // value c of constant(c); unused otherwise
    double lower_bound = 1.0;
    double upper_const = 1.0;  // f(ξ) <= upper_const * (|ξ|^(α+1) + 1)
    double growth_exponent = 0.0;
    double lipschitz_const = 1.0;

    double eval(double xi) const;
    double deriv(double xi) const;

    Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& xi) const {
        return xi.unaryExpr([this](double v) { return eval(v); });
    }
    Eigen::VectorXd deriv(const Eigen::Ref<const Eigen::VectorXd>& xi) const {
        return xi.unaryExpr([this](double v) { return deriv(v); });
    }

    std::string name() const;
};

/// Catalog entry. constant(c) requires c > 0.
ConductivityFunction builtin_conductivity(ConductivityKind kind, double constant_value = 1.0);

/// Parses "constant(2)", "constant", "shifted_sine" or "rational_bump".
ConductivityFunction builtin_conductivity(std::string_view id);

/// Sampled checks of the declared bounds on [lo, hi]; empty when all hold.
std::vector<std::string> check_conductivity(const ConductivityFunction& f,
                                            double lo = -10.0,
                                            double hi = 10.0,
                                            int samples = 10000);

/// Admissible box m <= β <= M.
struct ControlBox {
    double min = 0.1;
    double max = 1.0;

    double clamp(double v) const {
        // max-then-min, in this order, so ties resolve identically everywhere
        return std::min(std::max(v, min), max);
    }
};

struct ModelParams {
    double lambda = 1.0;
    double horizon = 1.0;
    ConductivityFunction conductivity;
    ControlBox box;
    Eigen::VectorXd initial_temperature;  // one value per mesh node
    int n_elements = 10;
    double time_step = 0.01;

    /// Number of time steps T/τ (levels are 0..num_steps()).
    int num_steps() const;
    int num_levels() const { return num_steps() + 1; }
};

/// Builds parameters with a spatially constant initial temperature.
ModelParams make_params(double lambda,
                        double horizon,
                        double time_step,
                        int n_elements,
                        ConductivityFunction conductivity,
                        ControlBox box,
                        double initial_value = 0.0);

/// Lists every violated invariant; empty when the parameters are usable.
std::vector<std::string> validate_params(const ModelParams& p);

}  // namespace thermistor

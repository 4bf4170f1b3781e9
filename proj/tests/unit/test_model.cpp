#include "thermistor/errors.hpp"
#include "thermistor/model.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace thermistor;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

ModelParams valid_params() {
    return make_params(1.0, 1.0, 0.01, 10, builtin_conductivity("shifted_sine"), ControlBox{0.1, 1.0});
}

}  // namespace

TEST_CASE("constant conductivity evaluates to its value with zero slope") {
    const auto f = builtin_conductivity("constant(2)");
    CHECK(f.eval(7.3) == 2.0);
    CHECK(f.deriv(7.3) == 0.0);
    CHECK(f.name() == "constant(2)");
}

TEST_CASE("shifted sine at the origin") {
    const auto f = builtin_conductivity("shifted_sine");
    CHECK(f.eval(0.0) == 2.0);
    CHECK(f.deriv(0.0) == 1.0);
}

TEST_CASE("rational bump values and slope") {
    const auto f = builtin_conductivity("rational_bump");
    CHECK(f.eval(0.0) == doctest::Approx(2.0));
    CHECK(f.eval(1.0) == doctest::Approx(1.5));
    CHECK(f.deriv(1.0) == doctest::Approx(-0.5));
}

TEST_CASE("conductivity vector overloads match scalar evaluation") {
    const auto f = builtin_conductivity("rational_bump");
    Eigen::VectorXd xi(3);
    xi << -1.0, 0.25, 4.0;
    const Eigen::VectorXd v = f.eval(xi);
    const Eigen::VectorXd d = f.deriv(xi);
    for (int i = 0; i < 3; ++i) {
        CHECK(v[i] == f.eval(xi[i]));
        CHECK(d[i] == f.deriv(xi[i]));
    }
}

TEST_CASE("catalog parsing rejects unknown names and nonpositive constants") {
    CHECK_THROWS_AS(builtin_conductivity("cosine"), ConfigError);
    CHECK_THROWS_AS(builtin_conductivity("constant(-1)"), ConfigError);
    CHECK_THROWS_AS(builtin_conductivity("constant(0)"), ConfigError);
    CHECK_THROWS_AS(builtin_conductivity("constant(abc)"), ConfigError);
    CHECK(builtin_conductivity("constant").eval(3.0) == 1.0);
}

TEST_CASE("every catalog conductivity passes the sampled hypothesis checks") {
    for (const char* id : {"constant(2)", "constant(0.5)", "shifted_sine", "rational_bump"}) {
        CAPTURE(id);
        CHECK(check_conductivity(builtin_conductivity(id), -10.0, 10.0, 10000).empty());
    }
}

TEST_CASE("sampled checks catch false declarations") {
    auto f = builtin_conductivity("shifted_sine");
    f.lower_bound = 1.5;  // 2 + sin dips to 1
    CHECK_FALSE(check_conductivity(f).empty());

    auto g = builtin_conductivity("rational_bump");
    g.lipschitz_const = 0.5;  // true sup|f'| is about 0.6495
    CHECK_FALSE(check_conductivity(g).empty());

    auto k = builtin_conductivity("shifted_sine");
    k.upper_const = 1.0;
    CHECK_FALSE(check_conductivity(k).empty());
}

TEST_CASE("control box clamps max then min") {
    const ControlBox box{0.1, 1.0};
    CHECK(box.clamp(0.5) == 0.5);
    CHECK(box.clamp(2.0) == 1.0);
    CHECK(box.clamp(-3.0) == 0.1);
    const ControlBox pinned{0.4, 0.4};
    CHECK(pinned.clamp(0.0) == 0.4);
    CHECK(pinned.clamp(9.0) == 0.4);
}

TEST_CASE("valid parameters produce no violations") {
    const auto p = valid_params();
    CHECK(validate_params(p).empty());
    CHECK(p.num_steps() == 100);
    CHECK(p.num_levels() == 101);
    CHECK(p.initial_temperature.size() == 11);
}

TEST_CASE("zero lower control bound is reported") {
    auto p = valid_params();
    p.box.min = 0.0;
    const auto v = validate_params(p);
    REQUIRE(v.size() == 1);
    CHECK(v.front() == "control lower bound must be positive");
}

TEST_CASE("non-integer level count is reported") {
    auto p = valid_params();
    p.time_step = p.horizon / 2.5;
    const auto v = validate_params(p);
    REQUIRE(v.size() == 1);
    CHECK(v.front() == "horizon not an integer multiple of time step");
}

TEST_CASE("each violation names its field") {
    auto p = valid_params();
    p.lambda = -1.0;
    p.n_elements = 1;
    p.box.max = 0.05;
    p.time_step = 2.0;
    const auto v = validate_params(p);
    CHECK(contains(v, "lambda must be nonnegative and finite"));
    CHECK(contains(v, "mesh needs at least 2 elements"));
    CHECK(contains(v, "control upper bound must not be below the lower bound"));
    CHECK(contains(v, "time step must be smaller than the horizon"));
    CHECK(contains(v, "initial temperature must have one value per mesh node"));
}

TEST_CASE("non-finite initial temperature is reported") {
    auto p = valid_params();
    p.initial_temperature[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK(contains(validate_params(p), "initial temperature must be finite at every node"));
}

TEST_CASE("validation is pure") {
    auto p = valid_params();
    p.box.min = -1.0;
    p.time_step = 0.3;
    const auto first = validate_params(p);
    const auto second = validate_params(p);
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("zero nonlocal strength is admissible") {
    auto p = valid_params();
    p.lambda = 0.0;
    CHECK(validate_params(p).empty());
}

#pragma once

// Lukasiewicz fuzzy logic operators and the per-attribute similarity kernel.
//
// All operators are closed form on doubles. They are written so that the
// boundary identities T(x,1)=x, S(x,0)=x, N(0)=1, N(1)=0 and commutativity
// hold bit-exactly, not just up to rounding.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace frule {

// A membership degree in [0,1].
class degree {
public:
    constexpr degree() = default;

    explicit degree(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw domain_error("degree out of [0,1]: " + std::to_string(v));
        }
    }

    constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

enum class operator_family { lukasiewicz };

inline std::string_view to_string(operator_family f) {
    switch (f) {
    case operator_family::lukasiewicz: return "lukasiewicz";
    }
    return "unknown";
}

inline operator_family parse_operator_family(std::string_view name) {
    if (name == "lukasiewicz") {
        return operator_family::lukasiewicz;
    }
    throw argument_error("unsupported operator family: " + std::string(name));
}

namespace ops {

// T_L(a,b) = max{0, a+b-1}. Operands are ordered so the result is symmetric
// and T(x,1) = x exactly.
constexpr double t_norm(double a, double b) noexcept {
    const double lo = a < b ? a : b;
    const double hi = a < b ? b : a;
    const double r = lo - (1.0 - hi);
    return r > 0.0 ? r : 0.0;
}

// S(a,b) = min{1, a+b}
constexpr double t_conorm(double a, double b) noexcept {
    const double r = a + b;
    return r < 1.0 ? r : 1.0;
}

// N(a) = 1-a
constexpr double negator(double a) noexcept { return 1.0 - a; }

// sigma(a,b) = max{0, b-a}, the residuation of S.
constexpr double s_residuation(double a, double b) noexcept {
    const double r = b - a;
    return r > 0.0 ? r : 0.0;
}

// theta_L(a,b) = min{1-a+b, 1}
constexpr double residuated_implication(double a, double b) noexcept {
    const double r = (1.0 - a) + b;
    return r < 1.0 ? r : 1.0;
}

// S(N(r), alpha): the discernibility score of a pair with similarity r.
constexpr double discernibility(double similarity, double alpha) noexcept {
    return t_conorm(negator(similarity), alpha);
}

// Unchecked similarity kernel 1-|u-v| for inputs already known to be in [0,1].
constexpr double similarity(double u, double v) noexcept {
    const double d = u < v ? v - u : u - v;
    return 1.0 - d;
}

} // namespace ops

inline degree t_norm(degree a, degree b) { return degree(ops::t_norm(a, b)); }
inline degree t_conorm(degree a, degree b) { return degree(ops::t_conorm(a, b)); }
inline degree negator(degree a) { return degree(ops::negator(a)); }
inline degree s_residuation(degree a, degree b) { return degree(ops::s_residuation(a, b)); }
inline degree residuated_implication(degree a, degree b) {
    return degree(ops::residuated_implication(a, b));
}

// R_a(x,y) = 1-|a(x)-a(y)| on normalized values. Values outside [0,1] mean
// the data was not normalized.
inline degree attribute_similarity(double v1, double v2) {
    if (!(v1 >= 0.0 && v1 <= 1.0) || !(v2 >= 0.0 && v2 <= 1.0)) {
        throw domain_error("attribute_similarity expects normalized values in [0,1]");
    }
    return degree(ops::similarity(v1, v2));
}

} // namespace frule

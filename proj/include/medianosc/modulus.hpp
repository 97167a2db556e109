#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "medianosc/error.hpp"

namespace medianosc {

/// A growth modulus phi for bmo_{s,phi}: nonnegative, nondecreasing, continuous.
class Modulus {
public:
    enum class Kind { Constant, Power, Log, Table };

    /// phi(u) = c; the plain BMO case.
    static Modulus constant(double c = 1.0) {
        detail::require(c > 0.0 && std::isfinite(c), ErrorCode::DegenerateModulus, "constant modulus needs c > 0");
        return Modulus(Kind::Constant, 0.0, c, {});
    }

    /// phi(u) = c * u^a.
    static Modulus power(double a, double c = 1.0) {
        detail::require(a > 0.0 && c > 0.0, ErrorCode::DegenerateModulus, "power modulus needs a, c > 0");
        return Modulus(Kind::Power, a, c, {});
    }

    /// phi(u) = c / (1 + ln+(1/u)).
    static Modulus log(double c = 1.0) {
        detail::require(c > 0.0, ErrorCode::DegenerateModulus, "log modulus needs c > 0");
        return Modulus(Kind::Log, 0.0, c, {});
    }

    /// Piecewise-linear through (u_i, phi_i), linear from the origin below u_0 and flat past the last knot.
    static Modulus table(std::vector<std::pair<double, double>> knots) {
        detail::require(!knots.empty(), ErrorCode::DegenerateModulus, "table modulus needs knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            detail::require(knots[i].first > 0.0 && knots[i].second >= 0.0, ErrorCode::DegenerateModulus,
                            "table knots need u > 0 and phi >= 0");
            if (i > 0)
                detail::require(knots[i].first > knots[i - 1].first && knots[i].second >= knots[i - 1].second,
                                ErrorCode::DegenerateModulus, "table must be increasing in u, nondecreasing in phi");
        }
        return Modulus(Kind::Table, 0.0, 1.0, std::move(knots));
    }

    /// "const[:c]", "power:a[:c]", "log[:c]"; tables are built by the caller.
    static Modulus parse(std::string_view spec) {
        std::vector<double> args;
        const auto colon = spec.find(':');
        const std::string_view name = spec.substr(0, colon);
        if (colon != std::string_view::npos) {
            std::string rest(spec.substr(colon + 1));
            std::size_t pos = 0;
            while (pos <= rest.size()) {
                const auto next = rest.find(':', pos);
                const std::string tok = rest.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
                try {
                    args.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    detail::fail(ErrorCode::InvalidParameter, "bad modulus argument '" + tok + "'");
                }
                if (next == std::string::npos) break;
                pos = next + 1;
            }
        }
        auto arg = [&](std::size_t i, double def) { return i < args.size() ? args[i] : def; };
        if (name == "const" || name == "constant") return constant(arg(0, 1.0));
        if (name == "power") {
            detail::require(!args.empty(), ErrorCode::InvalidParameter, "power modulus needs an exponent");
            return power(args[0], arg(1, 1.0));
        }
        if (name == "log") return log(arg(0, 1.0));
        detail::fail(ErrorCode::InvalidParameter, "unknown modulus '" + std::string(spec) + "'");
    }

    Kind kind() const { return kind_; }
    double exponent() const { return a_; }
    double scale() const { return c_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    double operator()(double u) const {
        switch (kind_) {
            case Kind::Constant: return c_;
            case Kind::Power: return c_ * std::pow(u, a_);
            case Kind::Log: return c_ / (1.0 + std::max(0.0, std::log(1.0 / u)));
            case Kind::Table: return table_value(u);
        }
        return 0.0;
    }

    /// phi evaluated at e^x, stable for very negative x.
    double at_log(double x) const {
        switch (kind_) {
            case Kind::Constant: return c_;
            case Kind::Power: return c_ * std::exp(a_ * x);
            case Kind::Log: return c_ / (1.0 + std::max(0.0, -x));
            case Kind::Table: return table_value(std::exp(x));
        }
        return 0.0;
    }

    bool vanishes_on_interval() const {
        return kind_ == Kind::Table && knots_.front().second == 0.0;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::Constant: return "const:" + num(c_);
            case Kind::Power: return "power:" + num(a_) + ":" + num(c_);
            case Kind::Log: return "log:" + num(c_);
            case Kind::Table: return "table:" + std::to_string(knots_.size()) + "-knots";
        }
        return "";
    }

private:
    Modulus(Kind kind, double a, double c, std::vector<std::pair<double, double>> knots)
        : kind_(kind), a_(a), c_(c), knots_(std::move(knots)) {}

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    double table_value(double u) const {
        if (u <= knots_.front().first) return knots_.front().second * u / knots_.front().first;
        if (u >= knots_.back().first) return knots_.back().second;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                                   [](double x, const std::pair<double, double>& k) { return x < k.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (u - lo.first) / (hi.first - lo.first);
        return lo.second + w * (hi.second - lo.second);
    }

    Kind kind_;
    double a_;
    double c_;
    std::vector<std::pair<double, double>> knots_;
};

/// Upper limit 2^n |Q0| of the Psi transform.
inline double psi_upper(double q0_measure, int dim) { return std::ldexp(q0_measure, dim); }

namespace detail {

// integral of phi(e^xi) d xi over [x, y]; the log substitution turns phi(v)/v dv into phi(e^xi) d xi
inline double psi_log_quadrature(const Modulus& phi, double x, double y) {
    if (x >= y) return 0.0;
    std::vector<double> cuts{x};
    if (phi.kind() == Modulus::Kind::Log && x < 0.0 && 0.0 < y) cuts.push_back(0.0);
    if (phi.kind() == Modulus::Kind::Table)
        for (const auto& k : phi.knots()) {
            const double lk = std::log(k.first);
            if (lk > x && lk < y) cuts.push_back(lk);
        }
    cuts.push_back(y);
    double total = 0.0;
    auto integrand = [&](double xi) { return phi.at_log(xi); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 20,
                                                                                1e-13, &err);
    }
    return total;
}

}  // namespace detail

/// Psi(u) with u given through x = ln u, so that u far below the double range stays usable.
inline double psi_integral_log(const Modulus& phi, double q0_measure, int dim, double x) {
    const double upper = psi_upper(q0_measure, dim);
    const double log_upper = std::log(upper);
    if (x > log_upper + 1e-15 * std::max(1.0, std::fabs(log_upper)))
        detail::fail(ErrorCode::DomainError, "u exceeds 2^n |Q0|");
    x = std::min(x, log_upper);
    switch (phi.kind()) {
        case Modulus::Kind::Constant: return phi.scale() * (log_upper - x);
        case Modulus::Kind::Power: {
            const double a = phi.exponent();
            return phi.scale() / a * (std::pow(upper, a) - std::exp(a * x));
        }
        case Modulus::Kind::Log:
        case Modulus::Kind::Table: return detail::psi_log_quadrature(phi, x, log_upper);
    }
    return 0.0;
}

/// Psi_{|Q0|}(u) = integral from u to 2^n |Q0| of phi(v)/v dv.
inline double psi_integral(const Modulus& phi, double q0_measure, int dim, double u) {
    const double upper = psi_upper(q0_measure, dim);
    if (!(u > 0.0) || u > upper * (1.0 + 1e-15))
        detail::fail(ErrorCode::DomainError, "u must lie in (0, 2^n |Q0|]");
    return psi_integral_log(phi, q0_measure, dim, std::log(std::min(u, upper)));
}

/// lim_{u -> 0+} Psi(u); infinite for the constant and log kinds.
inline double psi_at_zero(const Modulus& phi, double q0_measure, int dim) {
    const double upper = psi_upper(q0_measure, dim);
    switch (phi.kind()) {
        case Modulus::Kind::Constant:
        case Modulus::Kind::Log: return std::numeric_limits<double>::infinity();
        case Modulus::Kind::Power: return phi.scale() / phi.exponent() * std::pow(upper, phi.exponent());
        case Modulus::Kind::Table: {
            const auto& first = phi.knots().front();
            const double head = std::min(first.first, upper);
            return first.second * head / first.first + detail::psi_log_quadrature(phi, std::log(head), std::log(upper));
        }
    }
    return 0.0;
}

struct PsiInverse {
    double u = 0.0;
    double log_u = 0.0;
    /// y was at or beyond the finite limit Psi(0+); u is reported as 0+.
    bool clamped = false;
};

/// Solves Psi(u) = y by bisection on ln u to relative tolerance 1e-10.
inline PsiInverse psi_inverse(const Modulus& phi, double q0_measure, int dim, double y) {
    detail::require(y >= 0.0, ErrorCode::DomainError, "psi_inverse needs y >= 0");
    if (phi.vanishes_on_interval())
        detail::fail(ErrorCode::NonInvertible, "phi vanishes on an interval; Psi is not strictly decreasing");
    const double upper = psi_upper(q0_measure, dim);
    const double log_upper = std::log(upper);
    if (y == 0.0) return {upper, log_upper, false};
    const double limit = psi_at_zero(phi, q0_measure, dim);
    if (y >= limit) return {0.0, -std::numeric_limits<double>::infinity(), true};

    double hi = log_upper;  // Psi(hi) = 0 < y
    double step = 1.0;
    double lo = hi - step;
    while (psi_integral_log(phi, q0_measure, dim, lo) < y) {
        hi = lo;
        step *= 2.0;
        lo = hi - step;
        if (step > 1e300) detail::fail(ErrorCode::NonInvertible, "failed to bracket Psi^{-1}");
    }
    while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        if (psi_integral_log(phi, q0_measure, dim, mid) >= y)
            lo = mid;
        else
            hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    return {std::exp(x), x, false};
}

}  // namespace medianosc

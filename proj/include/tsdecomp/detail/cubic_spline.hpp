#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsdecomp/error.hpp"

namespace tsdecomp::detail {

/// Natural cubic interpolating spline through (x_i, y_i), x strictly increasing.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::span<const double> x, std::span<const double> y)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 2) throw_parameter("NaturalCubicSpline: need at least two knots");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw_parameter("NaturalCubicSpline: knots must be strictly increasing");
        if (n == 2) return;

        // Thomas algorithm for the second-derivative system, M_0 = M_{n-1} = 0.
        const std::size_t k = n - 2;
        std::vector<double> diag(k), upper(k), rhs(k);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            diag[i - 1] = (h0 + h1) / 3.0;
            upper[i - 1] = h1 / 6.0;
            rhs[i - 1] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
        }
        for (std::size_t i = 1; i < k; ++i) {
            const double lower = (x_[i + 1] - x_[i]) / 6.0;
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        std::vector<double> sol(k);
        sol[k - 1] = rhs[k - 1] / diag[k - 1];
        for (std::size_t i = k - 1; i-- > 0;) sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
        for (std::size_t i = 0; i < k; ++i) m_[i + 1] = sol[i];
    }

    [[nodiscard]] double operator()(double t) const {
        const std::size_t n = x_.size();
        std::size_t lo = 0;
        if (t >= x_[n - 1]) {
            lo = n - 2;
        } else if (t > x_[0]) {
            std::size_t a = 0, b = n - 1;
            while (b - a > 1) {
                const std::size_t mid = (a + b) / 2;
                (x_[mid] <= t ? a : b) = mid;
            }
            lo = a;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double a = (x_[lo + 1] - t) / h;
        const double b = (t - x_[lo]) / h;
        return a * y_[lo] + b * y_[lo + 1] +
               ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[lo + 1]) * h * h / 6.0;
    }

    /// Values at t = 0, 1, ..., n - 1.
    [[nodiscard]] std::vector<double> sample(std::size_t n) const {
        std::vector<double> out(n);
        for (std::size_t t = 0; t < n; ++t) out[t] = (*this)(static_cast<double>(t));
        return out;
    }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

} // namespace tsdecomp::detail

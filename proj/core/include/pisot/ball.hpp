#ifndef PISOT_BALL_HPP
#define PISOT_BALL_HPP

#include <algorithm>
#include <cmath>
#include <complex>

#include <gmpxx.h>

namespace pisot {

/* Complex midpoint-radius ball. Every operation widens the radius by a
 * bound on its own rounding error, so the true value stays inside. */
struct Ball {
    std::complex<double> mid{0.0, 0.0};
    double rad = 0.0;

    static constexpr double eps = 0x1p-51;

    Ball() = default;
    Ball(std::complex<double> m, double r) : mid(m), rad(r) {}
    explicit Ball(double x) : mid(x, 0.0), rad(0.0) {}

    static Ball from_rational(mpq_class const& q)
    {
        double d = q.get_d();
        if (mpq_class(d) == q)
            return Ball(d);
        return Ball({d, 0.0}, std::abs(d) * eps + 0x1p-1070);
    }

    double abs_mid() const { return std::abs(mid); }
    /* enclosure of |x| */
    double abs_lo() const { return std::max(0.0, abs_mid() * (1 - eps) - rad); }
    double abs_hi() const { return (abs_mid() + rad) * (1 + eps); }
    double re_lo() const { return mid.real() - rad - std::abs(mid.real()) * eps; }
    double re_hi() const { return mid.real() + rad + std::abs(mid.real()) * eps; }
    bool contains_zero() const { return abs_lo() <= 0.0; }
};

inline Ball operator+(Ball const& a, Ball const& b)
{
    Ball r;
    r.mid = a.mid + b.mid;
    r.rad = (a.rad + b.rad + std::abs(r.mid) * Ball::eps) * (1 + Ball::eps);
    return r;
}

inline Ball operator-(Ball const& a, Ball const& b)
{
    Ball r;
    r.mid = a.mid - b.mid;
    r.rad = (a.rad + b.rad + std::abs(r.mid) * Ball::eps) * (1 + Ball::eps);
    return r;
}

inline Ball operator-(Ball const& a) { return Ball(-a.mid, a.rad); }

inline Ball operator*(Ball const& a, Ball const& b)
{
    Ball r;
    r.mid = a.mid * b.mid;
    double am = std::abs(a.mid), bm = std::abs(b.mid);
    r.rad = (am * b.rad + bm * a.rad + a.rad * b.rad + 4 * am * bm * Ball::eps) * (1 + 2 * Ball::eps);
    return r;
}

inline Ball conj(Ball const& a) { return Ball(std::conj(a.mid), a.rad); }

} // namespace pisot

#endif

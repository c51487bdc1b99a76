#include "seagle/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seagle/errors.hpp"

namespace seagle {
namespace sf {

namespace {

void check_arg(double x, const char* fn) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidInputError(std::string(fn) + ": argument must be positive and finite");
}

}  // namespace

std::vector<double> bessel_j_array(int nmax, double x) {
    check_arg(x, "bessel_j_array");
    if (nmax < 0) throw InvalidInputError("bessel_j_array: nmax must be >= 0");
    std::vector<double> j(static_cast<std::size_t>(nmax) + 1, 0.0);

    // Start the downward recurrence well above both nmax and x.
    int start = nmax + static_cast<int>(2.0 * std::sqrt(40.0 + 40.0 * nmax)) +
                static_cast<int>(1.2 * x) + 40;
    if (start % 2) ++start;

    double jp = 0.0;      // J_{k+1} (unnormalized)
    double jc = 1e-300;   // J_k
    double norm = 0.0;    // J_0 + 2 sum_{m>=1} J_{2m}
    for (int k = start; k >= 1; --k) {
        double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        int n = k - 1;
        if (n <= nmax) j[static_cast<std::size_t>(n)] = jc;
        if (n % 2 == 0) norm += (n == 0) ? jc : 2.0 * jc;
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (double& v : j) v *= 1e-250;
        }
    }
    for (double& v : j) v /= norm;
    return j;
}

std::vector<double> bessel_y_array(int nmax, double x) {
    check_arg(x, "bessel_y_array");
    if (nmax < 0) throw InvalidInputError("bessel_y_array: nmax must be >= 0");
    std::vector<double> y(static_cast<std::size_t>(nmax) + 1, 0.0);
    // Seeds from the standard library; the upward recurrence is stable for Y.
    y[0] = std::cyl_neumann(0, x);
    if (nmax >= 1) y[1] = std::cyl_neumann(1, x);
    for (int n = 2; n <= nmax; ++n)
        y[static_cast<std::size_t>(n)] = (2.0 * (n - 1) / x) * y[static_cast<std::size_t>(n - 1)] -
                                         y[static_cast<std::size_t>(n - 2)];
    return y;
}

double bessel_j(int n, double x) { return bessel_j_array(n, x)[static_cast<std::size_t>(n)]; }

double bessel_y(int n, double x) { return bessel_y_array(n, x)[static_cast<std::size_t>(n)]; }

std::complex<double> hankel1(int n, double x) {
    return {bessel_j(n, x), bessel_y(n, x)};
}

std::vector<double> sph_bessel_j_array(int nmax, double x) {
    check_arg(x, "sph_bessel_j_array");
    if (nmax < 0) throw InvalidInputError("sph_bessel_j_array: nmax must be >= 0");
    std::vector<double> j(static_cast<std::size_t>(nmax) + 1, 0.0);
    const double j0 = std::sin(x) / x;
    if (nmax == 0) {
        j[0] = j0;
        return j;
    }
    int start = nmax + static_cast<int>(2.0 * std::sqrt(40.0 + 40.0 * nmax)) +
                static_cast<int>(1.2 * x) + 40;
    double jp = 0.0, jc = 1e-300;
    for (int l = start; l >= 1; --l) {
        double jm = ((2.0 * l + 1.0) / x) * jc - jp;
        jp = jc;
        jc = jm;
        int n = l - 1;
        if (n <= nmax) j[static_cast<std::size_t>(n)] = jc;
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            for (double& v : j) v *= 1e-250;
        }
    }
    // Normalize against the closed form of j_0 (or j_1 near sin(x) zeros).
    double scale;
    if (std::abs(j0) > 1e-8) {
        scale = j0 / j[0];
    } else {
        double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
        scale = j1 / j[1];
    }
    for (double& v : j) v *= scale;
    return j;
}

std::vector<double> sph_bessel_y_array(int nmax, double x) {
    check_arg(x, "sph_bessel_y_array");
    if (nmax < 0) throw InvalidInputError("sph_bessel_y_array: nmax must be >= 0");
    std::vector<double> y(static_cast<std::size_t>(nmax) + 1, 0.0);
    y[0] = -std::cos(x) / x;
    if (nmax >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
    for (int l = 2; l <= nmax; ++l)
        y[static_cast<std::size_t>(l)] = ((2.0 * l - 1.0) / x) * y[static_cast<std::size_t>(l - 1)] -
                                         y[static_cast<std::size_t>(l - 2)];
    return y;
}

std::complex<double> sph_hankel1(int n, double x) {
    return {sph_bessel_j_array(n, x)[static_cast<std::size_t>(n)],
            sph_bessel_y_array(n, x)[static_cast<std::size_t>(n)]};
}

std::vector<double> legendre_array(int nmax, double x) {
    if (std::abs(x) > 1.0 + 1e-12) throw InvalidInputError("legendre_array: |x| must be <= 1");
    if (nmax < 0) throw InvalidInputError("legendre_array: nmax must be >= 0");
    std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
    p[0] = 1.0;
    if (nmax >= 1) p[1] = x;
    for (int l = 2; l <= nmax; ++l)
        p[static_cast<std::size_t>(l)] =
            ((2.0 * l - 1.0) * x * p[static_cast<std::size_t>(l - 1)] -
             (l - 1.0) * p[static_cast<std::size_t>(l - 2)]) /
            l;
    return p;
}

double bessel_j_prime(int n, double x) {
    auto j = bessel_j_array(n + 1, x);
    if (n == 0) return -j[1];
    return j[static_cast<std::size_t>(n - 1)] - (n / x) * j[static_cast<std::size_t>(n)];
}

double bessel_y_prime(int n, double x) {
    auto y = bessel_y_array(std::max(1, n), x);
    if (n == 0) return -y[1];
    return y[static_cast<std::size_t>(n - 1)] - (n / x) * y[static_cast<std::size_t>(n)];
}

std::complex<double> hankel1_prime(int n, double x) {
    return {bessel_j_prime(n, x), bessel_y_prime(n, x)};
}

double sph_bessel_j_prime(int n, double x) {
    auto j = sph_bessel_j_array(std::max(1, n), x);
    if (n == 0) return -j[1];
    return j[static_cast<std::size_t>(n - 1)] - ((n + 1.0) / x) * j[static_cast<std::size_t>(n)];
}

std::complex<double> sph_hankel1_prime(int n, double x) {
    auto j = sph_bessel_j_array(std::max(1, n), x);
    auto y = sph_bessel_y_array(std::max(1, n), x);
    auto h = [&](int l) {
        return std::complex<double>{j[static_cast<std::size_t>(l)], y[static_cast<std::size_t>(l)]};
    };
    if (n == 0) return -h(1);
    return h(n - 1) - ((n + 1.0) / x) * h(n);
}

}  // namespace sf
}  // namespace seagle

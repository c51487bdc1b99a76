#pragma once

#include <complex>
#include <vector>

namespace seagle {
namespace sf {

/// J_0..J_nmax at x > 0, Miller downward recurrence with series normalization.
std::vector<double> bessel_j_array(int nmax, double x);

/// Y_0..Y_nmax at x > 0, upward recurrence from Y_0, Y_1.
std::vector<double> bessel_y_array(int nmax, double x);

double bessel_j(int n, double x);
double bessel_y(int n, double x);

/// Hankel function of the first kind, H_n^(1)(x) = J_n(x) + i Y_n(x).
std::complex<double> hankel1(int n, double x);

/// Spherical Bessel j_0..j_nmax, downward recurrence.
std::vector<double> sph_bessel_j_array(int nmax, double x);

/// Spherical Neumann y_0..y_nmax, upward recurrence.
std::vector<double> sph_bessel_y_array(int nmax, double x);

std::complex<double> sph_hankel1(int n, double x);

/// Legendre polynomials P_0..P_nmax at |x| <= 1, upward recurrence.
std::vector<double> legendre_array(int nmax, double x);

double bessel_j_prime(int n, double x);
double bessel_y_prime(int n, double x);
std::complex<double> hankel1_prime(int n, double x);

double sph_bessel_j_prime(int n, double x);
std::complex<double> sph_hankel1_prime(int n, double x);

}  // namespace sf
}  // namespace seagle

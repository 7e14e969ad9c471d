#pragma once

// Reference implementations written as literal loops or dense matrices.
// They share nothing with the library beyond the Image/Kernel containers.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ogsdeconv/blind_solver.hpp"
#include "ogsdeconv/filter_bank.hpp"
#include "ogsdeconv/image.hpp"

namespace oracle {

using ogsd::BoundaryMode;
using ogsd::Image;
using ogsd::Kernel;

int wrap(int i, int n, BoundaryMode mode);

/// out(p) = sum_a h(a) x(p - a).
Image convolve(const Image& x, const Kernel& h, BoundaryMode mode);
/// g(p) = sum_taps w * x(p + offset).
Image correlate_stencil(const Image& x, const ogsd::Stencil& f, BoundaryMode mode);

/// Dense n x n matrices of the operators above (column j = response to e_j).
Eigen::MatrixXd conv_matrix(const Kernel& h, int height, int width, BoundaryMode mode);
Eigen::MatrixXd stencil_matrix(const ogsd::Stencil& f, int height, int width, BoundaryMode mode);

Eigen::VectorXd vec(const Image& img);
Image unvec(const Eigen::VectorXd& v, int height, int width);

/// Group of Eq. (8): rows i-m1..i+m2 and columns j-m1..j+m2, zero outside.
std::vector<double> group(const Image& s, int i, int j, int w);
double ogs(const Image& s, int w);
/// Per-pixel sum of reciprocal (floored) norms of the groups containing it.
Image lambda(const Image& u, int w, double floor);
double majorizer(const Image& v, const Image& u, int w, double floor);

/// sum gamma g^2 + 2 sum (beta gamma - (alpha + 1/2) log gamma).
double psi(const std::vector<Image>& g, const std::vector<Image>& gamma, double alpha,
           double beta);

/// Dense solve of the image-step normal equations.
Image x_step_dense(const Image& y, const Kernel& h, const std::vector<Image>& gamma,
                   const std::vector<Image>& weights, const ogsd::SolverConfig& cfg);
/// Unconstrained least-squares kernel: argmin ||x * h - y||^2 via dense QR.
Kernel kernel_least_squares(const Image& y, const Image& x, int size, BoundaryMode mode);

/// Uniform [lo, hi) field from a fixed-seed generator.
Image random_image(int height, int width, std::uint64_t seed, double lo = 0.0, double hi = 1.0);
Kernel random_kernel(int size, std::uint64_t seed, bool normalized = true);

}  // namespace oracle

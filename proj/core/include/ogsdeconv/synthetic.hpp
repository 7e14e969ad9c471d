#pragma once

#include <string>
#include <vector>

#include "ogsdeconv/image.hpp"

namespace ogsd::synthetic {

// Deterministic test scenes and blur kernels. Images are piecewise smooth
// with strong edges in many orientations, values in [0, 1].

std::vector<std::string> builtin_image_names();
std::vector<std::string> builtin_kernel_names();

/// Throws std::invalid_argument for unknown names.
Image builtin_image(const std::string& name, int height = 64, int width = 64);
Kernel builtin_kernel(const std::string& name);

/// Straight motion blur of odd `size` along the angle (degrees, 0 = horizontal),
/// rasterized with linear interpolation and normalized.
Kernel motion_kernel(int size, double angle_degrees);
/// Uniform disk (pillbox) of the given radius, anti-aliased, in a size x size window.
Kernel disk_kernel(int size, double radius);
Kernel gaussian_kernel(int size, double sigma);

}  // namespace ogsd::synthetic

#pragma once

#include <span>
#include <vector>

#include "torusgas/grid.hpp"

namespace torusgas::fft {

// Unnormalized complex DFT over the grid shape. sign = -1 is the forward
// (analysis) direction, +1 the backward (synthesis) direction. Plans are
// cached per (d, n, sign); execution is thread-safe.
void transform(const TorusGrid& grid, std::span<const Complex> in, std::span<Complex> out, int sign);

std::vector<Complex> forward(const TorusGrid& grid, std::span<const Complex> in);
std::vector<Complex> backward(const TorusGrid& grid, std::span<const Complex> in);

}  // namespace torusgas::fft

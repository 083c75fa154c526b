#pragma once

#include <vector>

#include "nlspec/spectral.hpp"

namespace nlspec::detail {

/// In-place unnormalized DFT with kernel exp(-2 pi i k.x).
void fft_forward(const TorusGrid& grid, std::vector<Complex>& data);
/// In-place unnormalized DFT with kernel exp(+2 pi i k.x).
void fft_backward(const TorusGrid& grid, std::vector<Complex>& data);

}  // namespace nlspec::detail

#include "fft_backend.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace nlspec::detail {
namespace {

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per (dim, n, sign) and live for the process.
class PlanCache {
 public:
  fftw_plan get(const TorusGrid& grid, int sign) {
    const auto key = std::make_tuple(grid.dim(), grid.n(), sign);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<Complex> scratch(grid.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = grid.dim() == 1
                         ? fftw_plan_dft_1d(grid.n(), buf, buf, sign, flags)
                         : fftw_plan_dft_2d(grid.n(), grid.n(), buf, buf, sign, flags);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(const TorusGrid& grid, std::vector<Complex>& data, int sign) {
  fftw_plan plan = cache().get(grid, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void fft_forward(const TorusGrid& grid, std::vector<Complex>& data) {
  execute(grid, data, FFTW_FORWARD);
}

void fft_backward(const TorusGrid& grid, std::vector<Complex>& data) {
  execute(grid, data, FFTW_BACKWARD);
}

}  // namespace nlspec::detail

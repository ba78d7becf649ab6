#include "torusgas/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "torusgas/errors.hpp"

namespace torusgas::fft {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const TorusGrid& grid, int sign) {
    auto key = std::make_tuple(grid.dim(), grid.n(), sign);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    int dims[3] = {grid.n(), grid.n(), grid.n()};
    // Planning with ESTIMATE does not touch the arrays, but FFTW still wants
    // valid pointers; UNALIGNED lets us execute on arbitrary std::vector storage.
    std::vector<fftw_complex> scratch(2);
    fftw_plan plan = fftw_plan_many_dft(grid.dim(), dims, 1, scratch.data(), nullptr, 1, 0, scratch.data() + 1,
                                        nullptr, 1, 0, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw InvalidArgument("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void transform(const TorusGrid& grid, std::span<const Complex> in, std::span<Complex> out, int sign) {
  if (in.size() != grid.size() || out.size() != grid.size()) throw InvalidArgument("fft buffer size mismatch");
  fftw_plan plan = cache().get(grid, sign);
  // Out-of-place plan; FFTW does not modify the input of out-of-place c2c transforms.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (src == dst) {
    std::vector<Complex> copy(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()), dst);
  } else {
    fftw_execute_dft(plan, src, dst);
  }
}

std::vector<Complex> forward(const TorusGrid& grid, std::span<const Complex> in) {
  std::vector<Complex> out(grid.size());
  transform(grid, in, out, -1);
  return out;
}

std::vector<Complex> backward(const TorusGrid& grid, std::span<const Complex> in) {
  std::vector<Complex> out(grid.size());
  transform(grid, in, out, +1);
  return out;
}

}  // namespace torusgas::fft

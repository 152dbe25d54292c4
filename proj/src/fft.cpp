#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "gpscat/errors.hpp"

namespace gpscat::detail {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int points, int sign, std::size_t total) {
    const auto key = std::make_tuple(dim, points, sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_ESTIMATE leaves the arrays untouched and plans deterministically.
    auto* a = fftw_alloc_complex(total);
    auto* b = fftw_alloc_complex(total);
    int n[4] = {points, points, points, points};
    fftw_plan plan = fftw_plan_dft(dim, n, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    if (plan == nullptr) throw Error("fftw failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_nd(int dim, int points, int sign, std::span<const std::complex<double>> in,
            std::span<std::complex<double>> out) {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(points);
  if (in.size() != total || out.size() != total) throw InvalidArgument("fft_nd: size mismatch");
  fftw_plan plan = cache().get(dim, points, sign, total);
  // new-array execute never writes the input of an out-of-place plan
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void fft_1d(int sign, std::span<const std::complex<double>> in,
            std::span<std::complex<double>> out) {
  if (in.size() != out.size()) throw InvalidArgument("fft_1d: size mismatch");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().get(1, n, sign, in.size());
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace gpscat::detail

#include "batforge/kernels.hpp"

#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace batforge::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(BATFORGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  const bool avx2 = cpu_has_avx2();
  if (const char* env = std::getenv("BAT_FORGE_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::scalar;
    if (choice == "avx2" && avx2) return Backend::avx2;
  }
  return avx2 ? Backend::avx2 : Backend::scalar;
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;
};

Dispatch& dispatch() {
  static Dispatch d = [] {
    const Backend b = initial_backend();
    return Dispatch{b, &table_for(b)};
  }();
  return d;
}

}  // namespace

const KernelTable& table_for(Backend backend) {
#if defined(BATFORGE_HAVE_AVX2)
  if (backend == Backend::avx2) {
    if (!cpu_has_avx2()) throw std::invalid_argument("avx2 kernels are not supported on this CPU");
    return detail::avx2_table();
  }
#else
  if (backend == Backend::avx2) throw std::invalid_argument("avx2 kernels were not compiled in");
#endif
  return detail::scalar_table();
}

bool backend_available(Backend backend) {
  return backend == Backend::scalar || cpu_has_avx2();
}

Backend active_backend() { return dispatch().backend; }

void set_backend(Backend backend) {
  const KernelTable& t = table_for(backend);
  dispatch() = Dispatch{backend, &t};
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return dispatch().table->dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  dispatch().table->axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(ConstMatrixView w, std::span<const double> x, std::span<double> y) {
  assert(x.size() == w.cols && y.size() == w.rows);
  dispatch().table->gemv(w.data, w.rows, w.cols, x.data(), y.data());
}

void gemv_t(ConstMatrixView w, std::span<const double> x, std::span<double> y) {
  assert(x.size() == w.rows && y.size() == w.cols);
  dispatch().table->gemv_t(w.data, w.rows, w.cols, x.data(), y.data());
}

void ger(double alpha, std::span<const double> a, std::span<const double> b, MatrixView w) {
  assert(a.size() == w.rows && b.size() == w.cols);
  dispatch().table->ger(alpha, a.data(), b.data(), w.data, w.rows, w.cols);
}

}  // namespace batforge::kernels

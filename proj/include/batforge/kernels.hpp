#pragma once
// Dense double-precision kernels used by the encoder, the loss terms and
// the lexicon neighbor search.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2/FMA
// variant is compiled into a separate translation unit and chosen at startup
// when the CPU supports it. BAT_FORGE_SIMD=scalar|avx2 pins the choice.
// Results of the two backends agree to rounding, not bit for bit: runs are
// reproducible for a fixed backend.

#include <cstddef>
#include <span>
#include <string_view>

namespace batforge::kernels {

enum class Backend { scalar, avx2 };

struct ConstMatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<double> row(std::size_t r) const { return {data + r * cols, cols}; }
  operator ConstMatrixView() const { return {data, rows, cols}; }
};

// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// y += W x          (W is rows x cols, x has cols entries, y has rows entries)
void gemv(ConstMatrixView w, std::span<const double> x, std::span<double> y);

// y += W^T x        (x has rows entries, y has cols entries)
void gemv_t(ConstMatrixView w, std::span<const double> x, std::span<double> y);

// W += alpha * a b^T (a has rows entries, b has cols entries)
void ger(double alpha, std::span<const double> a, std::span<const double> b, MatrixView w);

Backend active_backend();
bool backend_available(Backend backend);
// Throws std::invalid_argument when the backend is not available on this CPU.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

// Direct access to one implementation, bypassing dispatch. Used by the
// equivalence tests.
struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*ger)(double, const double*, const double*, double*, std::size_t, std::size_t);
};

const KernelTable& table_for(Backend backend);

}  // namespace batforge::kernels

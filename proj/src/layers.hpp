#pragma once

// Hand-written layers with explicit backward passes. Parameters are addressed
// by offset into the owning network's flat parameter vector.

#include <cstddef>
#include <random>
#include <vector>

namespace brd::detail {

enum class CellKind { Simple, Lstm };

/// Activations of one recurrent pass, kept for backpropagation through time.
struct RecurrentTrace {
  int steps = 0;
  std::vector<double> h;       // (steps + 1) * H, row 0 is the zero initial state
  std::vector<double> c;       // (steps + 1) * H, LSTM only
  std::vector<double> act;     // steps * G * H gate activations (i, f, g, o), LSTM only
  std::vector<double> tanh_c;  // steps * H, LSTM only
};

struct RecurrentScratch {
  std::vector<double> dh, dc, dz, dh_prev;
};

struct Recurrent {
  CellKind kind = CellKind::Lstm;
  int in = 0;
  int hidden = 0;
  std::size_t w = 0;  // G*H x in
  std::size_t u = 0;  // G*H x H
  std::size_t b = 0;  // G*H

  int gates() const noexcept { return kind == CellKind::Lstm ? 4 : 1; }
  std::size_t place(std::size_t offset);  // assigns offsets, returns the next free offset
  void init(double* params, std::mt19937_64& rng) const;

  /// Step s reads row (reverse ? steps-1-s : s) of `seq` (steps x in).
  void forward(const double* params, const double* seq, int steps, bool reverse,
               RecurrentTrace& trace) const;
  /// `dh_final` is d(loss)/d(final hidden state). Gradients accumulate into
  /// `grad`; input gradients accumulate into `dseq` when non-null.
  void backward(const double* params, const double* seq, int steps, bool reverse,
                const RecurrentTrace& trace, const double* dh_final, double* grad, double* dseq,
                RecurrentScratch& scratch) const;
};

/// Valid 1-D convolution along the sequence axis followed by ReLU.
struct Conv1d {
  int in = 0;  // features per step
  int filters = 0;
  int kernel = 0;
  std::size_t w = 0;  // filters x (kernel * in)
  std::size_t b = 0;  // filters

  int out_steps(int steps) const noexcept { return steps - kernel + 1; }
  std::size_t place(std::size_t offset);
  void init(double* params, std::mt19937_64& rng) const;
  void forward(const double* params, const double* x, int steps, double* y) const;
  /// `dy` is overwritten with the pre-activation gradient.
  void backward(const double* x, int steps, const double* y, double* dy, double* grad) const;
};

/// Non-overlapping max pooling (stride = pool); trailing steps that do not fill
/// a window are dropped.
struct MaxPool {
  int pool = 2;
  int out_steps(int steps) const noexcept { return steps / pool; }
  void forward(const double* x, int steps, int width, double* y, int* argmax) const;
  void backward(const double* dy, int out_steps, int width, const int* argmax, double* dx) const;
};

/// Dense layer to one logit.
struct Dense {
  int in = 0;
  std::size_t w = 0;
  std::size_t b = 0;

  std::size_t place(std::size_t offset);
  void init(double* params, std::mt19937_64& rng) const;
  double forward(const double* params, const double* x) const;
  void backward(const double* params, const double* x, double dy, double* grad, double* dx) const;
};

}  // namespace brd::detail

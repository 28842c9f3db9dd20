#include "layers.hpp"

#include <algorithm>
#include <cmath>

#include "brd/random.hpp"

namespace brd::detail {

namespace {

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void fill_uniform(double* p, std::size_t n, double limit, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < n; ++i) p[i] = uniform(rng, -limit, limit);
}

}  // namespace

// ---------------------------------------------------------------- Recurrent

std::size_t Recurrent::place(std::size_t offset) {
  const std::size_t rows = static_cast<std::size_t>(gates()) * hidden;
  w = offset;
  u = w + rows * in;
  b = u + rows * hidden;
  return b + rows;
}

void Recurrent::init(double* params, std::mt19937_64& rng) const {
  const std::size_t rows = static_cast<std::size_t>(gates()) * hidden;
  fill_uniform(params + w, rows * in, 1.0 / std::sqrt(static_cast<double>(in)), rng);
  fill_uniform(params + u, rows * hidden, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  std::fill(params + b, params + b + rows, 0.0);
  if (kind == CellKind::Lstm) std::fill(params + b + hidden, params + b + 2 * hidden, 1.0);
}

void Recurrent::forward(const double* params, const double* seq, int steps, bool reverse,
                        RecurrentTrace& tr) const {
  const int H = hidden;
  const int G = gates();
  const int R = G * H;
  const double* W = params + w;
  const double* U = params + u;
  const double* B = params + b;

  tr.steps = steps;
  tr.h.assign(static_cast<std::size_t>(steps + 1) * H, 0.0);
  if (kind == CellKind::Lstm) {
    tr.c.assign(static_cast<std::size_t>(steps + 1) * H, 0.0);
    tr.act.resize(static_cast<std::size_t>(steps) * R);
    tr.tanh_c.resize(static_cast<std::size_t>(steps) * H);
  }

  std::vector<double> z(R);
  for (int s = 0; s < steps; ++s) {
    const int row = reverse ? steps - 1 - s : s;
    const double* x = seq + static_cast<std::size_t>(row) * in;
    const double* h_prev = tr.h.data() + static_cast<std::size_t>(s) * H;
    double* h = tr.h.data() + static_cast<std::size_t>(s + 1) * H;

    for (int r = 0; r < R; ++r) {
      const double* wr = W + static_cast<std::size_t>(r) * in;
      const double* ur = U + static_cast<std::size_t>(r) * H;
      double acc = B[r];
      for (int k = 0; k < in; ++k) acc += wr[k] * x[k];
      for (int j = 0; j < H; ++j) acc += ur[j] * h_prev[j];
      z[r] = acc;
    }

    if (kind == CellKind::Simple) {
      for (int j = 0; j < H; ++j) h[j] = std::tanh(z[j]);
      continue;
    }

    double* a = tr.act.data() + static_cast<std::size_t>(s) * R;
    const double* c_prev = tr.c.data() + static_cast<std::size_t>(s) * H;
    double* c = tr.c.data() + static_cast<std::size_t>(s + 1) * H;
    double* tc = tr.tanh_c.data() + static_cast<std::size_t>(s) * H;
    for (int j = 0; j < H; ++j) {
      const double ig = sigmoid(z[j]);
      const double fg = sigmoid(z[H + j]);
      const double gg = std::tanh(z[2 * H + j]);
      const double og = sigmoid(z[3 * H + j]);
      a[j] = ig;
      a[H + j] = fg;
      a[2 * H + j] = gg;
      a[3 * H + j] = og;
      c[j] = fg * c_prev[j] + ig * gg;
      tc[j] = std::tanh(c[j]);
      h[j] = og * tc[j];
    }
  }
}

void Recurrent::backward(const double* params, const double* seq, int steps, bool reverse,
                         const RecurrentTrace& tr, const double* dh_final, double* grad, double* dseq,
                         RecurrentScratch& sc) const {
  const int H = hidden;
  const int G = gates();
  const int R = G * H;
  const double* W = params + w;
  const double* U = params + u;
  double* gW = grad + w;
  double* gU = grad + u;
  double* gB = grad + b;

  sc.dh.assign(dh_final, dh_final + H);
  sc.dc.assign(H, 0.0);
  sc.dz.resize(R);
  sc.dh_prev.resize(H);

  for (int s = steps - 1; s >= 0; --s) {
    const int row = reverse ? steps - 1 - s : s;
    const double* x = seq + static_cast<std::size_t>(row) * in;
    const double* h_prev = tr.h.data() + static_cast<std::size_t>(s) * H;

    if (kind == CellKind::Simple) {
      const double* h = tr.h.data() + static_cast<std::size_t>(s + 1) * H;
      for (int j = 0; j < H; ++j) sc.dz[j] = sc.dh[j] * (1.0 - h[j] * h[j]);
    } else {
      const double* a = tr.act.data() + static_cast<std::size_t>(s) * R;
      const double* c_prev = tr.c.data() + static_cast<std::size_t>(s) * H;
      const double* tc = tr.tanh_c.data() + static_cast<std::size_t>(s) * H;
      for (int j = 0; j < H; ++j) {
        const double ig = a[j], fg = a[H + j], gg = a[2 * H + j], og = a[3 * H + j];
        const double dh = sc.dh[j];
        const double dc = sc.dc[j] + dh * og * (1.0 - tc[j] * tc[j]);
        sc.dz[j] = dc * gg * ig * (1.0 - ig);
        sc.dz[H + j] = dc * c_prev[j] * fg * (1.0 - fg);
        sc.dz[2 * H + j] = dc * ig * (1.0 - gg * gg);
        sc.dz[3 * H + j] = dh * tc[j] * og * (1.0 - og);
        sc.dc[j] = dc * fg;
      }
    }

    std::fill(sc.dh_prev.begin(), sc.dh_prev.end(), 0.0);
    double* dx = dseq ? dseq + static_cast<std::size_t>(row) * in : nullptr;
    for (int r = 0; r < R; ++r) {
      const double d = sc.dz[r];
      if (d == 0.0) continue;
      gB[r] += d;
      double* gwr = gW + static_cast<std::size_t>(r) * in;
      double* gur = gU + static_cast<std::size_t>(r) * H;
      const double* wr = W + static_cast<std::size_t>(r) * in;
      const double* ur = U + static_cast<std::size_t>(r) * H;
      for (int k = 0; k < in; ++k) gwr[k] += d * x[k];
      for (int j = 0; j < H; ++j) {
        gur[j] += d * h_prev[j];
        sc.dh_prev[j] += d * ur[j];
      }
      if (dx) {
        for (int k = 0; k < in; ++k) dx[k] += d * wr[k];
      }
    }
    sc.dh.swap(sc.dh_prev);
  }
}

// ---------------------------------------------------------------- Conv1d

std::size_t Conv1d::place(std::size_t offset) {
  w = offset;
  b = w + static_cast<std::size_t>(filters) * kernel * in;
  return b + filters;
}

void Conv1d::init(double* params, std::mt19937_64& rng) const {
  const std::size_t fan_in = static_cast<std::size_t>(kernel) * in;
  fill_uniform(params + w, fan_in * filters, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
  std::fill(params + b, params + b + filters, 0.0);
}

void Conv1d::forward(const double* params, const double* x, int steps, double* y) const {
  const int span = kernel * in;
  const int out = out_steps(steps);
  const double* W = params + w;
  const double* B = params + b;
  for (int t = 0; t < out; ++t) {
    const double* window = x + static_cast<std::size_t>(t) * in;
    double* yt = y + static_cast<std::size_t>(t) * filters;
    for (int f = 0; f < filters; ++f) {
      const double* wf = W + static_cast<std::size_t>(f) * span;
      double acc = B[f];
      for (int k = 0; k < span; ++k) acc += wf[k] * window[k];
      yt[f] = acc > 0.0 ? acc : 0.0;
    }
  }
}

void Conv1d::backward(const double* x, int steps, const double* y, double* dy, double* grad) const {
  const int span = kernel * in;
  const int out = out_steps(steps);
  double* gW = grad + w;
  double* gB = grad + b;
  for (int t = 0; t < out; ++t) {
    const double* window = x + static_cast<std::size_t>(t) * in;
    const double* yt = y + static_cast<std::size_t>(t) * filters;
    double* dyt = dy + static_cast<std::size_t>(t) * filters;
    for (int f = 0; f < filters; ++f) {
      if (yt[f] <= 0.0) {
        dyt[f] = 0.0;
        continue;
      }
      const double d = dyt[f];
      if (d == 0.0) continue;
      gB[f] += d;
      double* gwf = gW + static_cast<std::size_t>(f) * span;
      for (int k = 0; k < span; ++k) gwf[k] += d * window[k];
    }
  }
}

// ---------------------------------------------------------------- MaxPool

void MaxPool::forward(const double* x, int steps, int width, double* y, int* argmax) const {
  const int out = out_steps(steps);
  for (int s = 0; s < out; ++s) {
    for (int f = 0; f < width; ++f) {
      int best = s * pool;
      double v = x[static_cast<std::size_t>(best) * width + f];
      for (int t = best + 1; t < (s + 1) * pool; ++t) {
        const double cand = x[static_cast<std::size_t>(t) * width + f];
        if (cand > v) {
          v = cand;
          best = t;
        }
      }
      y[static_cast<std::size_t>(s) * width + f] = v;
      argmax[static_cast<std::size_t>(s) * width + f] = best;
    }
  }
}

void MaxPool::backward(const double* dy, int out, int width, const int* argmax, double* dx) const {
  for (int s = 0; s < out; ++s) {
    for (int f = 0; f < width; ++f) {
      const std::size_t o = static_cast<std::size_t>(s) * width + f;
      dx[static_cast<std::size_t>(argmax[o]) * width + f] += dy[o];
    }
  }
}

// ---------------------------------------------------------------- Dense

std::size_t Dense::place(std::size_t offset) {
  w = offset;
  b = w + in;
  return b + 1;
}

void Dense::init(double* params, std::mt19937_64& rng) const {
  fill_uniform(params + w, in, 1.0 / std::sqrt(static_cast<double>(in)), rng);
  params[b] = 0.0;
}

double Dense::forward(const double* params, const double* x) const {
  double acc = params[b];
  for (int k = 0; k < in; ++k) acc += params[w + k] * x[k];
  return acc;
}

void Dense::backward(const double* params, const double* x, double dy, double* grad, double* dx) const {
  grad[b] += dy;
  for (int k = 0; k < in; ++k) {
    grad[w + k] += dy * x[k];
    dx[k] = dy * params[w + k];
  }
}

}  // namespace brd::detail

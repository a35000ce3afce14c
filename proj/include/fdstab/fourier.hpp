#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "fdstab/errors.hpp"
#include "fdstab/grid.hpp"

namespace fdstab {

/// Discrete Fourier transform on a periodic box, v^(xi_k) = sum_j v_j e^{-i xi_k . (j - j_min)},
/// with xi_k = 2 pi k / N per axis. Under this sign S^l becomes multiplication by e^{i l . xi},
/// matching the symbol convention. Modes are stored row-major as k1 * n2 + k2.
class PeriodicFourier {
 public:
  PeriodicFourier(int n1, int n2) : n1_(n1), n2_(n2) {
    if (n1 < 1 || n2 < 1) throw InvalidArgument("fourier: sizes must be positive");
  }

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }

  std::vector<double> xi(std::size_t mode, int d) const {
    const int k1 = static_cast<int>(mode / n2_);
    const int k2 = static_cast<int>(mode % n2_);
    std::vector<double> out{2.0 * std::numbers::pi * k1 / n1_};
    if (d == 2) out.push_back(2.0 * std::numbers::pi * k2 / n2_);
    return out;
  }

  std::vector<std::complex<double>> forward(const GridFunction& g) const {
    check(g);
    std::vector<std::complex<double>> a(g.values().begin(), g.values().end());
    transform(a, false);
    return a;
  }

  /// Inverse transform; returns the real part on the layout of `like`.
  GridFunction inverse_real(const std::vector<std::complex<double>>& hat, const GridFunction& like) const {
    check(like);
    if (hat.size() != size()) throw InvalidArgument("fourier: coefficient count mismatch");
    auto a = hat;
    transform(a, true);
    auto out = GridFunction::zeros_like(like);
    auto vals = out.values();
    for (std::size_t i = 0; i < a.size(); ++i) vals[i] = a[i].real();
    return out;
  }

 private:
  void check(const GridFunction& g) const {
    if (!g.periodic1()) throw InvalidArgument("fourier: box must be periodic");
    if (g.n1() != n1_ || g.n2() != n2_) throw InvalidArgument("fourier: box size mismatch");
  }

  void transform(std::vector<std::complex<double>>& a, bool inverse) const {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in;
    std::vector<std::complex<double>> out;
    auto run = [&] {
      if (inverse) {
        fft.inv(out, in);
      } else {
        fft.fwd(out, in);
      }
    };
    if (n2_ > 1) {
      in.resize(n2_);
      for (int k1 = 0; k1 < n1_; ++k1) {
        for (int k2 = 0; k2 < n2_; ++k2) in[k2] = a[static_cast<std::size_t>(k1) * n2_ + k2];
        run();
        for (int k2 = 0; k2 < n2_; ++k2) a[static_cast<std::size_t>(k1) * n2_ + k2] = out[k2];
      }
    }
    if (n1_ > 1) {
      in.resize(n1_);
      for (int k2 = 0; k2 < n2_; ++k2) {
        for (int k1 = 0; k1 < n1_; ++k1) in[k1] = a[static_cast<std::size_t>(k1) * n2_ + k2];
        run();
        for (int k1 = 0; k1 < n1_; ++k1) a[static_cast<std::size_t>(k1) * n2_ + k2] = out[k1];
      }
    }
  }

  int n1_;
  int n2_;
};

}  // namespace fdstab

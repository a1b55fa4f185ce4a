#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pat/core.hpp"

namespace pat::nufft {

// Kaiser-Bessel window parameters. alpha and beta of 0 select the defaults
// alpha = 0.98*pi*(2c-1) and beta = pi*(2-1/c). beta is the dimensionless
// shape; the Bessel argument is rate*sqrt(alpha^2-theta^2) with
// rate = beta*(K-1/2)/alpha.
struct WindowSpec {
    double c = 2.0;
    double alpha = 0.0;
    int K = 6;
    double beta = 0.0;
};

// Fills defaults and validates. Throws Error(parameter).
WindowSpec resolve(const WindowSpec& spec);
double window_rate(const WindowSpec& resolved);

double window_eval(const WindowSpec& spec, double theta);
double window_ft_eval(const WindowSpec& spec, double x);

// Smallest even integer >= target whose prime factors are in {2,3,5,7}.
std::size_t smooth_even_length(double target);

// Round half away from zero.
inline long long round_half_away(double x) { return static_cast<long long>(x < 0 ? -std::floor(-x + 0.5) : std::floor(x + 0.5)); }

enum class Direction { forward, inverse };

// Plain (uncentered, unscaled) forward FFT of length n with a reusable plan.
class Fft1d {
public:
    explicit Fft1d(std::size_t n, Direction dir = Direction::forward);
    ~Fft1d();
    Fft1d(const Fft1d&) = delete;
    Fft1d& operator=(const Fft1d&) = delete;
    std::size_t size() const { return n_; }
    // in and out must not alias.
    void execute(const cplx* in, cplx* out) const;

private:
    std::size_t n_;
    void* plan_;
};

// phi_l = sum_{n=0}^{N-1} u_n exp(-2 pi i kappa_l n / N)
std::vector<cplx> nudft_ner_direct(std::span<const cplx> u, std::span<const double> kappas);

// Precomputed taps for a fixed set of frequencies on one plan.
struct NerTaps {
    int taps = 0;
    std::vector<std::uint32_t> index;  // size M*taps
    std::vector<cplx> weight;          // size M*taps
    std::size_t size() const { return taps == 0 ? 0 : weight.size() / taps; }
};

class NerPlan {
public:
    NerPlan(std::size_t n, const WindowSpec& spec);
    NerPlan(const NerPlan&) = delete;
    NerPlan& operator=(const NerPlan&) = delete;

    std::size_t length() const { return n_; }
    std::size_t oversampled_length() const { return l_; }
    double effective_c() const { return static_cast<double>(l_) / static_cast<double>(n_); }
    const WindowSpec& spec() const { return spec_; }

    // Deapodize, zero-pad and transform: work must hold oversampled_length().
    void oversample(const cplx* u, cplx* work) const;

    // Taps for evaluating at the given frequencies; each row is multiplied by scale[l] if given.
    NerTaps taps(std::span<const double> kappas, std::span<const cplx> scale = {}) const;

    std::vector<cplx> execute(std::span<const cplx> u, std::span<const double> kappas) const;

private:
    std::size_t n_, l_;
    WindowSpec spec_;
    std::vector<double> inv_psi_;
    std::vector<cplx> phase_;  // e^{i pi m / c}, m in [0, 2L)
    std::unique_ptr<Fft1d> fft_;
};

// Applies taps to a transformed line: out[l] = sum_k weight[l,k] * line[index[l,k]].
void apply_taps(const NerTaps& t, const cplx* line, cplx* out);

std::vector<cplx> nufft_ner(std::span<const cplx> u, std::span<const double> kappas, const WindowSpec& spec = {});

// phi_j = sum_m phi_m exp(-2 pi i sum_a j_a x_{m,a} / N_a), j centered in [-N_a/2, N_a/2).
// positions are M x D in grid units, row-major.
ComplexArray nudft_ned_direct(std::span<const double> positions, std::span<const cplx> values,
                              const std::vector<std::size_t>& out_dims);

class NedPlan {
public:
    NedPlan(std::span<const double> positions, const std::vector<std::size_t>& out_dims, const WindowSpec& spec);

    std::size_t samples() const { return m_; }
    const std::vector<std::size_t>& out_dims() const { return dims_; }
    const std::vector<std::size_t>& oversampled_dims() const { return ldims_; }

    ComplexArray execute(std::span<const cplx> values) const;

    // values is M x B (B batched transforms, batch index fastest). Output has
    // dims out_dims + {B}.
    ComplexArray execute_batch(std::span<const cplx> values, std::size_t batch) const;

private:
    std::size_t m_ = 0, d_ = 0;
    std::vector<std::size_t> dims_, ldims_;
    WindowSpec spec_;
    int taps_ = 0;
    std::vector<long long> base_;   // M x D first node index
    std::vector<double> weight_;    // M x D x taps
    std::vector<double> deapod_;    // per axis, concatenated
};

ComplexArray nufft_ned(std::span<const double> positions, std::span<const cplx> values,
                       const std::vector<std::size_t>& out_dims, const WindowSpec& spec = {});

// Centered multi-dimensional DFT: index i on an axis of length N stands for
// i - N/2. Forward is unscaled, inverse carries 1/N_total. Dims must be even.
ComplexArray fft_centered(const ComplexArray& grid, Direction dir);

// Same transform restricted to the leading `axes` axes, batched over the rest.
void fft_centered_leading(ComplexArray& grid, std::size_t axes, Direction dir);


}  // namespace pat::nufft

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace ckdv {

using cplx = std::complex<double>;

/// Periodic grid on [0, L) with n collocation points, n a power of two (n >= 16).
///
/// Modes are stored in FFT order: index j holds integer mode k = j for
/// j <= n/2 and k = j - n above; wavenumber ξ_k = 2πk/L. The Nyquist mode
/// k = n/2 has no partner.
class Grid {
public:
    Grid(std::size_t n_points, double length);

    std::size_t size() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double dx() const noexcept { return length_ / static_cast<double>(n_); }
    std::span<const double> wavenumbers() const noexcept { return xi_; }
    double max_abs_wavenumber() const noexcept;
    std::vector<double> points() const;

    int mode(std::size_t index) const noexcept;
    std::size_t index_of(int k) const;
    std::size_t nyquist_index() const noexcept { return n_ / 2; }
    /// Highest |k| kept by the 2/3 rule.
    int dealias_cutoff() const noexcept { return static_cast<int>(n_ / 3); }

    bool operator==(const Grid& o) const noexcept { return n_ == o.n_ && length_ == o.length_; }

private:
    std::size_t n_;
    double length_;
    std::vector<double> xi_;
};

using GridPtr = std::shared_ptr<const Grid>;
GridPtr make_grid(std::size_t n_points, double length);

/// Fourier coefficients with û_k = (1/L) ∫ u e^{-iξ_k x} dx, so that
/// L Σ|û_k|² = ∫|u|² dx.
class SpectralField {
public:
    explicit SpectralField(GridPtr grid);
    SpectralField(GridPtr grid, std::vector<cplx> coeffs);

    const GridPtr& grid() const noexcept { return grid_; }
    std::span<const cplx> coeffs() const noexcept { return c_; }
    std::span<cplx> coeffs() noexcept { return c_; }
    std::size_t size() const noexcept { return c_.size(); }

    cplx& operator[](std::size_t i) { return c_[i]; }
    const cplx& operator[](std::size_t i) const { return c_[i]; }
    cplx mode(int k) const { return c_[grid_->index_of(k)]; }
    void set_mode(int k, cplx value) { c_[grid_->index_of(k)] = value; }

    /// max_k |û_{-k} - conj(û_k)| including the self-paired modes 0 and n/2.
    double hermitian_defect() const;
    double max_abs() const;
    bool is_zero() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

private:
    GridPtr grid_;
    std::vector<cplx> c_;
};

struct SpectralState {
    SpectralField u_hat;
    SpectralField v_hat;
    double time = 0.0;

    SpectralState(SpectralField u, SpectralField v, double t = 0.0);
    const GridPtr& grid() const noexcept { return u_hat.grid(); }
};

/// Real <-> spectral transforms backed by an FFTW plan. A plan owns scratch
/// buffers and must stay on one thread.
class Transform {
public:
    explicit Transform(std::size_t n);
    ~Transform();
    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;

    void forward(std::span<const double> values, std::span<cplx> out);
    /// Fails with SymmetryViolation if the input is not Hermitian to 1e-12 relative.
    void inverse(std::span<const cplx> coeffs, std::span<double> out);
    /// Inverse without the symmetry check; imaginary parts are dropped.
    void inverse_unchecked(std::span<const cplx> coeffs, std::span<double> out);

    std::size_t size() const noexcept { return n_; }
    /// Number of inverse transforms whose nonzero imaginary residue was discarded.
    std::size_t imag_discards() const noexcept { return discards_; }

private:
    struct Impl;
    std::size_t n_;
    std::unique_ptr<Impl> impl_;
    std::size_t discards_ = 0;
};

/// Thread-local plan for size n.
Transform& thread_transform(std::size_t n);

SpectralField forward_transform(std::span<const double> values, const GridPtr& grid);
std::vector<double> inverse_transform(const SpectralField& field);

/// Fourier multiplier m(ξ). `exp_rate` bounds growth: |m(ξ)| <= poly(ξ) e^{rate |ξ|};
/// application refuses rate * max|ξ| > 700.
class Multiplier {
public:
    explicit Multiplier(std::function<cplx(double)> fn, double exp_rate = 0.0)
        : fn_(std::move(fn)), rate_(exp_rate) {}

    cplx operator()(double xi) const { return fn_(xi); }
    double exp_rate() const noexcept { return rate_; }
    /// Pointwise product.
    Multiplier operator*(const Multiplier& other) const;

    /// Values on the grid in storage order. The Nyquist entry is the average
    /// (m(ξ_N) + m(-ξ_N))/2 so that real fields stay real.
    std::vector<cplx> sample(const Grid& grid) const;

private:
    std::function<cplx(double)> fn_;
    double rate_;
};

namespace multipliers {
Multiplier derivative();
Multiplier gevrey_weight(double sigma);
Multiplier sobolev_weight(double s);
/// e^{i a ξ³ t}: the free flow of w_t + a w_xxx = 0 over time t.
Multiplier dispersion_phase(double a, double t);
}  // namespace multipliers

inline constexpr double kMaxExponent = 700.0;

SpectralField apply_multiplier(const SpectralField& field, const Multiplier& m);
/// Multiply by pre-sampled values (storage order), in place.
void apply_sampled(SpectralField& field, std::span<const cplx> values);

SpectralField dealias(const SpectralField& field);
void dealias_in_place(SpectralField& field);

/// L² norm under the module's Parseval convention: sqrt(L Σ|û_k|²).
double l2_norm(const SpectralField& field);

}  // namespace ckdv

#include "ckdv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "ckdv/errors.hpp"

namespace ckdv {

namespace {

// FFTW planning is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kHermitianTol = 1e-12;

}  // namespace

Grid::Grid(std::size_t n_points, double length) : n_(n_points), length_(length) {
    if (n_points < 16 || (n_points & (n_points - 1)) != 0) {
        throw InvalidParameter("grid: n_points must be a power of two >= 16");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw InvalidParameter("grid: length must be positive and finite");
    }
    xi_.resize(n_);
    const double base = 2.0 * std::numbers::pi / length_;
    for (std::size_t j = 0; j < n_; ++j) xi_[j] = base * mode(j);
}

double Grid::max_abs_wavenumber() const noexcept { return std::abs(xi_[n_ / 2]); }

std::vector<double> Grid::points() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = dx() * static_cast<double>(j);
    return x;
}

int Grid::mode(std::size_t index) const noexcept {
    return index <= n_ / 2 ? static_cast<int>(index)
                           : static_cast<int>(index) - static_cast<int>(n_);
}

std::size_t Grid::index_of(int k) const {
    const int half = static_cast<int>(n_ / 2);
    if (k > half || k <= -half) throw InvalidParameter("grid: mode out of range");
    return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<int>(n_));
}

GridPtr make_grid(std::size_t n_points, double length) {
    return std::make_shared<const Grid>(n_points, length);
}

SpectralField::SpectralField(GridPtr grid) : grid_(std::move(grid)), c_(grid_->size()) {}

SpectralField::SpectralField(GridPtr grid, std::vector<cplx> coeffs)
    : grid_(std::move(grid)), c_(std::move(coeffs)) {
    if (c_.size() != grid_->size()) throw InvalidParameter("spectral field: length mismatch");
}

double SpectralField::hermitian_defect() const {
    const std::size_t n = c_.size();
    double d = std::max(std::abs(c_[0].imag()), std::abs(c_[n / 2].imag()));
    for (std::size_t j = 1; j < n / 2; ++j) d = std::max(d, std::abs(c_[n - j] - std::conj(c_[j])));
    return d;
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& z : c_) m = std::max(m, std::abs(z));
    return m;
}

bool SpectralField::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const cplx& z) { return z == cplx{}; });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (!(*grid_ == *o.grid_)) throw InvalidParameter("spectral field: grid mismatch");
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (!(*grid_ == *o.grid_)) throw InvalidParameter("spectral field: grid mismatch");
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& z : c_) z *= s;
    return *this;
}

SpectralState::SpectralState(SpectralField u, SpectralField v, double t)
    : u_hat(std::move(u)), v_hat(std::move(v)), time(t) {
    if (!(*u_hat.grid() == *v_hat.grid())) throw InvalidParameter("state: u and v grids differ");
}

struct Transform::Impl {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

Transform::Transform(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
    std::lock_guard lock(planner_mutex());
    impl_->in = fftw_alloc_complex(n);
    impl_->out = fftw_alloc_complex(n);
    // FFTW_ESTIMATE keeps the chosen algorithm, and hence rounding, reproducible.
    impl_->fwd = fftw_plan_dft_1d(static_cast<int>(n), impl_->in, impl_->out, FFTW_FORWARD,
                                  FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_1d(static_cast<int>(n), impl_->in, impl_->out, FFTW_BACKWARD,
                                  FFTW_ESTIMATE);
}

Transform::~Transform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->bwd);
    fftw_free(impl_->in);
    fftw_free(impl_->out);
}

void Transform::forward(std::span<const double> values, std::span<cplx> out) {
    if (values.size() != n_ || out.size() != n_) {
        throw InvalidParameter("forward_transform: length mismatch");
    }
    for (std::size_t j = 0; j < n_; ++j) {
        impl_->in[j][0] = values[j];
        impl_->in[j][1] = 0.0;
    }
    fftw_execute(impl_->fwd);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = cplx(impl_->out[j][0], impl_->out[j][1]) * scale;
}

void Transform::inverse(std::span<const cplx> coeffs, std::span<double> out) {
    if (coeffs.size() != n_) throw InvalidParameter("inverse_transform: length mismatch");
    double scale = 0.0;
    double defect = std::max(std::abs(coeffs[0].imag()), std::abs(coeffs[n_ / 2].imag()));
    for (std::size_t j = 0; j < n_; ++j) scale = std::max(scale, std::abs(coeffs[j]));
    for (std::size_t j = 1; j < n_ / 2; ++j) {
        defect = std::max(defect, std::abs(coeffs[n_ - j] - std::conj(coeffs[j])));
    }
    if (defect > kHermitianTol * scale) {
        throw SymmetryViolation("inverse_transform: field is not Hermitian (defect " +
                                std::to_string(defect / scale) + " relative)");
    }
    inverse_unchecked(coeffs, out);
}

void Transform::inverse_unchecked(std::span<const cplx> coeffs, std::span<double> out) {
    if (coeffs.size() != n_ || out.size() != n_) {
        throw InvalidParameter("inverse_transform: length mismatch");
    }
    for (std::size_t j = 0; j < n_; ++j) {
        impl_->in[j][0] = coeffs[j].real();
        impl_->in[j][1] = coeffs[j].imag();
    }
    fftw_execute(impl_->bwd);
    bool residue = false;
    for (std::size_t j = 0; j < n_; ++j) {
        out[j] = impl_->out[j][0];
        residue = residue || impl_->out[j][1] != 0.0;
    }
    if (residue) ++discards_;
}

Transform& thread_transform(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<Transform>> plans;
    auto& slot = plans[n];
    if (!slot) slot = std::make_unique<Transform>(n);
    return *slot;
}

SpectralField forward_transform(std::span<const double> values, const GridPtr& grid) {
    if (values.size() != grid->size()) throw InvalidParameter("forward_transform: length mismatch");
    SpectralField f(grid);
    thread_transform(grid->size()).forward(values, f.coeffs());
    return f;
}

std::vector<double> inverse_transform(const SpectralField& field) {
    std::vector<double> out(field.size());
    thread_transform(field.size()).inverse(field.coeffs(), out);
    return out;
}

Multiplier Multiplier::operator*(const Multiplier& other) const {
    auto a = fn_;
    auto b = other.fn_;
    return Multiplier([a, b](double xi) { return a(xi) * b(xi); }, rate_ + other.rate_);
}

std::vector<cplx> Multiplier::sample(const Grid& grid) const {
    if (rate_ * grid.max_abs_wavenumber() > kMaxExponent) {
        throw OverflowGuard("multiplier: exponent " +
                            std::to_string(rate_ * grid.max_abs_wavenumber()) + " exceeds 700");
    }
    const auto xi = grid.wavenumbers();
    std::vector<cplx> m(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) m[j] = fn_(xi[j]);
    const std::size_t ny = grid.nyquist_index();
    m[ny] = 0.5 * (fn_(xi[ny]) + fn_(-xi[ny]));
    for (const auto& z : m) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw OverflowGuard("multiplier: non-finite value on grid");
        }
    }
    return m;
}

namespace multipliers {

Multiplier derivative() {
    return Multiplier([](double xi) { return cplx(0.0, xi); });
}

Multiplier gevrey_weight(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidParameter("gevrey_weight: sigma must be finite and >= 0");
    }
    return Multiplier([sigma](double xi) { return cplx(std::exp(sigma * std::abs(xi)), 0.0); },
                      sigma);
}

Multiplier sobolev_weight(double s) {
    return Multiplier([s](double xi) { return cplx(std::pow(1.0 + std::abs(xi), s), 0.0); });
}

Multiplier dispersion_phase(double a, double t) {
    return Multiplier([a, t](double xi) { return std::polar(1.0, a * xi * xi * xi * t); });
}

}  // namespace multipliers

SpectralField apply_multiplier(const SpectralField& field, const Multiplier& m) {
    SpectralField out = field;
    apply_sampled(out, m.sample(*field.grid()));
    return out;
}

void apply_sampled(SpectralField& field, std::span<const cplx> values) {
    auto c = field.coeffs();
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= values[j];
}

void dealias_in_place(SpectralField& field) {
    const auto& g = *field.grid();
    const int cut = g.dealias_cutoff();
    auto c = field.coeffs();
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (std::abs(g.mode(j)) > cut) c[j] = {};
    }
}

SpectralField dealias(const SpectralField& field) {
    SpectralField out = field;
    dealias_in_place(out);
    return out;
}

double l2_norm(const SpectralField& field) {
    double s = 0.0;
    for (const auto& z : field.coeffs()) s += std::norm(z);
    return std::sqrt(field.grid()->length() * s);
}

}  // namespace ckdv

#include "ckdv/profiles.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "ckdv/errors.hpp"

namespace ckdv {

namespace {

double wrapped(double x, double center, double length) {
    double d = std::fmod(x - center, length);
    if (d < -0.5 * length) d += length;
    if (d >= 0.5 * length) d -= length;
    return d;
}

SpectralField physical_profile(const GridPtr& g, double amp, double center, double width,
                               bool gaussian) {
    if (amp == 0.0) return SpectralField(g);
    if (!(width > 0.0)) throw InvalidParameter("initial_profile: width must be positive");
    const auto x = g->points();
    std::vector<double> f(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = wrapped(x[j], center, g->length()) / width;
        if (gaussian) {
            f[j] = amp * std::exp(-d * d);
        } else {
            const double s = 1.0 / std::cosh(d);
            f[j] = amp * s * s;
        }
    }
    return forward_transform(f, g);
}

SpectralField exponential_profile(const GridPtr& g, double amp, double center, double radius) {
    SpectralField f(g);
    if (amp == 0.0) return f;
    const auto xi = g->wavenumbers();
    for (std::size_t j = 0; j < f.size(); ++j) {
        f[j] = amp * std::exp(-radius * std::abs(xi[j])) * std::polar(1.0, -xi[j] * center);
    }
    return f;
}

// 53-bit uniform in [0, 1) straight from the engine so streams match across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SpectralField random_profile(const GridPtr& g, double amp, double radius, std::uint64_t seed) {
    SpectralField f(g);
    if (amp == 0.0) return f;
    std::mt19937_64 rng(seed);
    const auto xi = g->wavenumbers();
    const int half = static_cast<int>(g->size() / 2);
    f.set_mode(0, amp * (unit_uniform(rng) < 0.5 ? -1.0 : 1.0));
    for (int k = 1; k < half; ++k) {
        const double phase = 2.0 * std::numbers::pi * unit_uniform(rng);
        const auto z = amp * std::exp(-radius * std::abs(xi[static_cast<std::size_t>(k)])) *
                       std::polar(1.0, phase);
        f.set_mode(k, z);
        f.set_mode(-k, std::conj(z));
    }
    return f;
}

}  // namespace

SpectralState initial_profile(std::string_view name, const ProfileParams& p, const GridPtr& grid) {
    const double xu = std::isnan(p.u_center) ? 0.5 * grid->length() : p.u_center;
    const double xv = std::isnan(p.v_center) ? 0.5 * grid->length() : p.v_center;
    SpectralField u(grid), v(grid);
    if (name == "gaussian" || name == "sech2") {
        const bool gauss = name == "gaussian";
        u = physical_profile(grid, p.u_amplitude, xu, p.width, gauss);
        v = physical_profile(grid, p.v_amplitude, xv, p.width, gauss);
    } else if (name == "poisson-kernel") {
        if (!(p.radius > 0.0)) throw InvalidParameter("poisson-kernel: radius must be positive");
        u = exponential_profile(grid, p.u_amplitude, xu, p.radius);
        v = exponential_profile(grid, p.v_amplitude, xv, p.radius);
    } else if (name == "random-analytic") {
        if (!(p.radius > 0.0)) throw InvalidParameter("random-analytic: radius must be positive");
        u = random_profile(grid, p.u_amplitude, p.radius, p.seed);
        v = random_profile(grid, p.v_amplitude, p.radius, p.seed + 0x9E3779B97F4A7C15ULL);
    } else {
        throw InvalidParameter("initial_profile: unknown profile '" + std::string(name) + "'");
    }
    u[grid->nyquist_index()] = {};
    v[grid->nyquist_index()] = {};
    if (p.dealias) {
        dealias_in_place(u);
        dealias_in_place(v);
    }
    return SpectralState(std::move(u), std::move(v), 0.0);
}

SpectralField load_spectrum_file(const std::filesystem::path& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open spectrum file " + path.string());
    SpectralField f(grid);
    std::vector<bool> seen(grid->size(), false);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        int k;
        if (!(ls >> k)) continue;
        cplx z;
        if (!(ls >> z)) {
            throw InvalidParameter(path.string() + ":" + std::to_string(lineno) +
                                   ": expected `k (re,im)`");
        }
        const std::size_t j = grid->index_of(k);
        f[j] = z;
        seen[j] = true;
    }
    const int half = static_cast<int>(grid->size() / 2);
    for (int k = 1; k < half; ++k) {
        const std::size_t jp = grid->index_of(k), jm = grid->index_of(-k);
        if (seen[jp] && !seen[jm]) f[jm] = std::conj(f[jp]);
        if (seen[jm] && !seen[jp]) f[jp] = std::conj(f[jm]);
    }
    if (f.hermitian_defect() > 1e-12 * f.max_abs()) {
        throw SymmetryViolation("spectrum file " + path.string() + " is not Hermitian");
    }
    return f;
}

void write_spectrum_file(const std::filesystem::path& path, const SpectralField& field) {
    std::ofstream out(path);
    if (!out) throw InvalidParameter("cannot write spectrum file " + path.string());
    out << "# k (re,im)\n" << std::setprecision(17);
    const auto& g = *field.grid();
    for (std::size_t j = 0; j < field.size(); ++j) {
        if (g.mode(j) < 0 || field[j] == cplx{}) continue;
        out << g.mode(j) << '\t' << field[j] << '\n';
    }
}

}  // namespace ckdv

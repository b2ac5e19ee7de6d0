#include "klsum/bumps.hpp"

#include <algorithm>
#include <cmath>

#include "klsum/errors.hpp"
#include "klsum/fft.hpp"

namespace klsum {

namespace {
double ramp_piece(double t) { return t <= 0.0 ? 0.0 : std::exp(-1.0 / t); }

constexpr double TWO_PI = 6.283185307179586476925286766559;
} // namespace

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = ramp_piece(t), b = ramp_piece(1.0 - t);
    return a / (a + b);
}

Bump::Bump(double r1, double r2, double r3, double r4) : r1_(r1), r2_(r2), r3_(r3), r4_(r4) {
    if (!(r1 <= r2 && r2 <= r3 && r3 <= r4) || !(r1 < r4) || !(r2 > r1) || !(r4 > r3))
        throw usage_error("Bump: breakpoints must satisfy r1 < r2 <= r3 < r4");
}

double Bump::operator()(double t) const {
    if (t <= r1_ || t >= r4_) return 0.0;
    if (t < r2_) return smoothstep((t - r1_) / (r2_ - r1_));
    if (t <= r3_) return 1.0;
    return smoothstep((r4_ - t) / (r4_ - r3_));
}

double Bump::derivative(int order, double t) const {
    if (order < 0 || order > 4) throw usage_error("Bump::derivative: order in [0,4]");
    if (order == 0) return (*this)(t);
    const double h = std::min(r2_ - r1_, r4_ - r3_) / 64.0;
    const Bump& f = *this;
    const double fm2 = f(t - 2 * h), fm1 = f(t - h), f0 = f(t), fp1 = f(t + h),
                 fp2 = f(t + 2 * h);
    switch (order) {
        case 1: return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
        case 2: return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
        case 3: return (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h);
        default: return (fm2 - 4 * fm1 + 6 * f0 - 4 * fp1 + fp2) / (h * h * h * h);
    }
}

Bump make_bump(const BumpSpec& spec) {
    if (!(spec.halfwidth > 0)) throw usage_error("make_bump: halfwidth must be positive");
    if (!(spec.sharpness >= 1)) throw usage_error("make_bump: sharpness must be >= 1");
    const double c = spec.center, h = spec.halfwidth;
    if (spec.kind == BumpKind::fixed_support) {
        const double ramp = h / spec.sharpness;
        return Bump(c - h, c - h + ramp, c + h - ramp, c + h);
    }
    const double delta = 1.0 / spec.sharpness;
    return Bump(c - h - delta, c - h, c + h, c + h + delta);
}

BumpTransform::BumpTransform(const Bump& w, int log2_fft, int samples) {
    if (log2_fft < 10 || log2_fft > 24) throw usage_error("BumpTransform: log2_fft in [10,24]");
    const std::size_t nfft = std::size_t(1) << log2_fft;
    if (samples < 64 || std::size_t(samples) > nfft)
        throw usage_error("BumpTransform: samples in [64, 2^log2_fft]");
    const double lo = w.support_lo(), hi = w.support_hi(), len = hi - lo;
    center_ = 0.5 * (lo + hi);
    const double dt = len / samples;
    std::vector<cplx> buf(nfft, cplx(0.0, 0.0));
    for (int j = 0; j < samples; ++j) buf[std::size_t(j)] = cplx(w(lo + (j + 0.5) * dt), 0.0);
    fft_pow2(buf, -1);
    d_omega_ = 1.0 / (double(nfft) * dt);
    const std::size_t keep = nfft / 2 + 1;
    omega_max_ = double(nfft / 2) * d_omega_;
    table_.resize(keep);
    const double t0 = lo + 0.5 * dt;
    for (std::size_t k = 0; k < keep; ++k) {
        const double omega = double(k) * d_omega_;
        // A(omega) = dt * X[k] * e(omega * (center - t0))
        const double ph = TWO_PI * omega * (center_ - t0);
        table_[k] = buf[k] * cplx(std::cos(ph), std::sin(ph)) * dt;
    }
    mass_ = table_[0].real();
    env_.resize(keep);
    double running = 0.0;
    for (std::size_t k = keep; k-- > 0;) {
        running = std::max(running, std::abs(table_[k]));
        env_[k] = running;
    }
}

std::complex<double> BumpTransform::eval(double omega) const {
    const double w = std::abs(omega);
    if (w > omega_max_) throw numerics_error("BumpTransform::eval: omega beyond table range");
    const double x = w / d_omega_;
    long k0 = long(x);
    long s = std::clamp(k0 - 2, 0L, long(table_.size()) - 6);
    // 6-point Lagrange interpolation of the demodulated table
    cplx acc(0.0, 0.0);
    for (int i = 0; i < 6; ++i) {
        double li = 1.0;
        for (int j = 0; j < 6; ++j)
            if (j != i) li *= (x - double(s + j)) / double(i - j);
        acc += table_[std::size_t(s + i)] * li;
    }
    const double ph = -TWO_PI * w * center_;
    cplx val = acc * cplx(std::cos(ph), std::sin(ph));
    return omega < 0 ? std::conj(val) : val;
}

double BumpTransform::envelope(double omega) const {
    const double w = std::abs(omega);
    if (w >= omega_max_) return env_.back();
    const std::size_t k = std::size_t(w / d_omega_);
    return env_[std::min(k, env_.size() - 1)];
}

double BumpTransform::cut(double delta) const {
    if (!(delta > 0)) throw usage_error("BumpTransform::cut: delta must be positive");
    if (env_.back() > delta)
        throw numerics_error("BumpTransform::cut: envelope never reaches requested level");
    // env_ is nonincreasing: binary search the first index at or below delta.
    std::size_t lo = 0, hi = env_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (env_[mid] <= delta)
            hi = mid;
        else
            lo = mid + 1;
    }
    return double(lo) * d_omega_;
}

} // namespace klsum

#pragma once

#include <complex>
#include <vector>

namespace klsum {

// Smooth compactly supported weights built from the standard mollifier
// t -> exp(-1/(1-t^2)) via its smoothstep integral.  Two plateau layouts:
//  - fixed_support: support exactly [center-halfwidth, center+halfwidth],
//    transition ramps of width halfwidth/sharpness just inside the support;
//  - transition_delta: value exactly 1 on [center-halfwidth, center+halfwidth],
//    ramps of width 1/sharpness just outside it.
// In both layouts the j-th derivative grows like sharpness^j.
enum class BumpKind { fixed_support, transition_delta };

struct BumpSpec {
    BumpKind kind = BumpKind::fixed_support;
    double center = 1.0;
    double halfwidth = 0.05;
    double sharpness = 1.0;
};

// f(t) = exp(-1/t) glued into a C-infinity ramp: 0 for t<=0, 1 for t>=1.
double smoothstep(double t);

class Bump {
  public:
    Bump(double r1, double r2, double r3, double r4);
    double operator()(double t) const;
    // Central finite-difference derivative, orders 0..4.
    double derivative(int order, double t) const;
    double support_lo() const { return r1_; }
    double support_hi() const { return r4_; }
    double plateau_lo() const { return r2_; }
    double plateau_hi() const { return r3_; }

  private:
    double r1_, r2_, r3_, r4_; // rise on [r1,r2], plateau [r2,r3], fall [r3,r4]
};

Bump make_bump(const BumpSpec& spec);

// Tabulated Fourier transform  what(omega) = int W(t) e(-2*pi*i*omega*t) dt
// of a bump, from one zero-padded FFT of midpoint samples.  The table stores
// the demodulated transform A(omega) = what(omega) * e(+2*pi*i*omega*center),
// which is smooth on the scale 1/support-width, so 6-point Lagrange
// interpolation between nodes recovers 10-11 digits.  Also keeps the
// nonincreasing suffix-max magnitude envelope, used for tail certification.
class BumpTransform {
  public:
    explicit BumpTransform(const Bump& w, int log2_fft = 19, int samples = 8192);

    std::complex<double> eval(double omega) const; // any |omega| <= omega_max()
    double envelope(double omega) const; // sup of |what| over |omega'| >= |omega|
    // Smallest tabulated omega with envelope(omega) <= delta.
    double cut(double delta) const;
    double omega_max() const { return omega_max_; }
    double mass() const { return mass_; } // what(0) = int W
    double node_spacing() const { return d_omega_; }

  private:
    std::vector<std::complex<double>> table_; // A(k * d_omega)
    std::vector<double> env_;                 // suffix max of |table_|
    double d_omega_, omega_max_, center_, mass_;
};

} // namespace klsum

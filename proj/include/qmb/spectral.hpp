#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qmb/common.hpp"

namespace qmb {

// S(t_j) sampled at t_j = j dt, j = 1..M.
struct TimeSeries {
  double dt = 0.0;
  std::vector<cplx> values;
  double error_std = 0.0;  // per-point standard deviation E_S, 0 if exact

  std::size_t size() const { return values.size(); }
  double time(std::size_t j) const { return dt * static_cast<double>(j + 1); }
  void validate() const;
};

struct Peak {
  double lambda = 0.0;
  double weight = 0.0;
  double err_freq = 0.0;
  double err_amp = 0.0;
  int bin = 0;
  bool refined = false;
  bool flagged_close = false;  // another peak within 2 bins; not refined
};

struct Spectrum {
  double dt = 0.0;
  int M = 0;
  std::vector<double> eta;  // eta_l = 2 pi l/(M dt), wrapped into (-pi/dt, pi/dt]
  std::vector<cplx> values;
  std::vector<Peak> peaks;

  double bin_width() const { return 2.0 * kPi / (M * dt); }
};

struct PeakOptions {
  double rel_threshold = 0.10;
  double denom_tol = 1e-9;  // relative to max |S~|
  int min_separation = 2;   // bins
};

// Maps a frequency into (-pi/dt, pi/dt].
double wrap_frequency(double eta, double dt);

// S~(eta_l) = dt sum_j S(t_j) e^{i eta_l t_j}, l = 0..M-1. No peak search.
Spectrum dft(const TimeSeries& series);

struct Refinement {
  double lambda = 0.0;
  bool refined = false;
};

// lambda = eta_l + dlambda from bins l and l+1 (cyclic). If the denominator is
// below tol the bin center is returned unrefined.
Refinement refine_peak(const Spectrum& spec, int l, double tol);
Refinement refine_peak(const Spectrum& spec, int l);

// Kernel of a unit-weight line: dt sum_j e^{i x j dt}.
cplx line_kernel(double x, double dt, int M);

struct ErrorBars {
  double err_amp = 0.0;   // E_S / sqrt(M)
  double err_freq = 0.0;  // 2 pi/(M dt)
};

ErrorBars error_bars(const TimeSeries& series);

// Local maxima of |S~| above rel_threshold * max, refined and weighted.
std::vector<Peak> find_peaks(const Spectrum& spec, const TimeSeries& series, const PeakOptions& opt = {});

// dft + find_peaks.
Spectrum analyze(const TimeSeries& series, const PeakOptions& opt = {});

void write_series_csv(std::ostream& os, const TimeSeries& series);
TimeSeries read_series_csv(std::istream& is, double error_std = 0.0);
void write_spectrum_csv(std::ostream& os, const Spectrum& spec);
std::string peaks_json(const std::vector<Peak>& peaks);

}  // namespace qmb

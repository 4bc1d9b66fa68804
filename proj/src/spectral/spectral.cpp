#include "qmb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qmb {

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time series: dt must be positive");
  if (values.size() < 2) throw std::invalid_argument("time series: need M >= 2 samples");
  if (error_std < 0.0) throw std::invalid_argument("time series: negative error");
}

double wrap_frequency(double eta, double dt) {
  const double period = 2.0 * kPi / dt;
  double w = std::fmod(eta, period);
  if (w <= -period / 2) w += period;
  if (w > period / 2) w -= period;
  return w;
}

Spectrum dft(const TimeSeries& series) {
  series.validate();
  const int M = static_cast<int>(series.size());
  Spectrum sp;
  sp.dt = series.dt;
  sp.M = M;
  sp.eta.resize(M);
  sp.values.assign(M, cplx{0.0, 0.0});
  for (int l = 0; l < M; ++l) {
    sp.eta[l] = wrap_frequency(2.0 * kPi * l / (M * series.dt), series.dt);
    // e^{i eta_l t_j} = e^{2 pi i l j / M}; reduce l*j mod M to keep the phase exact
    cplx acc{0.0, 0.0};
    for (int j = 1; j <= M; ++j) {
      const long long k = (static_cast<long long>(l) * j) % M;
      acc += series.values[j - 1] * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / M);
    }
    sp.values[l] = series.dt * acc;
  }
  return sp;
}

Refinement refine_peak(const Spectrum& spec, int l, double tol) {
  if (spec.M < 2 || l < 0 || l >= spec.M) throw std::out_of_range("refine_peak: bin out of range");
  const cplx a = spec.values[l];
  const cplx b = spec.values[(l + 1) % spec.M];
  const cplx den = a - b;
  if (std::abs(den) < tol) return {spec.eta[l], false};
  const double d = -spec.bin_width() * (b / den).real();
  return {wrap_frequency(spec.eta[l] + d, spec.dt), true};
}

Refinement refine_peak(const Spectrum& spec, int l) {
  double mx = 0.0;
  for (const auto& v : spec.values) mx = std::max(mx, std::abs(v));
  return refine_peak(spec, l, 1e-9 * mx);
}

cplx line_kernel(double x, double dt, int M) {
  cplx acc{0.0, 0.0};
  for (int j = 1; j <= M; ++j) acc += std::polar(1.0, x * j * dt);
  return dt * acc;
}

ErrorBars error_bars(const TimeSeries& series) {
  series.validate();
  const double M = static_cast<double>(series.size());
  return {series.error_std / std::sqrt(M), 2.0 * kPi / (M * series.dt)};
}

std::vector<Peak> find_peaks(const Spectrum& spec, const TimeSeries& series, const PeakOptions& opt) {
  const int M = spec.M;
  std::vector<double> mag(M);
  double mx = 0.0;
  for (int l = 0; l < M; ++l) {
    mag[l] = std::abs(spec.values[l]);
    mx = std::max(mx, mag[l]);
  }
  if (mx == 0.0) return {};
  std::vector<int> seeds;
  for (int l = 0; l < M; ++l) {
    const double left = mag[(l + M - 1) % M];
    const double right = mag[(l + 1) % M];
    if (mag[l] >= opt.rel_threshold * mx && mag[l] > left && mag[l] >= right) seeds.push_back(l);
  }
  const ErrorBars eb = error_bars(series);
  std::vector<Peak> out;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const int l = seeds[s];
    Peak p;
    p.bin = l;
    p.err_amp = eb.err_amp;
    p.err_freq = eb.err_freq;
    for (std::size_t r = 0; r < seeds.size(); ++r) {
      if (r == s) continue;
      const int gap = std::abs(seeds[r] - l);
      if (std::min(gap, M - gap) <= opt.min_separation) p.flagged_close = true;
    }
    if (p.flagged_close) {
      p.lambda = spec.eta[l];
    } else {
      // bracket the line between l and its larger neighbour
      const int base = mag[(l + 1) % M] >= mag[(l + M - 1) % M] ? l : (l + M - 1) % M;
      const Refinement r = refine_peak(spec, base, opt.denom_tol * mx);
      p.lambda = r.refined ? r.lambda : spec.eta[l];
      p.refined = r.refined;
    }
    const double k = std::abs(line_kernel(spec.eta[l] - p.lambda, spec.dt, M));
    p.weight = k > 0.0 ? mag[l] / k : 0.0;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.lambda < b.lambda; });
  return out;
}

Spectrum analyze(const TimeSeries& series, const PeakOptions& opt) {
  Spectrum sp = dft(series);
  sp.peaks = find_peaks(sp, series, opt);
  return sp;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

}  // namespace

void write_series_csv(std::ostream& os, const TimeSeries& series) {
  os << "t,re(S),im(S)\n";
  for (std::size_t j = 0; j < series.size(); ++j)
    os << num(series.time(j)) << ',' << num(series.values[j].real()) << ',' << num(series.values[j].imag()) << '\n';
}

TimeSeries read_series_csv(std::istream& is, double error_std) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("series csv: empty input");
  std::vector<double> ts;
  TimeSeries s;
  s.error_std = error_std;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    double t = 0, re = 0, im = 0;
    if (!(in >> t >> re >> im)) throw std::invalid_argument("series csv: bad row " + std::to_string(row));
    ts.push_back(t);
    s.values.emplace_back(re, im);
  }
  if (ts.size() < 2) throw std::invalid_argument("time series: need M >= 2 samples");
  s.dt = ts[0];
  for (std::size_t j = 0; j < ts.size(); ++j)
    if (std::abs(ts[j] - s.dt * static_cast<double>(j + 1)) > 1e-9 * std::max(1.0, std::abs(ts[j])))
      throw std::invalid_argument("series csv: grid is not t_j = j dt");
  s.validate();
  return s;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
  os << "eta,re(Stilde),im(Stilde)\n";
  for (int l = 0; l < spec.M; ++l)
    os << num(spec.eta[l]) << ',' << num(spec.values[l].real()) << ',' << num(spec.values[l].imag()) << '\n';
}

std::string peaks_json(const std::vector<Peak>& peaks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : peaks)
    arr.push_back({{"lambda", p.lambda}, {"weight", p.weight}, {"err_freq", p.err_freq}, {"err_amp", p.err_amp}});
  return arr.dump(2);
}

}  // namespace qmb

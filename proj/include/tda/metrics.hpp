#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tda/types.hpp"

namespace tda {

/// Time domain average of the first `use_first_n` frames:
/// samples[k] = mean over those frames of sample k.
TdaSignal direct_tda(const RecordSet& rs, std::size_t use_first_n);

/// Per-sample estimation error, desired minus achieved.
std::vector<double> fit_error(const TdaSignal& desired, const TdaSignal& achieved);

/// Percentage fit metric: 100 * sum|e(k)| / sum|y_desired(k)|.
/// Lower is better; 0 means an exact fit.
struct FitReport {
    double eta_sim_percent = 0.0;
    std::size_t n_points = 0;
    std::vector<double> per_sample_error;
};

FitReport eta_sim(const TdaSignal& desired, const TdaSignal& achieved);

/// Standardized fourth moment with population normalization:
/// mean((x-mu)^4) / var(x)^2. No excess convention, no -3.
double kurtosis(std::span<const double> samples);
double kurtosis(const TdaSignal& s);

/// Largest absolute sample value.
double peak_value(std::span<const double> samples);
double peak_value(const TdaSignal& s);

struct DiagnosticMetrics {
    double kurtosis = 0.0;
    double peak = 0.0;
};

DiagnosticMetrics diagnostics(const TdaSignal& s);

/// One-sided DFT magnitudes, bins 0..N/2, normalized by N so a unit cosine
/// at an integer order shows as a 0.5 line at that bin. Bin index equals
/// shaft order for rotation-synchronized signals.
std::vector<double> magnitude_spectrum(std::span<const double> samples);
std::vector<double> magnitude_spectrum(const TdaSignal& s);

}  // namespace tda

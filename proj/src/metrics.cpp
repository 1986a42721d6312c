#include "tda/metrics.hpp"

#include <cmath>
#include <string>

namespace tda {

void TdaSignal::validate() const {
    if (points_per_rev <= 0 || samples.size() != static_cast<std::size_t>(points_per_rev))
        throw ValidationError("TdaSignal: samples length must equal points_per_rev > 0");
    for (double x : samples)
        if (!std::isfinite(x)) throw ValidationError("TdaSignal: non-finite sample");
}

TdaSignal direct_tda(const RecordSet& rs, std::size_t use_first_n) {
    rs.validate();
    if (use_first_n < 1 || use_first_n > rs.frame_count())
        throw ValidationError("direct_tda: use_first_n out of range [1, frame_count]");

    const std::size_t n_points = static_cast<std::size_t>(rs.points_per_rev);
    TdaSignal out;
    out.points_per_rev = rs.points_per_rev;
    out.source = SignalSource::DirectAverage;
    out.samples.assign(n_points, 0.0);

    const double inv = 1.0 / static_cast<double>(use_first_n);
    // Per-sample sums run over frames in index order, so the result does not
    // depend on the thread count.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_points); ++k) {
        double acc = 0.0;
        for (std::size_t r = 0; r < use_first_n; ++r)
            acc += rs.frames(r, static_cast<std::size_t>(k));
        out.samples[static_cast<std::size_t>(k)] = acc * inv;
    }
    return out;
}

std::vector<double> fit_error(const TdaSignal& desired, const TdaSignal& achieved) {
    if (desired.samples.size() != achieved.samples.size())
        throw ValidationError("fit_error: desired and achieved lengths differ");
    std::vector<double> e(desired.samples.size());
    for (std::size_t k = 0; k < e.size(); ++k)
        e[k] = desired.samples[k] - achieved.samples[k];
    return e;
}

FitReport eta_sim(const TdaSignal& desired, const TdaSignal& achieved) {
    FitReport report;
    report.per_sample_error = fit_error(desired, achieved);
    report.n_points = report.per_sample_error.size();

    double err_sum = 0.0;
    double ref_sum = 0.0;
    for (std::size_t k = 0; k < report.n_points; ++k) {
        err_sum += std::abs(report.per_sample_error[k]);
        ref_sum += std::abs(desired.samples[k]);
    }
    if (ref_sum <= 0.0)
        throw NumericError("eta_sim: undefined for an all-zero desired signal");
    report.eta_sim_percent = 100.0 * err_sum / ref_sum;
    return report;
}

double kurtosis(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 4) throw ValidationError("kurtosis: need at least 4 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 <= 0.0) throw NumericError("kurtosis: undefined for zero-variance signal");
    return m4 / (m2 * m2);
}

double kurtosis(const TdaSignal& s) { return kurtosis(std::span<const double>(s.samples)); }

double peak_value(std::span<const double> samples) {
    if (samples.empty()) throw ValidationError("peak_value: empty signal");
    double peak = 0.0;
    for (double x : samples) peak = std::max(peak, std::abs(x));
    return peak;
}

double peak_value(const TdaSignal& s) { return peak_value(std::span<const double>(s.samples)); }

DiagnosticMetrics diagnostics(const TdaSignal& s) {
    return DiagnosticMetrics{kurtosis(s), peak_value(s)};
}

std::vector<double> magnitude_spectrum(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw ValidationError("magnitude_spectrum: need at least 2 samples");
    const std::size_t n_bins = n / 2 + 1;
    std::vector<double> mags(n_bins);

    constexpr double kTwoPi = 6.283185307179586476925286766559;
    // Goertzel recurrence per bin; bins are independent.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bin = 0; bin < static_cast<std::ptrdiff_t>(n_bins); ++bin) {
        const double w = kTwoPi * static_cast<double>(bin) / static_cast<double>(n);
        const double cw = std::cos(w);
        const double coeff = 2.0 * cw;
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s0 = samples[i] + coeff * s1 - s2;
            s2 = s1;
            s1 = s0;
        }
        const double re = s1 - s2 * cw;
        const double im = s2 * std::sin(w);
        mags[static_cast<std::size_t>(bin)] =
            std::sqrt(re * re + im * im) / static_cast<double>(n);
    }
    return mags;
}

std::vector<double> magnitude_spectrum(const TdaSignal& s) {
    return magnitude_spectrum(std::span<const double>(s.samples));
}

}  // namespace tda

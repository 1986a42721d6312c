#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tda {

/// Raised when an input violates a documented precondition. The message
/// names the offending field or parameter.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised on file-format or I/O failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a metric or solver result is mathematically undefined
/// (zero variance, all-zero reference signal, diverged training run).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles. Rows are the natural unit here:
/// revolution frames, training examples, basis centers.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

/// Ordered collection of rotation-synchronized revolution frames for one
/// gear-life stage. Frame r is row r of `frames`; every frame holds exactly
/// `points_per_rev` samples, one per shaft angle.
struct RecordSet {
    Matrix frames;            // frame_count x points_per_rev
    int points_per_rev = 0;
    double life_fraction = 0.0;
    int stage_index = 0;
    std::uint64_t rng_seed = 0;

    std::size_t frame_count() const { return frames.rows; }
    std::span<const double> frame(std::size_t r) const { return frames.row(r); }

    void validate() const {
        if (points_per_rev <= 0)
            throw ValidationError("RecordSet: points_per_rev must be positive");
        if (frames.cols != static_cast<std::size_t>(points_per_rev))
            throw ValidationError("RecordSet: frames width does not match points_per_rev");
        if (frames.rows == 0)
            throw ValidationError("RecordSet: frames is empty");
        if (life_fraction < 0.0 || life_fraction > 1.0)
            throw ValidationError("RecordSet: life_fraction outside [0,1]");
        if (stage_index < 0)
            throw ValidationError("RecordSet: stage_index negative");
    }

    bool operator==(const RecordSet&) const = default;
};

enum class SignalSource : std::uint8_t {
    DirectAverage = 0,
    Model1Estimate = 1,
    Model2Estimate = 2,
};

inline const char* to_string(SignalSource s) {
    switch (s) {
        case SignalSource::DirectAverage: return "direct";
        case SignalSource::Model1Estimate: return "model1";
        case SignalSource::Model2Estimate: return "model2";
    }
    return "?";
}

/// One averaged waveform over a single revolution. Both the direct average
/// and the model estimates use this type.
struct TdaSignal {
    std::vector<double> samples;
    int points_per_rev = 0;
    SignalSource source = SignalSource::DirectAverage;

    void validate() const;

    bool operator==(const TdaSignal&) const = default;
};

}  // namespace tda

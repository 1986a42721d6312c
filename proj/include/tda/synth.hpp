#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tda/types.hpp"

namespace tda::synth {

/// Parameters of one synthetic gear-vibration stage: a tooth-meshing
/// waveform with optional crack-induced amplitude/phase modulation and
/// additive Gaussian noise.
struct GearSignalSpec {
    int teeth_count = 25;
    int points_per_rev = 1024;
    int revolutions = 160;
    std::vector<double> harmonic_amplitudes{1.0, 0.5, 0.25};
    std::vector<double> harmonic_phases{0.0, 0.7, 1.9};
    double noise_std = 0.25;
    double crack_severity = 0.0;   // 0 = healthy, 1 = fully developed
    int crack_tooth_index = 7;
    std::uint64_t rng_seed = 0;

    void validate() const;

    bool operator==(const GearSignalSpec&) const = default;
};

// Peak modulation applied at crack_severity = 1: the cracked tooth's mesh
// amplitude grows by 80% and its phase shifts by 0.5 rad, inside a
// raised-cosine window one tooth pitch wide.
inline constexpr double kCrackAmplitudePeak = 0.8;
inline constexpr double kCrackPhasePeakRad = 0.5;

/// Noise-free modulated mesh waveform for one revolution (points_per_rev
/// samples). Every frame of the stage equals this plus per-frame noise.
std::vector<double> mesh_waveform(const GearSignalSpec& spec);

/// Generates the full stage: `spec.revolutions` frames, frame r carrying
/// noise from a generator seeded by (spec.rng_seed, r). Identical specs
/// produce bit-identical output.
RecordSet synthesize_stage(const GearSignalSpec& spec);

/// Bathtub life schedule: `stages` specs with elevated noise for the first
/// two stages (running-in), healthy mid-life, and crack severity ramping to
/// exactly 1.0 over the final third (wear-out). Each spec gets a distinct
/// derived rng_seed, stage_index i and life fraction i/(stages-1).
std::vector<GearSignalSpec> life_schedule(const GearSignalSpec& base, int stages);

/// Noise multiplier applied to the running-in stages of life_schedule.
inline constexpr double kRunningInNoiseFactor = 1.5;

// Binary stage file, magic "TDA1". Header: version u16, points_per_rev u32,
// frame_count u32, stage_index u16, life_fraction f64, rng_seed u64;
// payload: frame-major f64 samples, little-endian.
void write_recordset(const RecordSet& rs, const std::filesystem::path& path);
RecordSet read_recordset(const std::filesystem::path& path);

/// Reads only the first `max_frames` frames of a stage file (the payload
/// prefix). Used by consumers that deliberately touch a fraction of the
/// recorded data.
RecordSet read_recordset_prefix(const std::filesystem::path& path, std::size_t max_frames);

}  // namespace tda::synth

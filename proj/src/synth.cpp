#include "tda/synth.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "tda/io.hpp"
#include "tda/rng.hpp"

namespace tda::synth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint16_t kFormatVersion = 1;
constexpr char kMagic[5] = "TDA1";

}  // namespace

void GearSignalSpec::validate() const {
    if (teeth_count < 1)
        throw ValidationError("GearSignalSpec.teeth_count must be >= 1");
    if (points_per_rev < 2)
        throw ValidationError("GearSignalSpec.points_per_rev must be >= 2");
    if (revolutions < 1)
        throw ValidationError("GearSignalSpec.revolutions must be >= 1");
    if (harmonic_amplitudes.empty())
        throw ValidationError("GearSignalSpec.harmonic_amplitudes must be non-empty");
    if (harmonic_amplitudes.size() != harmonic_phases.size())
        throw ValidationError(
            "GearSignalSpec.harmonic_phases length must equal harmonic_amplitudes length");
    // Highest mesh harmonic must stay below the angular Nyquist order.
    const long long nyq = 2LL * teeth_count * static_cast<long long>(harmonic_amplitudes.size());
    if (points_per_rev < nyq)
        throw ValidationError(
            "GearSignalSpec.points_per_rev must be >= 2 * teeth_count * number of harmonics");
    if (!(noise_std >= 0.0))
        throw ValidationError("GearSignalSpec.noise_std must be >= 0");
    if (!(crack_severity >= 0.0 && crack_severity <= 1.0))
        throw ValidationError("GearSignalSpec.crack_severity must be in [0,1]");
    if (crack_tooth_index < 0 || crack_tooth_index >= teeth_count)
        throw ValidationError("GearSignalSpec.crack_tooth_index must be in [0, teeth_count)");
}

std::vector<double> mesh_waveform(const GearSignalSpec& spec) {
    spec.validate();
    const int n_points = spec.points_per_rev;
    const double tooth_pitch = kTwoPi / spec.teeth_count;
    const double crack_center = (spec.crack_tooth_index + 0.5) * tooth_pitch;
    const std::size_t n_harm = spec.harmonic_amplitudes.size();

    std::vector<double> wave(static_cast<std::size_t>(n_points));
    for (int n = 0; n < n_points; ++n) {
        const double theta = kTwoPi * n / n_points;
        // Raised-cosine modulation window, one tooth pitch wide, centered on
        // the cracked tooth. Angular distance wraps around the revolution.
        double d = std::remainder(theta - crack_center, kTwoPi);
        double window = 0.0;
        if (std::abs(d) <= 0.5 * tooth_pitch)
            window = 0.5 * (1.0 + std::cos(kTwoPi * d / tooth_pitch));
        const double amp_mod = kCrackAmplitudePeak * spec.crack_severity * window;
        const double phase_mod = kCrackPhasePeakRad * spec.crack_severity * window;

        double s = 0.0;
        for (std::size_t m = 0; m < n_harm; ++m) {
            const double order = static_cast<double>((m + 1) * spec.teeth_count);
            s += spec.harmonic_amplitudes[m] * (1.0 + amp_mod) *
                 std::cos(order * theta + spec.harmonic_phases[m] + phase_mod);
        }
        wave[static_cast<std::size_t>(n)] = s;
    }
    return wave;
}

RecordSet synthesize_stage(const GearSignalSpec& spec) {
    spec.validate();
    const std::vector<double> clean = mesh_waveform(spec);
    const int n_points = spec.points_per_rev;

    RecordSet rs;
    rs.points_per_rev = n_points;
    rs.rng_seed = spec.rng_seed;
    rs.frames = Matrix(static_cast<std::size_t>(spec.revolutions),
                       static_cast<std::size_t>(n_points));

    // Frames are independent streams: frame r draws from a generator seeded
    // by (rng_seed, r), so the loop parallelizes without changing output.
#pragma omp parallel for schedule(static)
    for (int r = 0; r < spec.revolutions; ++r) {
        GaussianGen gen(mix_seed(spec.rng_seed, static_cast<std::uint64_t>(r)));
        auto row = rs.frames.row(static_cast<std::size_t>(r));
        if (spec.noise_std > 0.0) {
            for (int n = 0; n < n_points; ++n)
                row[static_cast<std::size_t>(n)] =
                    clean[static_cast<std::size_t>(n)] + spec.noise_std * gen.normal();
        } else {
            for (int n = 0; n < n_points; ++n)
                row[static_cast<std::size_t>(n)] = clean[static_cast<std::size_t>(n)];
        }
    }
    return rs;
}

std::vector<GearSignalSpec> life_schedule(const GearSignalSpec& base, int stages) {
    base.validate();
    if (stages < 2) throw ValidationError("life_schedule: stages must be >= 2");

    // Wear-out covers the final third of the schedule; severity ramps
    // linearly and reaches exactly 1.0 at the last stage.
    const int wear_len = (stages + 2) / 3;
    const int wear_start = stages - wear_len;
    const int running_in = std::min(2, wear_start);

    std::vector<GearSignalSpec> out;
    out.reserve(static_cast<std::size_t>(stages));
    for (int i = 0; i < stages; ++i) {
        GearSignalSpec s = base;
        s.rng_seed = mix_seed(base.rng_seed, 0x5747A6E5u + static_cast<std::uint64_t>(i));
        if (i < running_in) {
            s.noise_std = base.noise_std * kRunningInNoiseFactor;
            s.crack_severity = 0.0;
        } else if (i >= wear_start) {
            s.noise_std = base.noise_std;
            s.crack_severity = static_cast<double>(i - wear_start + 1) / wear_len;
        } else {
            s.noise_std = base.noise_std;
            s.crack_severity = 0.0;
        }
        out.push_back(std::move(s));
    }
    out.back().crack_severity = 1.0;
    return out;
}

void write_recordset(const RecordSet& rs, const std::filesystem::path& path) {
    rs.validate();
    if (rs.stage_index > 0xFFFF)
        throw ValidationError("write_recordset: stage_index exceeds format limit (u16)");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("write_recordset: cannot open " + path.string());
    io::BinaryWriter w(os);
    w.magic(kMagic);
    w.u16(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(rs.points_per_rev));
    w.u32(static_cast<std::uint32_t>(rs.frame_count()));
    w.u16(static_cast<std::uint16_t>(rs.stage_index));
    w.f64(rs.life_fraction);
    w.u64(rs.rng_seed);
    for (double x : rs.frames.data) w.f64(x);
    os.flush();
    if (!os) throw IoError("write_recordset: write failed for " + path.string());
}

namespace {

RecordSet read_recordset_impl(const std::filesystem::path& path, std::size_t max_frames,
                              bool allow_prefix) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_recordset: cannot open " + path.string());
    io::BinaryReader r(is);
    r.expect_magic(kMagic, "recordset");
    const std::uint16_t version = r.u16("version");
    if (version != kFormatVersion)
        throw IoError("read_recordset: unsupported format version " + std::to_string(version));

    RecordSet rs;
    const std::uint32_t ppr = r.u32("points_per_rev");
    const std::uint32_t frame_count = r.u32("frame_count");
    rs.points_per_rev = static_cast<int>(ppr);
    rs.stage_index = r.u16("stage_index");
    rs.life_fraction = r.f64("life_fraction");
    rs.rng_seed = r.u64("rng_seed");
    if (ppr == 0 || frame_count == 0)
        throw IoError("read_recordset: empty frame geometry in header");

    const std::size_t want = allow_prefix
                                 ? std::min<std::size_t>(frame_count, max_frames)
                                 : static_cast<std::size_t>(frame_count);
    rs.frames = Matrix(want, ppr);
    for (std::size_t i = 0; i < rs.frames.data.size(); ++i)
        rs.frames.data[i] = r.f64("samples (declared frame count does not match payload)");
    if (!allow_prefix && !r.at_eof())
        throw IoError("read_recordset: trailing bytes after declared payload");
    return rs;
}

}  // namespace

RecordSet read_recordset(const std::filesystem::path& path) {
    return read_recordset_impl(path, 0, false);
}

RecordSet read_recordset_prefix(const std::filesystem::path& path, std::size_t max_frames) {
    if (max_frames == 0)
        throw ValidationError("read_recordset_prefix: max_frames must be >= 1");
    return read_recordset_impl(path, max_frames, true);
}

}  // namespace tda::synth

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <utility>
#include <vector>

#include "tda/metrics.hpp"
#include "tda/regressor.hpp"
#include "tda/types.hpp"

namespace tda::pipeline {

enum class ModelKind : std::uint8_t { Model1 = 0, Model2 = 1 };

const char* to_string(ModelKind k);

/// Single-stage mapping: input_frames synchronous samples in, the full-set
/// average out. Defaults reproduce the 40-of-160 configuration.
struct Model1Config {
    int input_frames = 40;
    int total_frames = 160;
    RegressorConfig regressor;

    void validate() const;
    bool operator==(const Model1Config&) const = default;
};

/// Two-stage running-average estimation with bounded frame storage.
/// subsection_size must divide total_frames.
struct Model2Config {
    int subsection_size = 10;
    int total_frames = 160;
    RegressorConfig regressor;
    // SVR training sets are strided down to at most this many rows.
    std::size_t svr_max_train_rows = 1024;

    void validate() const;
    bool operator==(const Model2Config&) const = default;
};

struct TrainedModel {
    ModelKind kind = ModelKind::Model1;
    Model1Config model1;  // meaningful when kind == Model1
    Model2Config model2;  // meaningful when kind == Model2
    int points_per_rev = 0;
    RegressorParams stage1;
    std::optional<RegressorParams> stage2;  // Model2 only

    bool operator==(const TrainedModel&) const = default;
};

/// Frames-touched instrumentation for Model 1 estimates.
struct DataAudit {
    std::size_t frames_read = 0;
    std::size_t frames_available = 0;
    double fraction_percent = 0.0;
};

/// Peak-residency instrumentation for Model 2 streaming estimates. The
/// resident unit is one waveform of points_per_rev samples (a raw frame or
/// a subsection estimate).
struct StorageAudit {
    std::size_t peak_frames_resident = 0;
    std::size_t total_frames_consumed = 0;
    double storage_fraction_percent = 0.0;
};

/// Sequential frame supplier for streaming estimation. next() fills `out`
/// with the next frame and returns false when exhausted.
class FrameSource {
  public:
    virtual ~FrameSource() = default;
    virtual bool next(std::vector<double>& out) = 0;
};

class RecordSetFrameSource final : public FrameSource {
  public:
    explicit RecordSetFrameSource(const RecordSet& rs) : rs_(&rs) {}
    bool next(std::vector<double>& out) override;

  private:
    const RecordSet* rs_;
    std::size_t pos_ = 0;
};

/// Streams frames straight from a stage file without loading the whole set.
class FileFrameSource final : public FrameSource {
  public:
    explicit FileFrameSource(const std::filesystem::path& path);
    bool next(std::vector<double>& out) override;
    int points_per_rev() const { return points_per_rev_; }
    std::size_t frame_count() const { return frame_count_; }

  private:
    std::ifstream is_;
    int points_per_rev_ = 0;
    std::size_t frame_count_ = 0;
    std::size_t pos_ = 0;
};

// Dataset assembly, exposed for tests and tooling.
// Model 1: one example per sample index; inputs are that index's samples
// across the first input_frames frames, the target is the full average.
Matrix make_model1_inputs(const RecordSet& rs, int input_frames,
                          std::vector<char>* touched = nullptr);
std::pair<Matrix, std::vector<double>> make_model1_dataset(const RecordSet& rs,
                                                           const Model1Config& cfg);
// Model 2 stage 1: per sample index and subsection, the subsection's
// synchronous samples in, their mean out; examples pooled over subsections.
std::pair<Matrix, std::vector<double>> make_model2_stage1_dataset(const RecordSet& rs,
                                                                  int subsection_size);

TrainedModel model1_train(const RecordSet& train_rs, const Model1Config& cfg);
TdaSignal model1_estimate(const TrainedModel& m, const RecordSet& frames,
                          DataAudit* audit = nullptr);

TrainedModel model2_train(const RecordSet& train_rs, const Model2Config& cfg);
std::pair<TdaSignal, StorageAudit> model2_estimate_stream(const TrainedModel& m,
                                                          FrameSource& frames);

// Predictor-injected estimation cores (the trained-model entry points wrap
// these; tests can substitute exact stand-ins).
TdaSignal model1_estimate_with(const Predictor& predictor, const RecordSet& frames,
                               int input_frames, DataAudit* audit = nullptr);
std::pair<TdaSignal, StorageAudit> model2_estimate_stream_with(const Predictor& stage1,
                                                               const Predictor& stage2,
                                                               FrameSource& frames,
                                                               int subsection_size,
                                                               int total_frames,
                                                               int points_per_rev);

struct EvaluationReport {
    ModelKind model = ModelKind::Model1;
    RegressorKind regressor = RegressorKind::Mlp;
    int stage_index = 0;
    double life_fraction = 0.0;
    FitReport fit;
    double kurtosis_direct = 0.0;
    double kurtosis_estimate = 0.0;
    double peak_direct = 0.0;
    double peak_estimate = 0.0;
    std::vector<double> spectrum_direct;
    std::vector<double> spectrum_estimate;
    double direct_seconds = 0.0;
    double estimate_seconds = 0.0;
};

/// Direct average of every stage versus each model's estimate, one report
/// per (model, stage), models outermost.
std::vector<EvaluationReport> evaluate_over_life(const std::vector<TrainedModel>& models,
                                                 const std::vector<RecordSet>& stages);

// Model container file, magic "TMD1": pipeline kind, config snapshot and the
// stage regressor blobs.
void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tda::pipeline

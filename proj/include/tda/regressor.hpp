#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>

#include "tda/mlp.hpp"
#include "tda/rbf.hpp"
#include "tda/svr.hpp"
#include "tda/types.hpp"

namespace tda {

enum class RegressorKind : std::uint8_t { Mlp = 0, Rbf = 1, Svr = 2 };

const char* to_string(RegressorKind k);
RegressorKind regressor_kind_from_string(const std::string& name);

/// Everything needed to train one scalar-output regressor of any kind.
struct RegressorConfig {
    RegressorKind kind = RegressorKind::Mlp;
    std::uint64_t seed = 0;
    int mlp_hidden_units = 5;
    nets::TrainConfig mlp_train;
    int rbf_num_centers = 5;
    double rbf_ridge = 1e-8;
    svr::SvrConfig svr;

    bool operator==(const RegressorConfig&) const = default;
};

/// Trained parameters of one regressor, tagged by kind. Serializable as a
/// versioned "RGP1" blob.
struct RegressorParams {
    RegressorKind kind = RegressorKind::Mlp;
    std::variant<nets::MlpParams, nets::RbfParams, svr::SvrParams> value;

    bool operator==(const RegressorParams&) const = default;
};

RegressorParams train_regressor(const RegressorConfig& cfg, const Matrix& X,
                                std::span<const double> y);

double predict_scalar(const RegressorParams& p, std::span<const double> x);

void save_regressor(std::ostream& os, const RegressorParams& p);
RegressorParams load_regressor(std::istream& is);

/// Single-output prediction interface; lets the pipelines run against any
/// backend, including test stand-ins.
class Predictor {
  public:
    virtual ~Predictor() = default;
    virtual double predict(std::span<const double> x) const = 0;
};

class ParamsPredictor final : public Predictor {
  public:
    explicit ParamsPredictor(const RegressorParams& p) : params_(&p) {}
    double predict(std::span<const double> x) const override {
        return predict_scalar(*params_, x);
    }

  private:
    const RegressorParams* params_;
};

}  // namespace tda

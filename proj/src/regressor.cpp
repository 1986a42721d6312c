#include "tda/regressor.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "tda/io.hpp"

namespace tda {

namespace {
constexpr char kMagic[5] = "RGP1";
constexpr std::uint16_t kVersion = 1;
}  // namespace

const char* to_string(RegressorKind k) {
    switch (k) {
        case RegressorKind::Mlp: return "mlp";
        case RegressorKind::Rbf: return "rbf";
        case RegressorKind::Svr: return "svr";
    }
    return "?";
}

RegressorKind regressor_kind_from_string(const std::string& name) {
    if (name == "mlp") return RegressorKind::Mlp;
    if (name == "rbf") return RegressorKind::Rbf;
    if (name == "svr") return RegressorKind::Svr;
    throw ValidationError("unknown regressor '" + name + "' (expected mlp, rbf or svr)");
}

RegressorParams train_regressor(const RegressorConfig& cfg, const Matrix& X,
                                std::span<const double> y) {
    if (X.rows != y.size())
        throw ValidationError("train_regressor: X rows must equal target length");
    RegressorParams out;
    out.kind = cfg.kind;
    switch (cfg.kind) {
        case RegressorKind::Mlp: {
            Matrix Y(X.rows, 1);
            for (std::size_t i = 0; i < X.rows; ++i) Y(i, 0) = y[i];
            nets::TrainConfig tc = cfg.mlp_train;
            tc.seed = cfg.seed;
            const nets::MlpParams init =
                nets::mlp_init(static_cast<int>(X.cols), cfg.mlp_hidden_units, 1, cfg.seed);
            out.value = nets::scg_train(init, X, Y, tc);
            break;
        }
        case RegressorKind::Rbf: {
            Matrix Y(X.rows, 1);
            for (std::size_t i = 0; i < X.rows; ++i) Y(i, 0) = y[i];
            out.value = nets::rbf_train(X, Y, cfg.rbf_num_centers, cfg.seed, cfg.rbf_ridge);
            break;
        }
        case RegressorKind::Svr: {
            out.value = svr::svr_train(X, y, cfg.svr);
            break;
        }
    }
    return out;
}

double predict_scalar(const RegressorParams& p, std::span<const double> x) {
    switch (p.kind) {
        case RegressorKind::Mlp:
            return nets::mlp_forward(std::get<nets::MlpParams>(p.value), x)[0];
        case RegressorKind::Rbf:
            return nets::rbf_forward(std::get<nets::RbfParams>(p.value), x)[0];
        case RegressorKind::Svr:
            return svr::svr_predict(std::get<svr::SvrParams>(p.value), x);
    }
    throw ValidationError("predict_scalar: corrupt regressor kind");
}

void save_regressor(std::ostream& os, const RegressorParams& p) {
    io::BinaryWriter w(os);
    w.magic(kMagic);
    w.u16(kVersion);
    w.u8(static_cast<std::uint8_t>(p.kind));
    switch (p.kind) {
        case RegressorKind::Mlp: {
            const auto& m = std::get<nets::MlpParams>(p.value);
            w.u32(static_cast<std::uint32_t>(m.input_dim));
            w.u32(static_cast<std::uint32_t>(m.hidden_units));
            w.u32(static_cast<std::uint32_t>(m.output_dim));
            w.f64_matrix(m.w1);
            w.f64_array(m.b1);
            w.f64_matrix(m.w2);
            w.f64_array(m.b2);
            break;
        }
        case RegressorKind::Rbf: {
            const auto& r = std::get<nets::RbfParams>(p.value);
            w.f64_matrix(r.centers);
            w.f64_matrix(r.w2);
            w.f64_array(r.b2);
            break;
        }
        case RegressorKind::Svr: {
            const auto& s = std::get<svr::SvrParams>(p.value);
            w.f64(s.config.epsilon);
            w.f64(s.config.C);
            w.f64(s.config.kernel_width);
            w.f64(s.config.qp_tolerance);
            w.u64(static_cast<std::uint64_t>(s.config.max_passes));
            w.f64_matrix(s.support_inputs);
            w.f64_array(s.beta);
            w.u32(static_cast<std::uint32_t>(s.support_indices.size()));
            for (auto idx : s.support_indices) w.u32(idx);
            w.f64(s.bias);
            w.f64_array(s.input_mean);
            w.f64_array(s.input_scale);
            w.f64(s.target_mean);
            w.f64(s.target_scale);
            w.u8(s.converged ? 1 : 0);
            w.u8(s.bias_fallback ? 1 : 0);
            w.f64(s.kkt_gap);
            w.f64(s.dual_objective);
            break;
        }
    }
}

RegressorParams load_regressor(std::istream& is) {
    io::BinaryReader r(is);
    r.expect_magic(kMagic, "regressor");
    const std::uint16_t version = r.u16("version");
    if (version != kVersion)
        throw IoError("load_regressor: unsupported version " + std::to_string(version));
    const std::uint8_t kind = r.u8("kind");
    RegressorParams out;
    switch (kind) {
        case 0: {
            nets::MlpParams m;
            m.input_dim = static_cast<int>(r.u32("input_dim"));
            m.hidden_units = static_cast<int>(r.u32("hidden_units"));
            m.output_dim = static_cast<int>(r.u32("output_dim"));
            m.w1 = r.f64_matrix("w1");
            m.b1 = r.f64_array("b1");
            m.w2 = r.f64_matrix("w2");
            m.b2 = r.f64_array("b2");
            m.validate();
            out.kind = RegressorKind::Mlp;
            out.value = std::move(m);
            break;
        }
        case 1: {
            nets::RbfParams rb;
            rb.centers = r.f64_matrix("centers");
            rb.w2 = r.f64_matrix("w2");
            rb.b2 = r.f64_array("b2");
            rb.validate();
            out.kind = RegressorKind::Rbf;
            out.value = std::move(rb);
            break;
        }
        case 2: {
            svr::SvrParams s;
            s.config.epsilon = r.f64("epsilon");
            s.config.C = r.f64("C");
            s.config.kernel_width = r.f64("kernel_width");
            s.config.qp_tolerance = r.f64("qp_tolerance");
            s.config.max_passes = static_cast<long>(r.u64("max_passes"));
            s.support_inputs = r.f64_matrix("support_inputs");
            s.beta = r.f64_array("beta");
            const std::uint32_t n_idx = r.u32("support_indices");
            s.support_indices.resize(n_idx);
            for (auto& idx : s.support_indices) idx = r.u32("support_index");
            s.bias = r.f64("bias");
            s.input_mean = r.f64_array("input_mean");
            s.input_scale = r.f64_array("input_scale");
            s.target_mean = r.f64("target_mean");
            s.target_scale = r.f64("target_scale");
            s.converged = r.u8("converged") != 0;
            s.bias_fallback = r.u8("bias_fallback") != 0;
            s.kkt_gap = r.f64("kkt_gap");
            s.dual_objective = r.f64("dual_objective");
            if (s.beta.size() != s.support_inputs.rows ||
                s.beta.size() != s.support_indices.size())
                throw IoError("load_regressor: support vector counts disagree");
            out.kind = RegressorKind::Svr;
            out.value = std::move(s);
            break;
        }
        default:
            throw IoError("load_regressor: unknown regressor kind byte " + std::to_string(kind));
    }
    return out;
}

}  // namespace tda

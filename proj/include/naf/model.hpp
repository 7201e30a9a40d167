#pragma once

#include "naf/encoding.hpp"
#include "naf/field.hpp"

namespace naf {

enum class EncoderKind { hash, frequency };

inline EncoderKind parse_encoder(const std::string& s) {
    if (s == "hash") return EncoderKind::hash;
    if (s == "frequency") return EncoderKind::frequency;
    throw ValidationError("unknown encoder: " + s);
}

// Encoder + MLP: the trainable attenuation field over the unit cube mapped
// from the volume extent.
template <class Real>
struct FieldModel {
    EncoderKind encoder = EncoderKind::hash;
    HashEncoderConfig hash_config;
    HashTables<Real> tables;  // unused for the frequency encoder
    int freq_bands = 10;
    MlpParams<Real> mlp;
    Aabb extent;

    int feature_dim() const {
        return encoder == EncoderKind::hash ? hash_config.output_dim() : 6 * freq_bands;
    }

    void normalize(const Vec3& p, Real* out) const {
        Vec3 s = extent.size();
        out[0] = Real((p.x - extent.lo.x) / s.x);
        out[1] = Real((p.y - extent.lo.y) / s.y);
        out[2] = Real((p.z - extent.lo.z) / s.z);
    }

    static FieldModel create(EncoderKind enc, const HashEncoderConfig& hc,
                             int freq_bands, const Aabb& extent, uint64_t seed,
                             int hidden = 32) {
        FieldModel m;
        m.encoder = enc;
        m.hash_config = hc;
        m.freq_bands = freq_bands;
        m.extent = extent;
        if (enc == EncoderKind::hash) m.tables = HashTables<Real>::init(hc, seed);
        m.mlp = MlpParams<Real>::init(seed + 1, m.feature_dim(), hidden);
        return m;
    }

    // fills work.X with encoded features for S normalized points (S x 3),
    // runs the MLP; predictions land in work.Mu
    void forward_batch(const Real* pts, int S, MlpWork<Real>& work) const {
        work.resize(S, mlp);
        const int in = mlp.in_dim;
        for (int i = 0; i < S; ++i) {
            const Real* p = pts + size_t(i) * 3;
            Real* x = work.X.data() + size_t(i) * in;
            if (encoder == EncoderKind::hash)
                encode_hash(tables, p, x);
            else
                encode_frequency(p, freq_bands, x);
        }
        mlp_forward_batch(mlp, work);
    }

    // backward through MLP and (for the hash encoder) into table gradients
    void backward_batch(const Real* pts, int S, MlpWork<Real>& work, const Real* d_mu,
                        MlpParams<Real>& mlp_grads,
                        std::vector<std::vector<Real>>* table_grads) const {
        mlp_backward_batch(mlp, work, d_mu, mlp_grads);
        if (encoder == EncoderKind::hash && table_grads) {
            const int in = mlp.in_dim;
            for (int i = 0; i < S; ++i)
                encode_hash_backward(tables, pts + size_t(i) * 3,
                                     work.dX.data() + size_t(i) * in, *table_grads);
        }
    }
};

}  // namespace naf

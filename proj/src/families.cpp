#include <string>

#include "bdk/models.hpp"

namespace bdk {

namespace {

using F = Family;

const std::array<FamilyInfo, family_count> kFamilies{{
    {F::racah, "racah-ks1.2", "Racah", "KS1.2", true, false, false, {"a", "b", "d"},
     "c=-N, a>=b, d>0, a>N+d, 0<b<1+d"},
    {F::hahn, "hahn-ks1.5", "Hahn", "KS1.5", true, false, false, {"a", "b"}, "a>0, b>0"},
    {F::dual_hahn, "dual-hahn-ks1.6", "dual Hahn", "KS1.6", true, false, false, {"a", "b"}, "a>0, b>0"},
    {F::krawtchouk, "krawtchouk-ks1.10", "Krawtchouk", "KS1.10", true, false, true, {"p"}, "0<p<1"},
    {F::q_racah, "q-racah-ks3.2", "q-Racah", "KS3.2", true, true, false, {"a", "b", "d"},
     "c=q^-N, a<=b, 0<d<1, 0<a<q^N d, qd<b<1, dt=abc/(dq)<q^-1"},
    {F::q_hahn, "q-hahn-ks3.6", "q-Hahn", "KS3.6", true, true, false, {"a", "b"}, "0<a<1, 0<b<1"},
    {F::dual_q_hahn, "dual-q-hahn-ks3.7", "dual q-Hahn", "KS3.7", true, true, false, {"a", "b"},
     "0<a<1, 0<b<1"},
    {F::quantum_q_krawtchouk, "quantum-q-krawtchouk-ks3.14", "quantum q-Krawtchouk", "KS3.14", true, true, false,
     {"p"}, "p>q^-N"},
    {F::q_krawtchouk, "q-krawtchouk-ks3.15", "q-Krawtchouk", "KS3.15", true, true, false, {"p"}, "p>0"},
    {F::affine_q_krawtchouk, "affine-q-krawtchouk-ks3.16", "affine q-Krawtchouk", "KS3.16", true, true, false,
     {"p"}, "0<p<q^-1"},
    {F::meixner, "meixner-ks1.9", "Meixner", "KS1.9", false, false, true, {"beta", "c"}, "beta>0, 0<c<1"},
    {F::charlier, "charlier-ks1.12", "Charlier", "KS1.12", false, false, true, {"a"}, "a>0"},
    {F::little_q_jacobi, "little-q-jacobi-ks3.12", "little q-Jacobi", "KS3.12", false, true, false, {"a", "b"},
     "0<a<q^-1, b<q^-1"},
    {F::q_meixner, "q-meixner-ks3.13", "q-Meixner", "KS3.13", false, true, false, {"b", "c"},
     "0<b<q^-1, c>0"},
    {F::little_q_laguerre, "little-q-laguerre-ks3.20", "little q-Laguerre (Wall)", "KS3.20", false, true, false,
     {"a"}, "0<a<q^-1"},
    {F::al_salam_carlitz_ii, "al-salam-carlitz-ii-ks3.25", "Al-Salam-Carlitz II", "KS3.25", false, true, false,
     {"a"}, "0<a<q^-1"},
    {F::alternative_q_charlier, "alternative-q-charlier-ks3.22", "alternative q-Charlier", "KS3.22", false, true,
     false, {"a"}, "a>0"},
    {F::q_charlier, "q-charlier-ks3.23", "q-Charlier", "KS3.23", false, true, false, {"a"}, "a>0"},
}};

ModelParams make(Family f, std::optional<double> q, std::optional<int> N, std::map<std::string, double> v) {
    ModelParams p;
    p.family = f;
    p.q = q;
    p.N = N;
    p.values = std::move(v);
    return p;
}

}  // namespace

const std::array<FamilyInfo, family_count>& families() { return kFamilies; }

const FamilyInfo& family_info(Family f) { return kFamilies[static_cast<std::size_t>(f)]; }

Family family_from_id(std::string_view id) {
    for (const auto& fi : kFamilies) {
        if (fi.id == id) return fi.family;
    }
    fail(ErrorCode::invalid_argument, "unknown family id '" + std::string(id) + "' (see `bdk list`)");
}

ModelParams default_params(Family f) {
    switch (f) {
        case F::racah: return make(f, {}, 5, {{"a", 6.5}, {"b", 0.9}, {"d", 0.5}});
        case F::hahn: return make(f, {}, 8, {{"a", 1.5}, {"b", 1.5}});
        case F::dual_hahn: return make(f, {}, 8, {{"a", 1.5}, {"b", 1.5}});
        case F::krawtchouk: return make(f, {}, 8, {{"p", 0.5}});
        case F::q_racah: return make(f, 0.5, 5, {{"a", 0.0078125}, {"b", 0.6}, {"d", 0.5}});
        case F::q_hahn: return make(f, 0.5, 8, {{"a", 0.5}, {"b", 0.5}});
        case F::dual_q_hahn: return make(f, 0.5, 8, {{"a", 0.5}, {"b", 0.5}});
        case F::quantum_q_krawtchouk: return make(f, 0.5, 8, {{"p", 512.0}});
        case F::q_krawtchouk: return make(f, 0.5, 8, {{"p", 0.5}});
        case F::affine_q_krawtchouk: return make(f, 0.5, 8, {{"p", 0.5}});
        case F::meixner: return make(f, {}, {}, {{"beta", 1.0}, {"c", 0.5}});
        case F::charlier: return make(f, {}, {}, {{"a", 2.0}});
        case F::little_q_jacobi: return make(f, 0.5, {}, {{"a", 0.5}, {"b", 0.5}});
        case F::q_meixner: return make(f, 0.5, {}, {{"b", 0.5}, {"c", 1.0}});
        case F::little_q_laguerre: return make(f, 0.5, {}, {{"a", 0.5}});
        case F::al_salam_carlitz_ii: return make(f, 0.5, {}, {{"a", 0.5}});
        case F::alternative_q_charlier: return make(f, 0.5, {}, {{"a", 1.0}});
        case F::q_charlier: return make(f, 0.5, {}, {{"a", 1.0}});
    }
    fail(ErrorCode::internal_consistency, "default_params: unknown family");
}

}  // namespace bdk

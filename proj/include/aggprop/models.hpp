#pragma once

#include "error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aggprop {

/// The factor A_x that scales a user's contribution in an update.
enum class SelectorKind : std::uint8_t {
    one,                ///< 1
    weight,             ///< w_ij
    power_self,         ///< P_i
    power_other,        ///< P_j
    weight_power_self,  ///< w_ij * P_i
    weight_power_other, ///< w_ij * P_j
};

enum class ModelFamily : std::uint8_t { voter, deffuant, hk, degroot, fj, avg_degroot, avg_fj };

struct ModelSpec {
    ModelFamily family = ModelFamily::voter;
    SelectorKind self_selector = SelectorKind::one;  // A_i
    SelectorKind other_selector = SelectorKind::one; // A_j
    std::optional<double> confidence_bound;          // HK only
    std::string name;
};

/// One neighbour j as seen from the influenced node i.
struct Interaction {
    double score = 0.0;  // S_j^t
    double weight = 0.0; // w_ij
    double power = 0.0;  // P_j
};

/**
 * Inputs of a single update of node i.
 *
 * `influencer` is the node on the other end of the scheduled edge. The
 * neighbourhood families read `neighborhood` (all of N_i, influencer
 * included); pairwise families ignore it. A_i is always evaluated against the
 * influencer's edge weight.
 */
struct UpdateContext {
    double score_self = 0.0;   // S_i^t
    double initial_self = 0.0; // S_i^0
    double power_self = 0.0;   // P_i
    Interaction influencer;
    std::span<const Interaction> neighborhood;
};

struct UpdateResult {
    double score = 0.0;
    bool applied = true; // false only when an HK confidence check rejects the interaction
};

inline constexpr bool is_pairwise(ModelFamily f)
{
    return f == ModelFamily::voter || f == ModelFamily::deffuant || f == ModelFamily::hk;
}

inline constexpr bool uses_weight(SelectorKind k)
{
    return k == SelectorKind::weight || k == SelectorKind::weight_power_self || k == SelectorKind::weight_power_other;
}

inline bool uses_weight(const ModelSpec& spec)
{
    // Voter ignores A_i, so only its A_j counts.
    if (spec.family == ModelFamily::voter)
        return uses_weight(spec.other_selector);
    return uses_weight(spec.self_selector) || uses_weight(spec.other_selector);
}

inline constexpr double selector_value(SelectorKind kind, double weight, double power_self, double power_other)
{
    switch (kind) {
    case SelectorKind::one:
        return 1.0;
    case SelectorKind::weight:
        return weight;
    case SelectorKind::power_self:
        return power_self;
    case SelectorKind::power_other:
        return power_other;
    case SelectorKind::weight_power_self:
        return weight * power_self;
    case SelectorKind::weight_power_other:
        return weight * power_other;
    }
    return 1.0;
}

/// Evaluates `kind` for the (i, influencer) pair of `ctx`.
inline double selector_value(SelectorKind kind, const UpdateContext& ctx)
{
    return selector_value(kind, ctx.influencer.weight, ctx.power_self, ctx.influencer.power);
}

namespace detail {

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

inline double self_factor(const ModelSpec& spec, const UpdateContext& ctx)
{
    return selector_value(spec.self_selector, ctx);
}

inline double other_factor(const ModelSpec& spec, const UpdateContext& ctx, const Interaction& j)
{
    return selector_value(spec.other_selector, j.weight, ctx.power_self, j.power);
}

inline void require_family(const ModelSpec& spec, ModelFamily f, const char* op)
{
    if (spec.family != f)
        throw ValidationError(std::string(op) + " called with model " + spec.name);
}

/// Pairwise raw value A_i S_i + A_j S_j scaled back into [0, 1].
inline double pairwise_combined(double ai_si, double aj_sj)
{
    const double raw = ai_si + aj_sj;
    return clamp_unit(raw / std::max(1.0, raw));
}

/// numerator / denominator clamped to the range [lo, hi] of the scores that
/// entered it, so equal inputs reproduce themselves exactly.
inline std::optional<double> weighted_mean(double numerator, double denominator, double lo, double hi)
{
    if (!(denominator > 0.0))
        return std::nullopt;
    return std::clamp(numerator / denominator, lo, hi);
}

} // namespace detail

/// S_i <- A_j S_j
inline double voter_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::voter, "voter_update");
    return detail::clamp_unit(detail::other_factor(spec, ctx, ctx.influencer) * ctx.influencer.score);
}

/// S_i <- (A_i S_i + A_j S_j) / max(1, A_i S_i + A_j S_j)
inline double deffuant_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::deffuant, "deffuant_update");
    return detail::pairwise_combined(detail::self_factor(spec, ctx) * ctx.score_self,
                                     detail::other_factor(spec, ctx, ctx.influencer) * ctx.influencer.score);
}

/// Deffuant update gated by |A_i S_i - A_j S_j| < d.
inline UpdateResult hk_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::hk, "hk_update");
    if (!spec.confidence_bound)
        throw ValidationError("HK model " + spec.name + " has no confidence bound");
    const double mine = detail::self_factor(spec, ctx) * ctx.score_self;
    const double theirs = detail::other_factor(spec, ctx, ctx.influencer) * ctx.influencer.score;
    if (!(std::abs(mine - theirs) < *spec.confidence_bound))
        return {ctx.score_self, false};
    return {detail::pairwise_combined(mine, theirs), true};
}

/// (A_i S_i + sum A_j S_j) / (A_i + sum A_j); unchanged on a zero denominator.
inline double degroot_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::degroot, "degroot_update");
    const double ai = detail::self_factor(spec, ctx);
    double num = ai * ctx.score_self;
    double den = ai;
    double lo = ctx.score_self, hi = ctx.score_self;
    for (const Interaction& j : ctx.neighborhood) {
        const double aj = detail::other_factor(spec, ctx, j);
        num += aj * j.score;
        den += aj;
        lo = std::min(lo, j.score);
        hi = std::max(hi, j.score);
    }
    return detail::weighted_mean(num, den, lo, hi).value_or(ctx.score_self);
}

/// (A_i S_i^0 + A_i S_i + sum A_j S_j) / (2 A_i + sum A_j); unchanged on a zero denominator.
inline double fj_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::fj, "fj_update");
    const double ai = detail::self_factor(spec, ctx);
    double num = ai * ctx.initial_self + ai * ctx.score_self;
    double den = 2.0 * ai;
    double lo = std::min(ctx.score_self, ctx.initial_self);
    double hi = std::max(ctx.score_self, ctx.initial_self);
    for (const Interaction& j : ctx.neighborhood) {
        const double aj = detail::other_factor(spec, ctx, j);
        num += aj * j.score;
        den += aj;
        lo = std::min(lo, j.score);
        hi = std::max(hi, j.score);
    }
    return detail::weighted_mean(num, den, lo, hi).value_or(ctx.score_self);
}

/// mean(A) * mean(S) over {i} ∪ N_i.
inline double avg_degroot_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::avg_degroot, "avg_degroot_update");
    double factors = detail::self_factor(spec, ctx);
    double scores = ctx.score_self;
    for (const Interaction& j : ctx.neighborhood) {
        factors += detail::other_factor(spec, ctx, j);
        scores += j.score;
    }
    const double count = 1.0 + static_cast<double>(ctx.neighborhood.size());
    return detail::clamp_unit((factors / count) * (scores / count));
}

/// As avg_degroot_update with node i counted twice, once with S_i^0.
inline double avg_fj_update(const ModelSpec& spec, const UpdateContext& ctx)
{
    detail::require_family(spec, ModelFamily::avg_fj, "avg_fj_update");
    const double ai = detail::self_factor(spec, ctx);
    double factors = ai + ai;
    double scores = ctx.initial_self + ctx.score_self;
    for (const Interaction& j : ctx.neighborhood) {
        factors += detail::other_factor(spec, ctx, j);
        scores += j.score;
    }
    const double count = 2.0 + static_cast<double>(ctx.neighborhood.size());
    return detail::clamp_unit((factors / count) * (scores / count));
}

inline UpdateResult apply_model(const ModelSpec& spec, const UpdateContext& ctx)
{
    switch (spec.family) {
    case ModelFamily::voter:
        return {voter_update(spec, ctx), true};
    case ModelFamily::deffuant:
        return {deffuant_update(spec, ctx), true};
    case ModelFamily::hk:
        return hk_update(spec, ctx);
    case ModelFamily::degroot:
        return {degroot_update(spec, ctx), true};
    case ModelFamily::fj:
        return {fj_update(spec, ctx), true};
    case ModelFamily::avg_degroot:
        return {avg_degroot_update(spec, ctx), true};
    case ModelFamily::avg_fj:
        return {avg_fj_update(spec, ctx), true};
    }
    throw ValidationError("unknown model family for " + spec.name);
}

namespace detail {

struct VariantSelectors {
    const char* suffix;
    SelectorKind self;
    SelectorKind other;
};

inline constexpr VariantSelectors plain{"", SelectorKind::one, SelectorKind::one};
inline constexpr VariantSelectors by_weight{"_W", SelectorKind::weight, SelectorKind::weight};
inline constexpr VariantSelectors by_power{"_P", SelectorKind::power_self, SelectorKind::power_other};
inline constexpr VariantSelectors by_both{"_WP", SelectorKind::weight_power_self, SelectorKind::weight_power_other};

inline std::vector<ModelSpec> build_catalog()
{
    std::vector<ModelSpec> c;
    auto add = [&c](ModelFamily f, const std::string& base, const VariantSelectors& v,
                    std::optional<double> d = std::nullopt) {
        c.push_back({f, v.self, v.other, d, base + v.suffix});
    };
    for (const auto& v : {plain, by_weight, by_power, by_both})
        add(ModelFamily::voter, "Voter", v);
    for (const auto& v : {by_weight, by_power, by_both})
        add(ModelFamily::deffuant, "Deffuant", v);
    for (double d : {0.5, 1.0})
        for (const auto& v : {by_weight, by_power, by_both})
            add(ModelFamily::hk, d == 0.5 ? "HK_0.5" : "HK_1.0", v, d);
    for (const auto& v : {plain, by_weight, by_power, by_both})
        add(ModelFamily::degroot, "DeGroot", v);
    for (const auto& v : {by_weight, by_power, by_both})
        add(ModelFamily::fj, "FJ", v);
    for (const auto& v : {by_weight, by_power, by_both})
        add(ModelFamily::avg_degroot, "avgDeGroot", v);
    for (const auto& v : {by_weight, by_power, by_both})
        add(ModelFamily::avg_fj, "avgFJ", v);
    // Voter has no A_i; keep its self selector neutral.
    for (auto& m : c)
        if (m.family == ModelFamily::voter)
            m.self_selector = SelectorKind::one;
    return c;
}

} // namespace detail

/// The 26 models, in canonical order.
inline const std::vector<ModelSpec>& model_catalog()
{
    static const std::vector<ModelSpec> catalog = detail::build_catalog();
    return catalog;
}

inline std::string catalog_names(std::string_view sep = ", ")
{
    std::string out;
    for (const auto& m : model_catalog()) {
        if (!out.empty())
            out += sep;
        out += m.name;
    }
    return out;
}

inline const ModelSpec* try_find_model(std::string_view name)
{
    for (const auto& m : model_catalog())
        if (m.name == name)
            return &m;
    return nullptr;
}

/// Exact, case-sensitive lookup.
inline const ModelSpec& find_model(std::string_view name)
{
    if (const ModelSpec* m = try_find_model(name))
        return *m;
    throw ValidationError("unknown model '" + std::string(name) + "'; valid names: " + catalog_names());
}

} // namespace aggprop

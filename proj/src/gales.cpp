#include "gale/gales.hpp"

#include <algorithm>
#include <sstream>

namespace gale {

namespace {

Integer pow_integer(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Rational pow_rational(const Rational& base, unsigned long e) {
    return make_rational(pow_integer(base.get_num(), e), pow_integer(base.get_den(), e));
}

void require_u32(const Integer& v, const char* what) {
    if (sgn(v) < 0 || !v.fits_ulong_p() || v.get_ui() > 0xFFFFFFFFul)
        throw ParameterOutOfRange(std::string(what) + " does not fit 32 bits");
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32le(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
    if (pos + 4 > bytes.size()) throw MalformedCode("truncated model parameters");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
}

}  // namespace

int compare_pow2(const ScaledPow2& a, const ScaledPow2& b) {
    int sa = sgn(a.coeff);
    int sb = sgn(b.coeff);
    if (sa < 0 || sb < 0) throw ParameterOutOfRange("negative coefficient in scaled power");
    if (sa == 0 || sb == 0) return sa - sb;

    Rational delta = a.exponent - b.exponent;  // p/q canonical, q > 0
    const Integer& p = delta.get_num();
    const Integer& q = delta.get_den();
    if (!q.fits_ulong_p()) throw ParameterOutOfRange("exponent denominator too large");
    if (!p.fits_slong_p()) throw ParameterOutOfRange("exponent numerator too large");
    unsigned long qe = q.get_ui();
    long pe = p.get_si();

    // a.coeff^q * 2^p vs b.coeff^q
    Integer lhs = pow_integer(a.coeff.get_num(), qe) * pow_integer(b.coeff.get_den(), qe);
    Integer rhs = pow_integer(b.coeff.get_num(), qe) * pow_integer(a.coeff.get_den(), qe);
    return cmp_mul2exp(lhs, rhs, -pe);
}

// ---------------------------------------------------------------- base model

Rational MartingaleModel::completion_bound(const State&, std::uint64_t remaining) const {
    if (remaining > (1ull << 31)) throw ParameterOutOfRange("completion bound horizon too large");
    return pow2_rational(static_cast<long>(remaining));
}

Rational MartingaleModel::block_ones_ratio(const State&, std::uint64_t, std::uint64_t) const {
    throw Error("model does not define a ones-count block ratio");
}

Rational MartingaleModel::staged_from_value(const Rational& value, std::uint64_t t) const {
    if (t > (1ull << 31)) throw ParameterOutOfRange("stage index too large");
    // value * (1 - 2^-(t+1))
    Integer p;
    mpz_setbit(p.get_mpz_t(), static_cast<mp_bitcnt_t>(t + 1));
    return value * make_rational(p - 1, p);
}

std::optional<std::uint64_t> MartingaleModel::staged_crossing(const Rational& value,
                                                              const Rational& threshold,
                                                              std::uint64_t stage_budget) const {
    if (cmp(value, threshold) <= 0) return std::nullopt;
    // ramp(v,t) > thr  <=>  (v-thr)*2^(t+1) > v
    Rational gap = value - threshold;
    long e = floor_log2(value / gap);
    std::uint64_t t = e < 1 ? 0 : static_cast<std::uint64_t>(e);  // T = e+1, t = T-1
    if (t > stage_budget) throw TraversalBudgetExceeded("staged crossing beyond stage budget");
    return t;
}

std::optional<std::uint64_t> MartingaleModel::staged_crossing_by_search(
    const Rational& value, const Rational& threshold, std::uint64_t stage_budget) const {
    if (cmp(value, threshold) <= 0) return std::nullopt;
    auto above = [&](std::uint64_t t) { return cmp(staged_from_value(value, t), threshold) > 0; };
    if (above(0)) return 0;
    std::uint64_t lo = 0;  // known below
    std::uint64_t hi = 1;
    while (!above(hi)) {
        lo = hi;
        if (hi > stage_budget) throw TraversalBudgetExceeded("staged search beyond stage budget");
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        (above(mid) ? hi : lo) = mid;
    }
    return hi;
}

ModelCursor MartingaleModel::start() const {
    return ModelCursor(this, initial_state(), initial_capital());
}

Rational MartingaleModel::value(const BitString& w) const {
    ModelCursor c = start();
    c.advance(w);
    return c.capital();
}

Rational MartingaleModel::staged(const BitString& w, std::uint64_t t) const {
    return staged_from_value(value(w), t);
}

ModelCursor::ModelCursor(const ModelCursor& other)
    : model_(other.model_),
      state_(other.state_ ? other.state_->clone() : nullptr),
      capital_(other.capital_) {}

ModelCursor& ModelCursor::operator=(const ModelCursor& other) {
    if (this != &other) {
        model_ = other.model_;
        state_ = other.state_ ? other.state_->clone() : nullptr;
        capital_ = other.capital_;
    }
    return *this;
}

void ModelCursor::advance(const BitString& bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) advance(bits[i]);
}

ModelCursor ModelCursor::advanced(bool bit) const {
    ModelCursor c(*this);
    c.advance(bit);
    return c;
}

// ------------------------------------------------------------------ built-ins

namespace {

struct EmptyState final : MartingaleModel::State {
    std::unique_ptr<State> clone() const override { return std::make_unique<EmptyState>(); }
};

class UniformModel final : public MartingaleModel {
public:
    std::string name() const override { return "uniform"; }
    std::vector<std::uint8_t> spec_bytes() const override { return {0x00}; }
    std::unique_ptr<State> initial_state() const override { return std::make_unique<EmptyState>(); }
    void advance(State&, Rational&, bool) const override {}
    Rational completion_bound(const State&, std::uint64_t) const override { return 1; }
    bool exchangeable_blocks() const override { return true; }
    Rational block_ones_ratio(const State&, std::uint64_t, std::uint64_t) const override {
        return 1;
    }
};

class BernoulliModel final : public MartingaleModel {
public:
    explicit BernoulliModel(const Rational& q) : q_(q) {
        if (cmp(q, Rational(0)) <= 0 || cmp(q, Rational(1)) >= 0)
            throw ParameterOutOfRange("bernoulli bias must be strictly between 0 and 1");
        require_u32(q.get_num(), "bernoulli bias numerator");
        require_u32(q.get_den(), "bernoulli bias denominator");
        f1_ = 2 * q_;
        f0_ = 2 - f1_;
        fmax_ = std::max(f0_, f1_);
    }

    std::string name() const override {
        return "bernoulli(" + q_.get_str() + ")";
    }
    std::vector<std::uint8_t> spec_bytes() const override {
        std::vector<std::uint8_t> out{0x01};
        put_u32le(out, static_cast<std::uint32_t>(q_.get_num().get_ui()));
        put_u32le(out, static_cast<std::uint32_t>(q_.get_den().get_ui()));
        return out;
    }
    std::unique_ptr<State> initial_state() const override { return std::make_unique<EmptyState>(); }
    void advance(State&, Rational& capital, bool bit) const override {
        capital *= bit ? f1_ : f0_;
    }
    Rational completion_bound(const State&, std::uint64_t remaining) const override {
        return pow_rational(fmax_, static_cast<unsigned long>(remaining));
    }
    bool exchangeable_blocks() const override { return true; }
    Rational block_ones_ratio(const State&, std::uint64_t k, std::uint64_t ones) const override {
        return pow_rational(f1_, static_cast<unsigned long>(ones)) *
               pow_rational(f0_, static_cast<unsigned long>(k - ones));
    }

private:
    Rational q_, f0_, f1_, fmax_;
};

struct KtState final : MartingaleModel::State {
    std::uint64_t c0 = 0;
    std::uint64_t c1 = 0;
    std::unique_ptr<State> clone() const override {
        auto s = std::make_unique<KtState>();
        s->c0 = c0;
        s->c1 = c1;
        return s;
    }
};

class KtModel final : public MartingaleModel {
public:
    std::string name() const override { return "kt"; }
    std::vector<std::uint8_t> spec_bytes() const override { return {0x02}; }
    std::unique_ptr<State> initial_state() const override { return std::make_unique<KtState>(); }

    void advance(State& state, Rational& capital, bool bit) const override {
        auto& s = static_cast<KtState&>(state);
        std::uint64_t n = s.c0 + s.c1;
        std::uint64_t c = bit ? s.c1 : s.c0;
        capital *= make_rational(Integer(2 * c + 1), Integer(n + 1));
        (bit ? s.c1 : s.c0) += 1;
    }

    // The per-step multiplier is (2·count+1)/(n+1) and the relevant count can
    // grow by at most one per step, so repeating the majority bit dominates
    // every completion.
    Rational completion_bound(const State& state, std::uint64_t remaining) const override {
        const auto& s = static_cast<const KtState&>(state);
        std::uint64_t n = s.c0 + s.c1;
        std::uint64_t cmax = std::max(s.c0, s.c1);
        Integer num = 1, den = 1;
        for (std::uint64_t t = 0; t < remaining; ++t) {
            num *= 2 * (cmax + t) + 1;
            den *= n + t + 1;
        }
        return make_rational(num, den);
    }

    bool exchangeable_blocks() const override { return true; }
    Rational block_ones_ratio(const State& state, std::uint64_t k,
                              std::uint64_t ones) const override {
        const auto& s = static_cast<const KtState&>(state);
        std::uint64_t n = s.c0 + s.c1;
        Integer num = 1, den = 1;
        for (std::uint64_t t = 0; t < k - ones; ++t) num *= 2 * (s.c0 + t) + 1;
        for (std::uint64_t t = 0; t < ones; ++t) num *= 2 * (s.c1 + t) + 1;
        for (std::uint64_t t = 0; t < k; ++t) den *= n + t + 1;
        return make_rational(num, den);
    }
};

struct MixtureState final : MartingaleModel::State {
    std::vector<ModelCursor> parts;
    std::unique_ptr<State> clone() const override {
        auto s = std::make_unique<MixtureState>();
        s->parts = parts;
        return s;
    }
};

class MixtureModel final : public MartingaleModel {
public:
    MixtureModel(std::vector<ModelPtr> models, std::vector<Rational> weights)
        : models_(std::move(models)), weights_(std::move(weights)) {
        if (models_.size() != weights_.size())
            throw WeightsNotNormalized("one weight per component required");
        Rational sum = 0;
        for (const auto& w : weights_) {
            if (sgn(w) <= 0) throw WeightsNotNormalized("weights must be positive");
            require_u32(w.get_num(), "mixture weight numerator");
            require_u32(w.get_den(), "mixture weight denominator");
            sum += w;
        }
        if (cmp(sum, Rational(1)) != 0)
            throw WeightsNotNormalized("weights must sum to exactly 1");
        if (models_.size() > 255) throw ParameterOutOfRange("too many mixture components");
        for (const auto& m : models_)
            if (!m) throw ParameterOutOfRange("null mixture component");
    }

    std::string name() const override {
        std::ostringstream os;
        os << "mix(";
        for (std::size_t i = 0; i < models_.size(); ++i) {
            if (i) os << ",";
            os << weights_[i].get_str() << ":" << models_[i]->name();
        }
        os << ")";
        return os.str();
    }

    std::vector<std::uint8_t> spec_bytes() const override {
        std::vector<std::uint8_t> out{0x03, static_cast<std::uint8_t>(models_.size())};
        for (std::size_t i = 0; i < models_.size(); ++i) {
            put_u32le(out, static_cast<std::uint32_t>(weights_[i].get_num().get_ui()));
            put_u32le(out, static_cast<std::uint32_t>(weights_[i].get_den().get_ui()));
            auto child = models_[i]->spec_bytes();
            out.insert(out.end(), child.begin(), child.end());
        }
        return out;
    }

    std::unique_ptr<State> initial_state() const override {
        auto s = std::make_unique<MixtureState>();
        s->parts.reserve(models_.size());
        for (const auto& m : models_) s->parts.push_back(m->start());
        return s;
    }

    void advance(State& state, Rational& capital, bool bit) const override {
        auto& s = static_cast<MixtureState&>(state);
        Rational sum = 0;
        for (std::size_t i = 0; i < s.parts.size(); ++i) {
            s.parts[i].advance(bit);
            sum += weights_[i] * s.parts[i].capital();
        }
        capital = std::move(sum);
    }

    Rational completion_bound(const State& state, std::uint64_t remaining) const override {
        const auto& s = static_cast<const MixtureState&>(state);
        Rational num = 0, den = 0;
        for (std::size_t i = 0; i < s.parts.size(); ++i) {
            num += weights_[i] * s.parts[i].capital() * s.parts[i].completion_bound(remaining);
            den += weights_[i] * s.parts[i].capital();
        }
        return num / den;
    }

    bool exchangeable_blocks() const override {
        return std::all_of(models_.begin(), models_.end(),
                           [](const ModelPtr& m) { return m->exchangeable_blocks(); });
    }

    Rational block_ones_ratio(const State& state, std::uint64_t k,
                              std::uint64_t ones) const override {
        const auto& s = static_cast<const MixtureState&>(state);
        Rational num = 0, den = 0;
        for (std::size_t i = 0; i < s.parts.size(); ++i) {
            num += weights_[i] * s.parts[i].capital() *
                   models_[i]->block_ones_ratio(s.parts[i].state(), k, ones);
            den += weights_[i] * s.parts[i].capital();
        }
        return num / den;
    }

private:
    std::vector<ModelPtr> models_;
    std::vector<Rational> weights_;
};

class SlowStagedModel final : public MartingaleModel {
public:
    explicit SlowStagedModel(ModelPtr inner) : inner_(std::move(inner)) {
        if (!inner_) throw ParameterOutOfRange("null wrapped model");
    }

    std::string name() const override { return "slow(" + inner_->name() + ")"; }
    std::vector<std::uint8_t> spec_bytes() const override {
        auto bytes = inner_->spec_bytes();
        bytes[0] |= 0x80;
        return bytes;
    }
    std::unique_ptr<State> initial_state() const override { return inner_->initial_state(); }
    Rational initial_capital() const override { return inner_->initial_capital(); }
    void advance(State& state, Rational& capital, bool bit) const override {
        inner_->advance(state, capital, bit);
    }
    Rational completion_bound(const State& state, std::uint64_t remaining) const override {
        return inner_->completion_bound(state, remaining);
    }
    bool exchangeable_blocks() const override { return inner_->exchangeable_blocks(); }
    Rational block_ones_ratio(const State& state, std::uint64_t k,
                              std::uint64_t ones) const override {
        return inner_->block_ones_ratio(state, k, ones);
    }
    bool staged_enumeration() const override { return true; }

private:
    ModelPtr inner_;
};

}  // namespace

ModelPtr uniform_model() { return std::make_shared<UniformModel>(); }

ModelPtr bernoulli_model(const Rational& q) { return std::make_shared<BernoulliModel>(q); }

ModelPtr kt_model() { return std::make_shared<KtModel>(); }

ModelPtr mixture_model(std::vector<ModelPtr> models, std::vector<Rational> weights) {
    return std::make_shared<MixtureModel>(std::move(models), std::move(weights));
}

ModelPtr slow_staged_wrapper(ModelPtr inner) {
    if (inner && inner->staged_enumeration()) return inner;
    return std::make_shared<SlowStagedModel>(std::move(inner));
}

ScaledPow2 induced_sgale(const MartingaleModel& m, const Rational& s, const BitString& w) {
    return ScaledPow2{m.value(w), (s - 1) * Rational(static_cast<unsigned long>(w.size()))};
}

namespace {

template <typename LeafFn>
void walk_all(const ModelCursor& cursor, std::uint64_t depth, LeafFn&& leaf) {
    if (depth == 0) {
        leaf(cursor);
        return;
    }
    for (int b = 0; b < 2; ++b) walk_all(cursor.advanced(b != 0), depth - 1, leaf);
}

}  // namespace

std::uint64_t count_exceeding(const MartingaleModel& m, const BitString& w, std::uint64_t k,
                              const Rational& alpha, const Rational& l,
                              std::uint64_t exhaustive_bound) {
    if (sgn(alpha) <= 0) throw ParameterOutOfRange("alpha must be positive");
    if (k > exhaustive_bound)
        throw ExhaustiveBoundExceeded("extension length beyond exhaustive bound");
    ModelCursor at_w = m.start();
    at_w.advance(w);
    ScaledPow2 threshold{alpha * at_w.capital(), Rational(static_cast<unsigned long>(k)) - l};
    std::uint64_t count = 0;
    walk_all(at_w, k, [&](const ModelCursor& leaf) {
        if (compare_pow2(ScaledPow2{leaf.capital(), 0}, threshold) >= 0) ++count;
    });
    return count;
}

namespace {

struct PrefixMaxContext {
    Rational one_minus_s;
    Rational s_minus_1;
    Rational w_len;
};

void prefix_max_walk(const PrefixMaxContext& ctx, const ModelCursor& cursor, std::uint64_t done,
                     std::uint64_t k, const ScaledPow2& best, const ScaledPow2& threshold,
                     std::uint64_t& count) {
    if (done == k) {
        if (compare_pow2(best, threshold) >= 0) ++count;
        return;
    }
    for (int b = 0; b < 2; ++b) {
        ModelCursor child = cursor.advanced(b != 0);
        // 2^((1-s)|v|) · g(wv) for the induced s-gale g = m^(s); the scaling
        // telescopes to 2^((s-1)|w|), so the count is s-independent, exactly
        // as the bound for induced s-gales demands.
        Rational v_len(static_cast<unsigned long>(done + 1));
        ScaledPow2 cand{child.capital(),
                        ctx.one_minus_s * v_len + ctx.s_minus_1 * (ctx.w_len + v_len)};
        ScaledPow2 next_best = compare_pow2(cand, best) > 0 ? cand : best;
        prefix_max_walk(ctx, child, done + 1, k, next_best, threshold, count);
    }
}

}  // namespace

std::uint64_t count_exceeding_prefix_max(const MartingaleModel& m, const BitString& w,
                                         std::uint64_t k, const Rational& s,
                                         const Rational& alpha, std::uint64_t exhaustive_bound) {
    if (sgn(alpha) <= 0) throw ParameterOutOfRange("alpha must be positive");
    if (k > exhaustive_bound)
        throw ExhaustiveBoundExceeded("extension length beyond exhaustive bound");
    ModelCursor at_w = m.start();
    at_w.advance(w);
    PrefixMaxContext ctx{Rational(1) - s, s - 1, Rational(static_cast<unsigned long>(w.size()))};
    ScaledPow2 threshold{alpha * at_w.capital(), ctx.s_minus_1 * ctx.w_len};
    ScaledPow2 root{at_w.capital(), ctx.s_minus_1 * ctx.w_len};  // empty extension
    std::uint64_t count = 0;
    prefix_max_walk(ctx, at_w, 0, k, root, threshold, count);
    return count;
}

// -------------------------------------------------------------- wire parsing

ModelPtr parse_model_bytes(const std::vector<std::uint8_t>& bytes, std::size_t& pos, int depth) {
    if (depth > 16) throw MalformedCode("model nesting too deep");
    if (pos >= bytes.size()) throw MalformedCode("truncated model specification");
    std::uint8_t id = bytes[pos++];
    bool slow = (id & 0x80) != 0;
    ModelPtr model;
    switch (id & 0x7F) {
        case 0x00:
            model = uniform_model();
            break;
        case 0x01: {
            std::uint32_t num = get_u32le(bytes, pos);
            std::uint32_t den = get_u32le(bytes, pos);
            if (den == 0) throw MalformedCode("bernoulli bias with zero denominator");
            model = bernoulli_model(make_rational(Integer(num), Integer(den)));
            break;
        }
        case 0x02:
            model = kt_model();
            break;
        case 0x03: {
            if (pos >= bytes.size()) throw MalformedCode("truncated mixture count");
            std::uint8_t count = bytes[pos++];
            std::vector<ModelPtr> children;
            std::vector<Rational> weights;
            for (std::uint8_t i = 0; i < count; ++i) {
                std::uint32_t num = get_u32le(bytes, pos);
                std::uint32_t den = get_u32le(bytes, pos);
                if (den == 0) throw MalformedCode("mixture weight with zero denominator");
                weights.push_back(make_rational(Integer(num), Integer(den)));
                children.push_back(parse_model_bytes(bytes, pos, depth + 1));
            }
            model = mixture_model(std::move(children), std::move(weights));
            break;
        }
        default:
            throw MalformedCode("unknown model id");
    }
    return slow ? slow_staged_wrapper(std::move(model)) : model;
}

namespace {

Rational parse_fraction(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 >= text.size())
        throw ParameterOutOfRange("expected a fraction of the form num/den: " + text);
    Integer num, den;
    if (mpz_set_str(num.get_mpz_t(), text.substr(0, slash).c_str(), 10) != 0 ||
        mpz_set_str(den.get_mpz_t(), text.substr(slash + 1).c_str(), 10) != 0)
        throw ParameterOutOfRange("malformed fraction: " + text);
    return make_rational(num, den);
}

// Split a mixture body at top-level commas: "1/2:kt,1/2:bernoulli:1/4".
std::vector<std::string> split_components(const std::string& body) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '(') ++depth;
        if (body[i] == ')') --depth;
        if (body[i] == ',' && depth == 0) {
            parts.push_back(body.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(body.substr(start));
    return parts;
}

}  // namespace

ModelPtr model_from_spec(const std::string& spec) {
    if (spec == "uniform") return uniform_model();
    if (spec == "kt") return kt_model();
    if (spec.rfind("bernoulli:", 0) == 0)
        return bernoulli_model(parse_fraction(spec.substr(10)));
    if (spec.rfind("slow:", 0) == 0) return slow_staged_wrapper(model_from_spec(spec.substr(5)));
    if (spec.rfind("mix:", 0) == 0) {
        std::vector<ModelPtr> children;
        std::vector<Rational> weights;
        for (const auto& part : split_components(spec.substr(4))) {
            auto colon = part.find(':');
            if (colon == std::string::npos)
                throw ParameterOutOfRange("mixture component needs weight:model: " + part);
            weights.push_back(parse_fraction(part.substr(0, colon)));
            children.push_back(model_from_spec(part.substr(colon + 1)));
        }
        return mixture_model(std::move(children), std::move(weights));
    }
    throw ParameterOutOfRange("unknown model spec: " + spec);
}

}  // namespace gale

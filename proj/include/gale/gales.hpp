#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gale/bitstring.hpp"
#include "gale/numeric.hpp"

namespace gale {

// coeff * 2^exponent with rational exponent. Carries s-gale values
// symbolically; 2^((s-1)|w|) is irrational for most rational s, so values are
// never evaluated numerically, only compared exactly.
struct ScaledPow2 {
    Rational coeff;     // >= 0
    Rational exponent;  // power of two, as an exact rational
};

// Exact three-way comparison of a.coeff*2^a.exponent vs b.coeff*2^b.exponent.
// With delta = a.exponent - b.exponent = p/q in lowest terms (q > 0), compares
// (a.coeff/b.coeff)^q against 2^(-p) in integers. Returns <0, 0, >0.
int compare_pow2(const ScaledPow2& a, const ScaledPow2& b);

class MartingaleModel;
using ModelPtr = std::shared_ptr<const MartingaleModel>;
class ModelCursor;

// A strictly positive exact martingale: value(w) = (value(w0)+value(w1))/2,
// evaluated incrementally through cursors, plus a staged lower approximation
// staged(w,t) that is nondecreasing in t, strictly below value(w), and
// converges to it.
class MartingaleModel {
public:
    struct State {
        virtual ~State() = default;
        virtual std::unique_ptr<State> clone() const = 0;
    };

    virtual ~MartingaleModel() = default;

    virtual std::string name() const = 0;
    // Wire identifier and parameters (see container format).
    virtual std::vector<std::uint8_t> spec_bytes() const = 0;

    virtual std::unique_ptr<State> initial_state() const = 0;
    virtual Rational initial_capital() const { return 1; }
    virtual void advance(State& state, Rational& capital, bool bit) const = 0;

    // Upper bound on value(w·u)/value(w) over all u with |u| = remaining,
    // given the state at w. The martingale law caps this at 2^remaining,
    // which is the default; models override with tighter bounds to prune
    // enumeration. Soundness (never below the true maximum) is what codec
    // correctness rests on.
    virtual Rational completion_bound(const State& state, std::uint64_t remaining) const;

    // True when value(prefix·u)/value(prefix) depends only on the number of
    // ones in u. Enables closed-form counting and ranking of admitted sets.
    virtual bool exchangeable_blocks() const { return false; }
    virtual Rational block_ones_ratio(const State& state, std::uint64_t k,
                                      std::uint64_t ones) const;

    // Staged approximation evaluated through the exact value:
    // staged(w,t) = ramp(value(w), t) with ramp(v,t) = v·(1 - 2^-(t+1)).
    virtual Rational staged_from_value(const Rational& value, std::uint64_t t) const;

    // Smallest t with staged_from_value(value,t) > threshold, or nullopt when
    // no stage ever crosses (value <= threshold). Must stay consistent with
    // staged_from_value; the base implementation is the closed form for the
    // default ramp. Throws TraversalBudgetExceeded past stage_budget.
    virtual std::optional<std::uint64_t> staged_crossing(const Rational& value,
                                                         const Rational& threshold,
                                                         std::uint64_t stage_budget) const;

    // Whether block codecs should enumerate admitted sets in staged order.
    virtual bool staged_enumeration() const { return false; }

    ModelCursor start() const;
    Rational value(const BitString& w) const;
    Rational staged(const BitString& w, std::uint64_t t) const;

protected:
    // Generic search over a monotone staged function, for models that
    // override staged_from_value with something other than the ramp.
    std::optional<std::uint64_t> staged_crossing_by_search(const Rational& value,
                                                           const Rational& threshold,
                                                           std::uint64_t stage_budget) const;
};

// Position in the evaluation of a model along a string; carries the exact
// capital. Cheap to copy for tree search backtracking.
class ModelCursor {
public:
    ModelCursor() = default;
    ModelCursor(const ModelCursor& other);
    ModelCursor& operator=(const ModelCursor& other);
    ModelCursor(ModelCursor&&) = default;
    ModelCursor& operator=(ModelCursor&&) = default;

    const Rational& capital() const { return capital_; }
    const MartingaleModel::State& state() const { return *state_; }
    const MartingaleModel& model() const { return *model_; }

    void advance(bool bit) { model_->advance(*state_, capital_, bit); }
    void advance(const BitString& bits);
    ModelCursor advanced(bool bit) const;
    Rational completion_bound(std::uint64_t remaining) const {
        return model_->completion_bound(*state_, remaining);
    }

private:
    friend class MartingaleModel;
    ModelCursor(const MartingaleModel* model, std::unique_ptr<MartingaleModel::State> state,
                Rational capital)
        : model_(model), state_(std::move(state)), capital_(std::move(capital)) {}

    const MartingaleModel* model_ = nullptr;
    std::unique_ptr<MartingaleModel::State> state_;
    Rational capital_;
};

// Built-in models. All have value(empty) = 1.
ModelPtr uniform_model();
// Bets a fixed fraction q in (0,1) on ones: value(wb) = 2·value(w)·(q if b
// else 1-q). Canonical q must fit 32-bit numerator/denominator for the wire.
ModelPtr bernoulli_model(const Rational& q);
// Add-half (Krichevsky-Trofimov) estimator:
// value(wb) = 2·value(w)·(count_b(w)+1/2)/(|w|+1).
ModelPtr kt_model();
// Convex combination; weights positive and summing to exactly 1.
ModelPtr mixture_model(std::vector<ModelPtr> models, std::vector<Rational> weights);
// Same values, same staged ramp, but flags the model for staged-order
// enumeration, exercising genuinely stage-dependent admission order.
ModelPtr slow_staged_wrapper(ModelPtr inner);

// 2^((s-1)|w|)·value(w) as a symbolic scaled power of two.
ScaledPow2 induced_sgale(const MartingaleModel& m, const Rational& s, const BitString& w);

// |{u in {0,1}^k : value(wu) >= alpha·2^(k-l)·value(w)}| by exhaustive
// evaluation. Throws ExhaustiveBoundExceeded when k exceeds the bound.
std::uint64_t count_exceeding(const MartingaleModel& m, const BitString& w, std::uint64_t k,
                              const Rational& alpha, const Rational& l,
                              std::uint64_t exhaustive_bound = 12);

// Counting bound for the s-gale g induced by m: the number of u in {0,1}^k
// whose prefix maximum max over v ⊑ u (v = empty included) of
// 2^((1-s)|v|)·g(wv) reaches alpha·g(w), compared exactly through ScaledPow2.
// The induced scaling telescopes, so the count does not depend on s.
std::uint64_t count_exceeding_prefix_max(const MartingaleModel& m, const BitString& w,
                                         std::uint64_t k, const Rational& s,
                                         const Rational& alpha,
                                         std::uint64_t exhaustive_bound = 12);

// Wire-format model descriptions: id byte (uniform 0x00, bernoulli 0x01, kt
// 0x02, mixture 0x03), parameters as 32-bit little-endian pairs, staged-order
// wrapper as flag 0x80 or'd onto the id.
ModelPtr parse_model_bytes(const std::vector<std::uint8_t>& bytes, std::size_t& pos,
                           int depth = 0);
// Text specs used on the command line, e.g. "uniform", "kt", "bernoulli:1/4",
// "mix:1/2:kt,1/2:bernoulli:1/4", "slow:kt".
ModelPtr model_from_spec(const std::string& spec);

}  // namespace gale
